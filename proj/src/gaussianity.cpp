#include "lpow/gaussianity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "lpow/errors.hpp"
#include "lpow/khinchin.hpp"

namespace lpow {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

std::vector<double> to_doubles(const std::vector<Rational>& g) {
    std::vector<double> out(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) out[j] = g[j].get_d();
    return out;
}

// g(t e^{i phi}) - g(t) for g(0) = 0, written so that phi -> 0 loses no digits:
// t^j (e^{i j phi} - 1) = t^j (cos(j phi) - 1 + i sin(j phi)), cos - 1 = -2 sin^2(j phi / 2).
cplx exp_poly_exponent(const std::vector<double>& g, double t, double phi) {
    cplx sum = 0;
    double tj = 1;
    for (std::size_t j = 1; j < g.size(); ++j) {
        tj *= t;
        if (g[j] == 0) continue;
        const double a = static_cast<double>(j) * phi;
        const double s = std::sin(0.5 * a);
        sum += g[j] * tj * cplx(-2.0 * s * s, std::sin(a));
    }
    return sum;
}

// log E(e^{i phi X_t}) for the Gaussian-eligible kinds.
struct GaussianExponent {
    std::vector<double> g;  // Exp is g = z
    double t;

    cplx operator()(double phi) const { return exp_poly_exponent(g, t, phi); }
};

GaussianExponent eligible_exponent(const SeriesSpec& spec, double t) {
    if (spec.is<kind::Exp>()) return {{0.0, 1.0}, t};
    if (const auto* e = spec.get_if<kind::ExpPolynomial>()) return {to_doubles(e->g), t};
    throw PreconditionError("Gaussian diagnostics apply to exp and exp-polynomial specs only");
}

// Composite Simpson on [0, b] with doubling until successive sums agree.
template <class F>
double simpson(F&& f, double b, double rel_tol) {
    std::size_t m = 64;
    auto rule = [&](std::size_t intervals) {
        const double h = b / static_cast<double>(intervals);
        double s = f(0.0) + f(b);
        for (std::size_t i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(h * static_cast<double>(i));
        return s * h / 3.0;
    };
    double prev = rule(m);
    for (int it = 0; it < 18; ++it) {
        m *= 2;
        const double cur = rule(m);
        if (std::fabs(cur - prev) <= rel_tol * std::fabs(cur) || std::fabs(cur - prev) < 1e-300) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace

cplx char_fn(const SeriesSpec& spec, double t, double theta) {
    if (!(t > 0)) throw RangeError("char_fn: t must be positive");
    const KhinchinEval ev = evaluate(spec, t);  // domain check
    const cplx w = std::polar(1.0, theta);
    if (spec.is<kind::Exp>() || spec.is<kind::ExpPolynomial>())
        return std::exp(eligible_exponent(spec, t)(theta));
    if (const auto* p = spec.get_if<kind::PoissonPgf>())
        return std::exp(exp_poly_exponent({0.0, p->rate}, t, theta));
    if (spec.is<kind::Geometric>()) return (1.0 - t) / (1.0 - t * w);
    if (const auto* a = spec.get_if<kind::Affine>()) {
        const double aa = a->a.get_d(), bb = a->b.get_d();
        return (aa + bb * t * w) / (aa + bb * t);
    }
    if (const auto* b = spec.get_if<kind::BinomialPower>())
        return std::pow((1.0 + t * w) / (1.0 + t), static_cast<double>(b->d));

    // Finite lists: weights b_j t^j / f(t) taken from logs to stay in range.
    std::vector<Rational> c;
    if (const auto* p = spec.get_if<kind::Polynomial>()) c = p->coeffs;
    if (const auto* tr = spec.get_if<kind::Truncated>()) c = tr->coeffs;
    const double lt = std::log(t);
    cplx sum = 0;
    for (std::size_t j = c.size(); j-- > 0;) {
        const double wj = c[j] == 0 ? 0.0 : std::exp(log_of(c[j]) + static_cast<double>(j) * lt - ev.log_f);
        sum = sum * w + wj;
    }
    return sum;
}

double gaussian_integral_I(const SeriesSpec& spec, double t, std::uint64_t n) {
    if (n < 1) throw PreconditionError("gaussian_integral_I: n must be >= 1");
    if (!(t > 0)) throw RangeError("gaussian_integral_I: t must be positive");
    const GaussianExponent E = eligible_exponent(spec, t);
    const KhinchinEval ev = evaluate(spec, t);
    const double sigma = ev.sigma(), mean = ev.mean;
    const double nd = static_cast<double>(n), rn = std::sqrt(nd);

    auto integrand = [&](double theta) {
        const double phi = theta / (sigma * rn);
        const cplx z = nd * E(phi) - cplx(0.0, theta * mean * rn / sigma);
        return std::abs(std::exp(z) - std::exp(-0.5 * theta * theta));
    };
    return 2.0 * simpson(integrand, kPi * sigma * rn, 1e-6);
}

double omega_g(const std::vector<Rational>& g, double t) {
    const std::vector<double> c = to_doubles(g);
    auto at = [&](std::size_t j) { return j < c.size() ? c[j] : 0.0; };
    double g3 = 0;
    for (std::size_t j = 3; j < c.size(); ++j)
        g3 += static_cast<double>(j * (j - 1) * (j - 2)) * c[j] * std::pow(t, static_cast<double>(j - 3));
    return (at(1) * t + 8.0 * at(2) * t * t + 4.5 * t * t * t * g3) / 6.0;
}

ArcReport hayman_cut_check(const std::vector<Rational>& g, std::uint64_t n, double t) {
    if (n < 1) throw PreconditionError("hayman_cut_check: n must be >= 1");
    if (!(t >= 1)) throw RangeError("hayman_cut_check: t must be >= 1");
    const std::vector<Rational>& full = g;
    const SeriesSpec spec = SeriesSpec::exp_polynomial(full);
    unsigned q = 0;
    std::size_t N = 0;
    for (std::size_t j = 1; j < full.size(); ++j) {
        if (full[j] == 0) continue;
        q = std::gcd(q, static_cast<unsigned>(j));
        N = j;
    }
    if (q != 1) throw PreconditionError("hayman_cut_check: gcd of the support of g must be 1");

    const GaussianExponent E{to_doubles(full), t};
    const KhinchinEval ev = evaluate(spec, t);
    const double sigma = ev.sigma(), mean = ev.mean;
    const double nd = static_cast<double>(n), rn = std::sqrt(nd);

    ArcReport r;
    r.n = n;
    r.t = t;
    r.quadrature_points = kArcGridPoints;
    r.cut = std::pow(t, -5.0 * static_cast<double>(N) / 12.0) * std::pow(nd, -5.0 / 12.0);

    const double theta_max = r.cut * sigma * rn;
    for (unsigned i = 0; i < kArcGridPoints; ++i) {
        const double theta = -theta_max + 2.0 * theta_max * i / (kArcGridPoints - 1);
        const cplx z = nd * E(theta / (sigma * rn)) - cplx(0.0, theta * mean * rn / sigma) + 0.5 * theta * theta;
        r.major_sup = std::max(r.major_sup, std::abs(std::exp(z) - 1.0));
    }

    // |E e^{i theta X_t}| is even in theta, so [h, pi] covers both arcs.
    double best = -INFINITY;
    for (unsigned i = 0; i < kArcGridPoints; ++i) {
        const double theta = r.cut + (kPi - r.cut) * i / (kArcGridPoints - 1);
        best = std::max(best, E(theta).real());
    }
    r.minor_sup = rn * sigma * std::exp(nd * best);
    r.integral_i = gaussian_integral_I(spec, t, n);
    return r;
}

}  // namespace lpow
