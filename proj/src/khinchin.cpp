#include "lpow/khinchin.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "lpow/errors.hpp"

namespace lpow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

struct Moments {
    double log_f;
    double mean;
    double variance;
};

// log-sum-exp evaluation of a finite list of coefficients (given by their
// logs) at t > 0; two passes keep the variance free of cancellation.
Moments finite_moments(const std::vector<double>& log_c, double t) {
    const double lt = std::log(t);
    double top = -kInf;
    std::vector<double> w(log_c.size());
    for (std::size_t j = 0; j < log_c.size(); ++j) {
        w[j] = log_c[j] + static_cast<double>(j) * lt;
        top = std::max(top, w[j]);
    }
    long double z = 0, s1 = 0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        long double p = std::exp(static_cast<long double>(w[j] - top));
        z += p;
        s1 += p * j;
    }
    const long double mean = s1 / z;
    long double s2 = 0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        long double p = std::exp(static_cast<long double>(w[j] - top));
        long double d = static_cast<long double>(j) - mean;
        s2 += p * d * d;
    }
    return {top + static_cast<double>(std::log(z)), static_cast<double>(mean),
            static_cast<double>(s2 / z)};
}

std::vector<double> to_doubles(const std::vector<Rational>& c) {
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].get_d();
    return out;
}

std::vector<double> log_list(const std::vector<Rational>& c) {
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = log_of(c[i]);
    return out;
}

// Heuristic convergence of sum_j j^p b_j R^j from a coefficient prefix:
// the largest of the last quarter of terms must be negligible against the
// partial sum.
bool prefix_converges(const std::vector<Rational>& c, double radius, int power) {
    const double lr = std::log(radius);
    std::vector<double> lt(c.size(), -kInf);
    double top = -kInf;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] == 0) continue;
        double wj = power > 0 && j == 0 ? -kInf : log_of(c[j]) + static_cast<double>(j) * lr;
        if (power > 0 && j > 0) wj += power * std::log(static_cast<double>(j));
        lt[j] = wj;
        top = std::max(top, wj);
    }
    if (top == -kInf) return true;
    double sum = 0;
    for (double x : lt) sum += std::exp(x - top);
    const double log_sum = top + std::log(sum);
    const std::size_t quarter = std::max<std::size_t>(1, c.size() / 4);
    double tail = -kInf;
    for (std::size_t j = c.size() - quarter; j < c.size(); ++j) tail = std::max(tail, lt[j]);
    return tail - log_sum <= std::log(1e-8);
}

Moments moments_at(const SeriesSpec& spec, double t) {
    return std::visit(
        overloaded{
            [&](const kind::Exp&) { return Moments{t, t, t}; },
            [&](const kind::PoissonPgf& s) { return Moments{s.rate * (t - 1.0), s.rate * t, s.rate * t}; },
            [&](const kind::Affine& s) {
                const double a = s.a.get_d(), b = s.b.get_d();
                const double f = a + b * t;
                return Moments{std::log(f), b * t / f, a * b * t / (f * f)};
            },
            [&](const kind::Geometric&) {
                const double q = 1.0 - t;
                return Moments{-std::log1p(-t), t / q, t / (q * q)};
            },
            [&](const kind::BinomialPower& s) {
                const double d = s.d;
                const double q = 1.0 + t;
                return Moments{d * std::log1p(t), d * t / q, d * t / (q * q)};
            },
            [&](const kind::Polynomial& s) { return finite_moments(log_list(s.coeffs), t); },
            [&](const kind::Truncated& s) { return finite_moments(log_list(s.coeffs), t); },
            [&](const kind::ExpPolynomial& s) {
                const auto g = to_doubles(s.g);
                long double v = 0, m = 0, var = 0, tj = 1;
                for (std::size_t j = 1; j < g.size(); ++j) {
                    tj *= t;
                    const long double term = g[j] * tj;
                    v += term;
                    m += term * j;
                    var += term * j * j;
                }
                return Moments{static_cast<double>(v), static_cast<double>(m), static_cast<double>(var)};
            },
        },
        spec.kind());
}

void check_domain(const SeriesSpec& spec, double t) {
    if (!(t >= 0) || std::isnan(t)) throw RangeError("evaluate: t must be >= 0");
    const double top = spec.max_eval_t();
    const bool ok = spec.closed_domain() ? t <= top : t < top;
    if (!ok) {
        throw RangeError("evaluate: t = " + std::to_string(t) + " outside the domain (limit " +
                         std::to_string(top) + ")");
    }
}

KhinchinEval assemble(double t, const Moments& mo) {
    KhinchinEval e;
    e.t = t;
    e.log_f = mo.log_f;
    e.mean = mo.mean;
    e.variance = mo.variance;
    e.f_value = std::exp(mo.log_f);
    e.f_prime = e.f_value * mo.mean / t;
    e.f_double_prime = e.f_value * (mo.variance + mo.mean * mo.mean - mo.mean) / (t * t);
    return e;
}

KhinchinEval at_zero(const SeriesSpec& spec) {
    // b_0, b_1, b_2; entries beyond a short list are treated as absent.
    double b[3] = {0, 0, 0};
    std::vector<double> lc;
    if (const auto* tr = spec.get_if<kind::Truncated>()) {
        lc = log_list(tr->coeffs);
    } else {
        lc = log_coefficients(spec, 2);
    }
    for (std::size_t j = 0; j < 3 && j < lc.size(); ++j) b[j] = std::exp(lc[j]);
    KhinchinEval e;
    e.t = 0;
    e.log_f = lc[0];
    e.f_value = b[0];
    e.f_prime = b[1];
    e.f_double_prime = 2 * b[2];
    return e;
}

}  // namespace

KhinchinEval evaluate(const SeriesSpec& spec, double t) {
    check_domain(spec, t);
    if (t == 0) return at_zero(spec);
    return assemble(t, moments_at(spec, t));
}

Gauge gauge(const SeriesSpec& spec) {
    auto gcd_of_support = [](const std::vector<Rational>& c, std::size_t first) {
        unsigned q = 0;
        for (std::size_t j = first; j < c.size(); ++j)
            if (c[j] != 0) q = std::gcd(q, static_cast<unsigned>(j));
        return q == 0 ? 1u : q;
    };
    return std::visit(overloaded{
                          [&](const kind::Polynomial& s) { return Gauge{gcd_of_support(s.coeffs, 1), false}; },
                          // e^g is supported on the semigroup generated by supp(g).
                          [&](const kind::ExpPolynomial& s) { return Gauge{gcd_of_support(s.g, 1), false}; },
                          [&](const kind::Truncated& s) {
                              if (s.asserted_gauge) return Gauge{*s.asserted_gauge, false};
                              return Gauge{gcd_of_support(s.coeffs, 1), !s.complete};
                          },
                          [](const auto&) { return Gauge{1, false}; },
                      },
                      spec.kind());
}

unsigned certified_gauge(const SeriesSpec& spec) {
    Gauge g = gauge(spec);
    if (g.observed)
        throw PreconditionError(
            "gauge of an incomplete truncated series is only observed; assert it explicitly");
    return g.value;
}

MeanLimit mean_limit(const SeriesSpec& spec) {
    return std::visit(
        overloaded{
            [](const kind::Affine&) { return MeanLimit{true, 1.0}; },
            [](const kind::BinomialPower& s) { return MeanLimit{true, static_cast<double>(s.d)}; },
            [](const kind::Polynomial& s) {
                std::size_t deg = s.coeffs.size() - 1;
                while (s.coeffs[deg] == 0) --deg;
                return MeanLimit{true, static_cast<double>(deg)};
            },
            [](const kind::Truncated& s) {
                if (s.complete) {
                    if (!std::isfinite(s.radius)) {
                        std::size_t deg = s.coeffs.size() - 1;
                        while (s.coeffs[deg] == 0) --deg;
                        return MeanLimit{true, static_cast<double>(deg)};
                    }
                    return MeanLimit{true, finite_moments(log_list(s.coeffs), s.radius).mean};
                }
                if (!std::isfinite(s.radius) || !prefix_converges(s.coeffs, s.radius, 1)) return MeanLimit{};
                return MeanLimit{true, finite_moments(log_list(s.coeffs), s.radius).mean};
            },
            [](const auto&) { return MeanLimit{}; },
        },
        spec.kind());
}

bool has_boundary_extension(const SeriesSpec& spec) {
    const auto* tr = spec.get_if<kind::Truncated>();
    if (tr == nullptr || !std::isfinite(tr->radius)) return false;
    if (tr->complete) return true;
    return prefix_converges(tr->coeffs, tr->radius, 1) && prefix_converges(tr->coeffs, tr->radius, 2);
}

KhinchinEval boundary_eval(const SeriesSpec& spec) {
    const double r = spec.radius();
    if (!std::isfinite(r)) throw RangeError("boundary_eval: radius of convergence is infinite");
    const auto* tr = spec.get_if<kind::Truncated>();
    if (tr == nullptr) throw RangeError("boundary_eval: mean limit is infinite; no boundary extension");
    if (!tr->complete) {
        if (!prefix_converges(tr->coeffs, r, 1))
            throw RangeError("boundary_eval: mean limit is infinite; no boundary extension");
        if (!prefix_converges(tr->coeffs, r, 2)) throw RangeError("infinite boundary variance");
    }
    return assemble(r, finite_moments(log_list(tr->coeffs), r));
}

double solve_mean(const SeriesSpec& spec, double x) {
    if (!(x > 0) || !std::isfinite(x)) throw RangeError("mean out of range: target must be positive");
    const double tol = 1e-12 * std::max(1.0, x);
    const MeanLimit lim = mean_limit(spec);
    if (lim.finite) {
        if (std::fabs(x - lim.value) <= tol) {
            if (has_boundary_extension(spec)) return spec.radius();
            throw RangeError("mean out of range: target equals M_f without a boundary extension");
        }
        if (x > lim.value) throw RangeError("mean out of range: target exceeds M_f");
    }

    auto mean_at = [&](double t) { return evaluate(spec, t).mean; };
    const double r = spec.radius();
    const double top = spec.max_eval_t();

    double lo = 0, hi = 0;
    double t = std::isfinite(r) ? std::min(1.0, 0.5 * r) : 1.0;
    if (mean_at(t) < x) {
        lo = t;
        for (int it = 0;; ++it) {
            double next = std::isfinite(top) ? 0.5 * (t + top) : 2.0 * t;
            if (std::isfinite(top) && (it > 2000 || next == t)) {
                if (spec.closed_domain() && mean_at(top) >= x) {
                    next = top;
                } else {
                    throw RangeError("mean out of range: target not reached inside the evaluable domain");
                }
            }
            if (!std::isfinite(next) || it > 4000)
                throw RangeError("mean out of range: bracketing failed");
            t = next;
            if (mean_at(t) >= x) {
                hi = t;
                break;
            }
            lo = t;
        }
    } else {
        hi = t;
        for (int it = 0;; ++it) {
            t *= 0.5;
            if (t == 0 || it > 4000) throw RangeError("mean out of range: bracketing failed");
            if (mean_at(t) < x) {
                lo = t;
                break;
            }
            hi = t;
        }
    }

    // m is strictly increasing, so bisection always converges.
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double m = mean_at(mid);
        if (m < x)
            lo = mid;
        else
            hi = mid;
    }
    t = mid;

    // Newton polish with m'(t) = sigma^2(t) / t.
    for (int it = 0; it < 5; ++it) {
        const KhinchinEval e = evaluate(spec, t);
        const double err = e.mean - x;
        if (std::fabs(err) <= 1e-3 * tol || e.variance <= 0) break;
        const double next = t - err * t / e.variance;
        if (!(next > 0) || next > top || (spec.closed_domain() ? false : next >= top)) break;
        if (std::fabs(mean_at(next) - x) >= std::fabs(err)) break;
        t = next;
    }
    return t;
}

}  // namespace lpow
