#include "lpow/spec.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lpow/errors.hpp"

namespace lpow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void validate_coefficients(const std::vector<Rational>& c, const char* what) {
    if (c.empty()) throw PreconditionError(std::string(what) + ": empty coefficient list");
    for (const auto& x : c)
        if (x < 0) throw PreconditionError(std::string(what) + ": coefficients must be nonnegative");
    if (c[0] <= 0) throw PreconditionError(std::string(what) + ": coefficient of z^0 must be positive");
    bool nonconstant = false;
    for (std::size_t j = 1; j < c.size(); ++j) nonconstant = nonconstant || c[j] != 0;
    if (!nonconstant) throw PreconditionError(std::string(what) + ": series must be nonconstant");
}

Integer binomial(unsigned long n, unsigned long k) {
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

std::string join(const std::vector<Rational>& xs, std::size_t from = 0) {
    std::string out;
    for (std::size_t i = from; i < xs.size(); ++i) {
        if (i > from) out += ',';
        out += to_string(xs[i]);
    }
    return out;
}

std::string format_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

SeriesSpec::SeriesSpec(SeriesKind k) : kind_(std::move(k)) {
    std::visit(overloaded{
                   [](const kind::Exp&) {},
                   [](const kind::Geometric&) {},
                   [](const kind::Affine& s) {
                       if (s.a <= 0 || s.b <= 0)
                           throw PreconditionError("affine: a and b must be positive");
                   },
                   [](const kind::BinomialPower& s) {
                       if (s.d < 1) throw PreconditionError("binomial power: d must be >= 1");
                   },
                   [](const kind::Polynomial& s) { validate_coefficients(s.coeffs, "polynomial"); },
                   [](const kind::ExpPolynomial& s) {
                       if (s.g.empty() || s.g[0] != 0)
                           throw PreconditionError("exp-polynomial: g(0) must be 0");
                       bool nonconstant = false;
                       for (const auto& x : s.g) {
                           if (x < 0) throw PreconditionError("exp-polynomial: coefficients must be nonnegative");
                           nonconstant = nonconstant || x > 0;
                       }
                       if (!nonconstant) throw PreconditionError("exp-polynomial: g must be nonconstant");
                   },
                   [](const kind::PoissonPgf& s) {
                       if (!(s.rate > 0) || !std::isfinite(s.rate))
                           throw PreconditionError("poisson pgf: rate must be positive");
                   },
                   [](const kind::Truncated& s) {
                       validate_coefficients(s.coeffs, "truncated");
                       if (!(s.radius > 0)) throw PreconditionError("truncated: radius must be positive");
                       if (s.asserted_gauge && *s.asserted_gauge < 1)
                           throw PreconditionError("truncated: asserted gauge must be >= 1");
                   },
               },
               kind_);
}

double SeriesSpec::radius() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(overloaded{
                          [](const kind::Geometric&) { return 1.0; },
                          [](const kind::Truncated& s) { return s.radius; },
                          [](const auto&) { return inf; },
                      },
                      kind_);
}

bool SeriesSpec::closed_domain() const {
    if (const auto* t = get_if<kind::Truncated>()) return std::isfinite(t->radius);
    return false;
}

double SeriesSpec::max_eval_t() const {
    if (const auto* t = get_if<kind::Truncated>())
        return t->complete ? t->radius : kTruncatedEvalFraction * t->radius;
    return radius();
}

std::optional<std::vector<Rational>> SeriesSpec::finite_coefficients() const {
    using R = std::optional<std::vector<Rational>>;
    return std::visit(overloaded{
                          [](const kind::Affine& s) -> R { return std::vector<Rational>{s.a, s.b}; },
                          [](const kind::BinomialPower& s) -> R {
                              std::vector<Rational> c(s.d + 1);
                              for (unsigned j = 0; j <= s.d; ++j) c[j] = Rational(binomial(s.d, j));
                              return c;
                          },
                          [](const kind::Polynomial& s) -> R { return s.coeffs; },
                          [](const kind::Truncated& s) -> R {
                              if (s.complete) return s.coeffs;
                              return std::nullopt;
                          },
                          [](const auto&) -> R { return std::nullopt; },
                      },
                      kind_);
}

std::string SeriesSpec::to_string() const {
    return std::visit(overloaded{
                          [](const kind::Exp&) -> std::string { return "exp"; },
                          [](const kind::Geometric&) -> std::string { return "geom"; },
                          [](const kind::Affine& s) -> std::string {
                              return "affine:" + lpow::to_string(s.a) + "," + lpow::to_string(s.b);
                          },
                          [](const kind::BinomialPower& s) -> std::string { return "binpow:" + std::to_string(s.d); },
                          [](const kind::Polynomial& s) -> std::string { return "poly:" + join(s.coeffs); },
                          [](const kind::ExpPolynomial& s) -> std::string { return "exppoly:" + join(s.g, 1); },
                          [](const kind::PoissonPgf& s) -> std::string { return "poisson:" + format_double(s.rate); },
                          [](const kind::Truncated& s) -> std::string {
                              std::string head = s.complete ? "poly:" : "trunclist:";
                              std::string out = head + join(s.coeffs) + "@" + format_double(s.radius);
                              if (s.asserted_gauge) out += ";gauge=" + std::to_string(*s.asserted_gauge);
                              return out;
                          },
                      },
                      kind_);
}

ExactSeries expand(const SeriesSpec& spec, std::size_t degree_cap) {
    std::vector<Rational> c(degree_cap + 1);
    std::visit(overloaded{
                   [&](const kind::Exp&) {
                       Integer fact = 1;
                       for (std::size_t j = 0; j <= degree_cap; ++j) {
                           if (j > 0) fact *= static_cast<unsigned long>(j);
                           c[j] = Rational(Integer(1), fact);
                       }
                   },
                   [&](const kind::Geometric&) {
                       for (auto& x : c) x = 1;
                   },
                   [&](const kind::Affine& s) {
                       c[0] = s.a;
                       if (degree_cap >= 1) c[1] = s.b;
                   },
                   [&](const kind::BinomialPower& s) {
                       for (std::size_t j = 0; j <= degree_cap && j <= s.d; ++j) c[j] = Rational(binomial(s.d, j));
                   },
                   [&](const kind::Polynomial& s) {
                       for (std::size_t j = 0; j <= degree_cap && j < s.coeffs.size(); ++j) c[j] = s.coeffs[j];
                   },
                   [&](const kind::ExpPolynomial& s) {
                       c = series_exp(ExactSeries(s.g).truncated(degree_cap), degree_cap).coeffs();
                   },
                   [&](const kind::PoissonPgf&) {
                       throw PreconditionError("expand: Poisson pgf has irrational coefficients");
                   },
                   [&](const kind::Truncated& s) {
                       if (!s.complete && s.coeffs.size() < degree_cap + 1)
                           throw PreconditionError("insufficient coefficients: truncated spec has " +
                                                   std::to_string(s.coeffs.size()) + ", need " +
                                                   std::to_string(degree_cap + 1));
                       for (std::size_t j = 0; j <= degree_cap && j < s.coeffs.size(); ++j) c[j] = s.coeffs[j];
                   },
               },
               spec.kind());
    return ExactSeries(std::move(c));
}

std::vector<double> log_coefficients(const SeriesSpec& spec, std::size_t degree_cap) {
    std::vector<double> out(degree_cap + 1);
    if (spec.is<kind::Exp>()) {
        for (std::size_t j = 0; j <= degree_cap; ++j) out[j] = -std::lgamma(static_cast<double>(j) + 1.0);
        return out;
    }
    if (const auto* p = spec.get_if<kind::PoissonPgf>()) {
        const double lr = std::log(p->rate);
        for (std::size_t j = 0; j <= degree_cap; ++j)
            out[j] = -p->rate + static_cast<double>(j) * lr - std::lgamma(static_cast<double>(j) + 1.0);
        return out;
    }
    if (spec.is<kind::Geometric>()) return out;  // all zeros: ln 1
    ExactSeries e = expand(spec, degree_cap);
    for (std::size_t j = 0; j <= degree_cap; ++j) out[j] = log_of(e[j]);
    return out;
}

namespace {

Integer to_integer(std::uint64_t n) { return Integer(std::to_string(n), 10); }

Rational ratio(Integer num, Integer den) {
    Rational r(std::move(num), std::move(den));
    r.canonicalize();
    return r;
}

// e^{n g(z)} with G = n g = gamma / L: E_j = j! L^j F_j satisfies
//   E_j = sum_i i gamma_i L^{i-1} (j-1)!/(j-i)! E_{j-i},
// an all-integer recurrence over the support of g.
struct ScaledExp {
    std::vector<Integer> E;
    Integer L;
};

ScaledExp exp_polynomial_scaled(const std::vector<Rational>& g, std::uint64_t n, std::size_t cap) {
    Integer L = 1;
    for (const auto& x : g) L = lcm(L, Integer(x.get_den()));
    std::vector<std::pair<std::size_t, Integer>> support;  // (i, i gamma_i L^{i-1})
    const Integer nn = to_integer(n);
    for (std::size_t i = 1; i < g.size() && i <= cap; ++i) {
        if (g[i] == 0) continue;
        Integer w = Integer(g[i].get_num()) * (L / Integer(g[i].get_den())) * nn * static_cast<unsigned long>(i);
        Integer Lp;
        mpz_pow_ui(Lp.get_mpz_t(), L.get_mpz_t(), i - 1);
        support.emplace_back(i, w * Lp);
    }
    std::vector<Integer> E(cap + 1);
    E[0] = 1;
    Integer falling, term;
    for (std::size_t j = 1; j <= cap; ++j) {
        E[j] = 0;
        falling = 1;  // (j-1)!/(j-i)!
        std::size_t last = 1;
        for (const auto& [i, w] : support) {
            if (i > j) break;
            for (; last < i; ++last) falling *= static_cast<unsigned long>(j - last);
            term = w * falling;
            E[j] += term * E[j - i];
        }
    }
    return {std::move(E), std::move(L)};
}

std::vector<Rational> exp_polynomial_power(const std::vector<Rational>& g, std::uint64_t n, std::size_t cap) {
    const ScaledExp s = exp_polynomial_scaled(g, n, cap);
    std::vector<Rational> out(cap + 1);
    Integer den = 1;
    for (std::size_t j = 0; j <= cap; ++j) {
        if (j > 0) den *= s.L * static_cast<unsigned long>(j);
        out[j] = ratio(s.E[j], den);
    }
    return out;
}

}  // namespace

ExactSeries power_coefficients(const SeriesSpec& spec, std::uint64_t n, std::size_t degree_cap) {
    std::vector<Rational> c(degree_cap + 1);
    const Integer nn = to_integer(n);
    if (spec.is<kind::Exp>()) {
        // e^{nz}: n^j / j!
        Integer num = 1, den = 1;
        for (std::size_t j = 0; j <= degree_cap; ++j) {
            if (j > 0) {
                num *= nn;
                den *= static_cast<unsigned long>(j);
            }
            c[j] = ratio(num, den);
        }
        return ExactSeries(std::move(c));
    }
    if (spec.is<kind::Geometric>()) {
        // C(n+j-1, j)
        Integer b = 1;
        for (std::size_t j = 0; j <= degree_cap; ++j) {
            if (j > 0) {
                b *= nn + static_cast<unsigned long>(j - 1);
                b /= static_cast<unsigned long>(j);
            }
            c[j] = Rational(b);
        }
        return ExactSeries(std::move(c));
    }
    if (const auto* e = spec.get_if<kind::ExpPolynomial>()) return ExactSeries(exp_polynomial_power(e->g, n, degree_cap));
    return series_pow_recurrence(expand(spec, degree_cap), n, degree_cap);
}

Rational coeff_of_power(const SeriesSpec& spec, std::size_t k, std::uint64_t n) {
    if (n < 1) throw PreconditionError("coeff_of_power: n must be >= 1");
    if (spec.is<kind::Exp>()) {
        Integer num, den;
        mpz_pow_ui(num.get_mpz_t(), to_integer(n).get_mpz_t(), k);
        mpz_fac_ui(den.get_mpz_t(), k);
        return ratio(num, den);
    }
    if (spec.is<kind::Geometric>()) {
        Integer b;
        mpz_bin_ui(b.get_mpz_t(), Integer(to_integer(n) + static_cast<unsigned long>(k) - 1).get_mpz_t(), k);
        return Rational(b);
    }
    if (const auto* e = spec.get_if<kind::ExpPolynomial>()) {
        ScaledExp s = exp_polynomial_scaled(e->g, n, k);
        Integer den, Lk;
        mpz_fac_ui(den.get_mpz_t(), k);
        mpz_pow_ui(Lk.get_mpz_t(), s.L.get_mpz_t(), k);
        return ratio(std::move(s.E[k]), den * Lk);
    }
    return power_coefficients(spec, n, k)[k];
}

double log_coeff_of_power(const SeriesSpec& spec, std::size_t k, std::uint64_t n) {
    return log_of(coeff_of_power(spec, k, n));
}

}  // namespace lpow
