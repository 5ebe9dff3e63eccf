#pragma once

// Symbolic descriptions of power series with nonnegative coefficients,
// a_0 > 0 and at least one further nonzero coefficient.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lpow/series.hpp"

namespace lpow {

namespace kind {

/// e^z
struct Exp {};

/// a + b z
struct Affine {
    Rational a;
    Rational b;
};

/// 1 / (1 - z)
struct Geometric {};

/// (1 + z)^d
struct BinomialPower {
    unsigned d;
};

/// c_0 + c_1 z + ... (complete; infinite radius)
struct Polynomial {
    std::vector<Rational> coeffs;
};

/// e^{g(z)} with g polynomial, g_0 = 0.
struct ExpPolynomial {
    std::vector<Rational> g;
};

/// e^{rate (z - 1)}, the Poisson(rate) probability generating function.
struct PoissonPgf {
    double rate;
};

/// User-supplied coefficient list with a declared radius. When `complete`
/// is false the list is a prefix of an unknown series and evaluations are
/// restricted to t <= 0.95 radius. When true the list is the whole series
/// and the radius is a declaration (a polynomial studied on [0, R]).
struct Truncated {
    std::vector<Rational> coeffs;
    double radius;
    bool complete = false;
    std::optional<unsigned> asserted_gauge;
};

}  // namespace kind

using SeriesKind = std::variant<kind::Exp, kind::Affine, kind::Geometric, kind::BinomialPower,
                                kind::Polynomial, kind::ExpPolynomial, kind::PoissonPgf,
                                kind::Truncated>;

/// Fraction of the declared radius that incomplete Truncated specs may be
/// evaluated at.
inline constexpr double kTruncatedEvalFraction = 0.95;

class SeriesSpec {
public:
    /// Validates the invariants of the class and throws PreconditionError.
    explicit SeriesSpec(SeriesKind kind);

    static SeriesSpec exp() { return SeriesSpec(kind::Exp{}); }
    static SeriesSpec affine(Rational a, Rational b) { return SeriesSpec(kind::Affine{std::move(a), std::move(b)}); }
    static SeriesSpec geometric() { return SeriesSpec(kind::Geometric{}); }
    static SeriesSpec binomial_power(unsigned d) { return SeriesSpec(kind::BinomialPower{d}); }
    static SeriesSpec polynomial(std::vector<Rational> c) { return SeriesSpec(kind::Polynomial{std::move(c)}); }
    static SeriesSpec exp_polynomial(std::vector<Rational> g) { return SeriesSpec(kind::ExpPolynomial{std::move(g)}); }
    static SeriesSpec poisson_pgf(double rate) { return SeriesSpec(kind::PoissonPgf{rate}); }
    static SeriesSpec truncated(std::vector<Rational> c, double radius, bool complete = false,
                                std::optional<unsigned> asserted_gauge = std::nullopt) {
        return SeriesSpec(kind::Truncated{std::move(c), radius, complete, asserted_gauge});
    }

    const SeriesKind& kind() const { return kind_; }

    template <class K>
    bool is() const { return std::holds_alternative<K>(kind_); }

    template <class K>
    const K* get_if() const { return std::get_if<K>(&kind_); }

    /// Radius of convergence (declared radius for Truncated); +inf when entire.
    double radius() const;

    /// Largest t at which evaluation is permitted (inclusive bound when
    /// `closed_domain()`).
    double max_eval_t() const;
    bool closed_domain() const;

    /// Exact coefficient list when the series is a finite polynomial
    /// (Affine, BinomialPower, Polynomial, complete Truncated).
    std::optional<std::vector<Rational>> finite_coefficients() const;

    /// Textual form accepted by the CLI parser.
    std::string to_string() const;

private:
    SeriesKind kind_;
};

/// Exact Taylor coefficients b_0..b_D.
/// Throws PreconditionError for Truncated lists shorter than D+1
/// ("insufficient coefficients") and for PoissonPgf (b_0 irrational).
ExactSeries expand(const SeriesSpec& spec, std::size_t degree_cap);

/// ln b_j for j = 0..degree_cap (-inf for zero coefficients). Works for
/// every kind including PoissonPgf.
std::vector<double> log_coefficients(const SeriesSpec& spec, std::size_t degree_cap);

/// Exact coefficients of spec(z)^n through degree `degree_cap`.
ExactSeries power_coefficients(const SeriesSpec& spec, std::uint64_t n, std::size_t degree_cap);

/// coeff_[k](spec(z)^n), exact.
Rational coeff_of_power(const SeriesSpec& spec, std::size_t k, std::uint64_t n);

/// Convenience: ln coeff_of_power (-inf when it vanishes).
double log_coeff_of_power(const SeriesSpec& spec, std::size_t k, std::uint64_t n);

}  // namespace lpow
