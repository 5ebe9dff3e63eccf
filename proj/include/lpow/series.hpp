#pragma once

// Dense truncated power series over arbitrary-precision rationals.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace lpow {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p/q", an integer, or a plain decimal ("0.25", "1e-3") exactly.
Rational parse_rational(const std::string& text);

/// Exact rational value of a finite double.
Rational rational_from_double(double x);

/// Renders p/q (or p when q = 1).
std::string to_string(const Rational& q);

/// Sign and natural log of |value|, without ever materialising the value
/// as a double. `log_abs` is -inf for zero.
struct LogMagnitude {
    int sign = 0;
    double log_abs = 0.0;
};

LogMagnitude log_magnitude(const Integer& z);
LogMagnitude log_magnitude(const Rational& q);

/// Convenience: ln(q) for q > 0, -inf for q == 0. Throws for q < 0.
double log_of(const Rational& q);

/// Coefficients b_0..b_D of a truncated series. The degree cap is
/// `size() - 1`; arithmetic never reads beyond it.
class ExactSeries {
public:
    ExactSeries() = default;
    explicit ExactSeries(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {}
    ExactSeries(std::initializer_list<Rational> coeffs) : coeffs_(coeffs) {}

    /// Zero series with room for degrees 0..degree_cap.
    static ExactSeries zero(std::size_t degree_cap) {
        return ExactSeries(std::vector<Rational>(degree_cap + 1));
    }

    std::size_t size() const { return coeffs_.size(); }
    std::size_t degree_cap() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }

    /// Coefficient of z^j, zero beyond the cap.
    Rational operator[](std::size_t j) const { return j < coeffs_.size() ? coeffs_[j] : Rational(0); }
    Rational& at(std::size_t j) { return coeffs_.at(j); }

    const std::vector<Rational>& coeffs() const { return coeffs_; }
    std::span<const Rational> view() const { return coeffs_; }

    /// Same coefficients, truncated or zero-padded to the given cap.
    ExactSeries truncated(std::size_t degree_cap) const;

    bool operator==(const ExactSeries& other) const = default;

private:
    std::vector<Rational> coeffs_;
};

/// Cauchy product truncated at `degree_cap`.
ExactSeries series_mul(const ExactSeries& a, const ExactSeries& b, std::size_t degree_cap);

ExactSeries series_add(const ExactSeries& a, const ExactSeries& b);
ExactSeries series_scale(const ExactSeries& a, const Rational& c);

/// Term-by-term derivative; the result has one fewer coefficient.
ExactSeries series_derivative(const ExactSeries& a);

/// 1/a, requires a_0 != 0.
ExactSeries series_reciprocal(const ExactSeries& a, std::size_t degree_cap);

/// a/b, requires b_0 != 0.
ExactSeries series_div(const ExactSeries& a, const ExactSeries& b, std::size_t degree_cap);

/// ln(a); requires a_0 == 1 so that the result stays rational.
ExactSeries series_log(const ExactSeries& a, std::size_t degree_cap);

/// exp(a); requires a_0 == 0.
ExactSeries series_exp(const ExactSeries& a, std::size_t degree_cap);

/// outer(inner(z)); requires inner_0 == 0.
ExactSeries series_compose(const ExactSeries& outer, const ExactSeries& inner,
                           std::size_t degree_cap);

/// a^n by binary exponentiation, each intermediate product truncated at
/// `degree_cap`.
ExactSeries series_pow(const ExactSeries& a, std::uint64_t n, std::size_t degree_cap);

/// a^n by J.C.P. Miller's recurrence, exact over integer-scaled
/// coefficients. Requires a_0 != 0. Cost is O(degree_cap * |support(a)|)
/// big-integer operations.
ExactSeries series_pow_recurrence(const ExactSeries& a, std::uint64_t n, std::size_t degree_cap);

}  // namespace lpow
