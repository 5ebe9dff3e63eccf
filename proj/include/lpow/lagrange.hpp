#pragma once

// Coefficients of the solution g of Lagrange's equation g(w) = w psi(g(w)):
// exact values by inversion, asymptotics by Otter-Meir-Moon.

#include <cstdint>
#include <variant>

#include "lpow/estimate.hpp"
#include "lpow/spec.hpp"

namespace lpow {

/// A_n = (1/n) coeff_[n-1](psi^n), n >= 1.
Rational lagrange_coeff(const SeriesSpec& spec, std::uint64_t n);

/// A_0..A_D (A_0 = 0) in one power computation per n.
std::vector<Rational> lagrange_coeffs(const SeriesSpec& spec, std::size_t D);

/// B_{n,q} = coeff_[n](g^q) = (q/n) coeff_[n-q](psi^n); 0 when n < q.
Rational lagrange_power_coeff(const SeriesSpec& spec, std::uint64_t n, std::uint64_t q);

/// coeff_[n](H(g)) = (1/n) coeff_[n-1](H'(z) psi(z)^n) for n >= 1, H(0) for n = 0.
Rational lagrange_H_coeff(const SeriesSpec& H, const SeriesSpec& spec, std::uint64_t n);

/// Same for an H given by its coefficients (entries beyond the list are 0),
/// e.g. H = z^q, which has no SeriesSpec form.
Rational lagrange_H_coeff(const ExactSeries& H, const SeriesSpec& spec, std::uint64_t n);

using OmmResult = std::variant<LogEstimate, UpperEnvelope>;

/// Asymptotic A_n. M_psi > 1: tau from m(tau) = 1,
///   ln Q - ln sqrt(2 pi) + ln tau - ln sigma(tau) - 1.5 ln n + n ln(psi(tau)/tau).
/// M_psi = 1 with R < inf: the same at tau = R. Affine psi: exact a b^{n-1}.
/// M_psi < 1: an UpperEnvelope. Zero-flagged unless n = 1 mod Q.
OmmResult omm_asymptotic(const SeriesSpec& spec, std::uint64_t n);

/// Asymptotic B_{n,q} for q = alpha n + beta sqrt(n): tau_alpha from
/// m(tau_alpha) = 1 - alpha and damping -beta^2 / (2 sigma^2(tau_alpha)).
/// alpha = beta = 0 is the fixed-q formula. Requires gauge 1.
LogEstimate omm_power_asymptotic(const SeriesSpec& spec, std::uint64_t n, std::uint64_t q,
                                 double alpha, double beta);

struct SolutionRadius {
    double value = 0.0;
    /// Set when M_psi < 1: R/psi(R) comes from the envelope, not a proven radius.
    bool from_envelope = false;
};

/// tau/psi(tau) (M_psi > 1), R/psi(R) (M_psi = 1, R < inf), 1/b for affine psi.
SolutionRadius solution_radius(const SeriesSpec& spec);

}  // namespace lpow
