#pragma once

// Lagrangian distributions L(psi_t, f_s): the total progeny of a
// Galton-Watson process with offspring pgf psi_t started from an initial
// generation with pgf f_s.

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "lpow/estimate.hpp"
#include "lpow/spec.hpp"

namespace lpow {

/// f(z) = z^j: the process starts from exactly j individuals.
struct Monomial {
    unsigned j = 1;
};

using InitialSpec = std::variant<SeriesSpec, Monomial>;

struct LagrangianSpec {
    SeriesSpec offspring;
    InitialSpec initial = Monomial{1};
    double t = 0.0;  // tilt of psi, m_psi(t) <= 1
    double s = 1.0;  // tilt of f, ignored for Monomial
};

/// psi_t(z) = psi(tz)/psi(t).
struct TiltedPgf {
    SeriesSpec base;
    double t = 0.0;
    double log_norm = 0.0;  // ln psi(t)
    double mean = 0.0;      // psi_t'(1) = m_psi(t)

    /// Closed form when one exists: Exp tilts to PoissonPgf(t), PoissonPgf(r) to PoissonPgf(r t).
    std::optional<SeriesSpec> closed_form;

    /// b_j t^j / psi(t), j = 0..cap.
    std::vector<long double> coefficients(std::size_t cap) const;

    /// Exact coefficients for finite polynomial bases (t taken as its exact binary value).
    std::optional<std::vector<Rational>> exact_coefficients() const;
};

/// RangeError outside 0 < t < R (t = R allowed with a boundary extension).
TiltedPgf tilt(const SeriesSpec& spec, double t);

struct Pmf {
    std::vector<double> masses;                  // P(Z = n), n = 0..n_max
    std::optional<std::vector<Rational>> exact;  // set by the exact pipeline
    std::uint64_t n_max = 0;
    double tail_mass = 0.0;  // 1 - sum of masses
};

/// P(Z = n) = (1/n) coeff_[n-1](f_s'(z) psi_t(z)^n) for 1 <= n <= nMax and
/// P(Z = 0) = f_s(0), in extended precision. RangeError on supercritical tilts.
Pmf lagrangian_pmf(const LagrangianSpec& ls, std::uint64_t n_max);

/// A single P(Z = n); O(n^2) regardless of earlier masses.
double lagrangian_pmf_at(const LagrangianSpec& ls, std::uint64_t n);

/// Rational masses for polynomial offspring with a Monomial or polynomial initial.
Pmf lagrangian_pmf_exact(const LagrangianSpec& ls, std::uint64_t n_max);

/// ln P(Z = n) ~ -ln sqrt(2 pi) + ln s - ln f(s) + n ln(psi(tau)/psi(t))
///   + (n-1) ln(t/tau) - 1.5 ln n - ln sigma(tau) + ln f'(s tau / t),
/// valid while s tau < t S.
LogEstimate lagrangian_pmf_asymptotic(const LagrangianSpec& ls, std::uint64_t n);

/// (j/n) e^{-tn} (tn)^{n-j} / (n-j)!, 0 for n < j.
double borel_tanner_pmf(double t, unsigned j, std::uint64_t n);

/// e^{-tn-s} (tn+s)^{n-1} s / n! for n >= 1, e^{-s} for n = 0.
double poisson_poisson_pmf(double s, double t, std::uint64_t n);

struct Histogram {
    std::vector<std::uint64_t> counts;  // counts[z], z up to the largest observed total <= cap
    std::uint64_t escaped = 0;          // runs whose total exceeded cap
    std::uint64_t samples = 0;
};

/// Monte Carlo total progeny. Samples are split into 64 fixed chunks, each
/// seeded from (seed, chunk), so the histogram depends only on the seed.
/// LP_THREADS bounds the worker count.
Histogram gw_simulate(const LagrangianSpec& ls, std::uint64_t samples, std::uint64_t seed,
                      std::uint64_t cap);

struct RescaleResult {
    double residual = 0.0;
    bool exact = false;
};

/// Max |coeff_[n](g_t) - coeff_[n]((1/t) g((t/psi(t)) z))| for n <= degree,
/// with g_t obtained by inversion on psi_t.
RescaleResult rescale_check(const SeriesSpec& spec, double t, std::size_t degree);

/// n^{3/2} P(Z_{tau, s_n} = n) / m_f(s_n) for each pair; offspring is tilted at tau.
std::vector<double> limit_case_ratio(const SeriesSpec& spec, const SeriesSpec& f,
                                     const std::vector<double>& s_seq,
                                     const std::vector<std::uint64_t>& n_seq);

}  // namespace lpow
