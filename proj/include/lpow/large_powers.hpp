#pragma once

// Asymptotic estimators for coeff_[k](psi(z)^n) and coeff_[k](h(z) psi(z)^n).
//
// Every estimator is explicit about its regime; nothing is dispatched
// automatically. All values are natural logs, since psi(tau)^n / tau^k
// overflows doubles long before n = 10^3.

#include <cstdint>
#include <string>
#include <vector>

#include "lpow/estimate.hpp"
#include "lpow/spec.hpp"

namespace lpow {

/// k ~ n: ln Q - ln sqrt(2 pi) + n ln psi(tau_n) - k ln tau_n - ln sqrt(n) - ln sigma(tau_n),
/// with m(tau_n) = k/n. Zero-flagged unless Q | k. RangeError when k/n >= M_psi.
LogEstimate estimate_comparable(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n);

/// k/n -> L < M_psi with (nL - k)/sqrt(n) -> -omega. tau is fixed by m(tau) = L and
/// the Gaussian damping exp(-omega^2 / (2 sigma^2(tau))) enters as `correction`.
LogEstimate estimate_limit_ratio(const SeriesSpec& spec, std::uint64_t n, double L, double omega,
                                 std::uint64_t k);

/// k/n -> M_psi with R < inf and finite sigma(R): the same formula at tau = R,
/// with omega = (k - n M_psi)/sqrt(n).
LogEstimate estimate_boundary(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n);

/// k = o(n), psi'(0) != 0, using sigma(tau_n) sqrt(n) ~ sqrt(k).
LogEstimate estimate_small_k(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n);

/// k = o(n) keeping -ln sqrt(n) - ln sigma(tau_n) instead of -ln sqrt(k).
LogEstimate estimate_small_k_unsimplified(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n);

/// Coefficients of
///   ln psi(m^{-1}(z))   = ln b_0 + sum_j B_j z^j,
///   ln(m^{-1}(z) / z)   = ln(b_0/b_1) + sum_j C_j z^j,
/// from B_j = (1/j) coeff_[j-1]((psi/psi')^{j-1}) and C_j = (1/j) coeff_[j]((psi/psi')^j).
struct BExpansion {
    std::vector<Rational> B;  // B[0] = B_1, ..., B[jMax-1] = B_jMax
    std::vector<Rational> C;  // C[0] = C_1, ...

    const Rational& b(std::size_t j) const { return B.at(j - 1); }
    const Rational& c(std::size_t j) const { return C.at(j - 1); }
};

BExpansion expansion_B(const SeriesSpec& spec, std::size_t j_max);

/// k = o(n) without tau:
///   -ln sqrt(2 pi) + (n-k) ln b_0 + k ln b_1 + k ln n + k - k ln k - ln sqrt(k)
///   - sum_{j=2}^{J} B_j k^j / ((j-1) n^{j-1}).
/// J is supplied by the caller (it depends on how k grows with n).
LogEstimate estimate_small_k_closed(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n,
                                    unsigned J);

/// coeff_[k](psi^n) = sum_l binom(n, l) b_0^{n-l} C_l, a polynomial in n
/// whose degree gamma is the largest l with C_l != 0.
struct FixedKPolynomial {
    std::uint64_t k = 0;
    Rational b0;
    std::vector<Rational> C;  // C[l], l = 0..k
    std::size_t gamma = 0;

    /// The identity above evaluated exactly.
    Rational exact(std::uint64_t n) const;

    /// ln(b_0^{n-gamma} C_gamma n^gamma / gamma!).
    double log_leading(std::uint64_t n) const;

    std::string leading_description() const;
};

FixedKPolynomial fixed_k_polynomial(const SeriesSpec& spec, std::uint64_t k);

/// The fixed-k leading term as a LogEstimate (zero-flagged when every C_l vanishes).
LogEstimate estimate_fixed_k(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n);

/// Exp and ExpPolynomial with gcd-1 support.
bool is_uniformly_gaussian(const SeriesSpec& spec);

/// n = o(k) for uniformly Gaussian psi. PreconditionError otherwise.
LogEstimate estimate_large_k(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n);

enum class PrefactorRegime { Comparable, SmallK, FixedK };

/// coeff_[k](h(z) psi(z)^n). Comparable: adds ln h(tau_n) (tau_n must lie
/// inside h's domain). SmallK: adds ln h(0). FixedK: the leading term of
/// the smallest admissible j_0 with c_{j_0} != 0 and j_0 = k mod Q.
LogEstimate estimate_with_prefactor(const SeriesSpec& h, const SeriesSpec& spec, std::uint64_t k,
                                    std::uint64_t n, PrefactorRegime regime);

struct RegimeSuggestion {
    Regime suggested = Regime::Comparable;
    struct Entry {
        Regime regime;
        std::vector<std::string> unmet;
    };
    std::vector<Entry> regimes;  // every regime with its unmet preconditions
};

/// Heuristic pick among Comparable, SmallK, LargeK, FixedK, Boundary plus the
/// unmet preconditions of each.
RegimeSuggestion suggest_regime(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n);

}  // namespace lpow
