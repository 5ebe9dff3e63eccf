#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lpow {

/// Which asymptotic formula produced an estimate.
enum class Regime {
    Comparable,          // k ~ n, tau_n from m(tau_n) = k/n
    LimitRatio,          // k/n -> L with sqrt(n) offset omega, fixed tau
    Boundary,            // k/n -> M_psi, tau = R
    SmallK,              // k = o(n), sqrt(k) prefactor
    SmallKUnsimplified,  // k = o(n), sqrt(n) sigma(tau_n) prefactor
    SmallKClosed,        // k = o(n), B_j expansion, no tau
    FixedK,              // k fixed, multinomial leading term
    LargeK,              // n = o(k), uniformly Gaussian psi
    Omm,                 // Otter-Meir-Moon, m(tau) = 1
    OmmBoundary,         // Otter-Meir-Moon with tau = R, M_psi = 1
    OmmPower,            // coefficients of g^q
    AffineExact,         // psi affine: A_n = a b^{n-1} exactly
    LagrangianPmf,       // P(Z_{s,t} = n) asymptotics
};

std::string_view regime_name(Regime r);
std::optional<Regime> regime_from_name(std::string_view name);

struct Factor {
    std::string label;
    double value = 0.0;

    bool operator==(const Factor&) const = default;
};

/// An asymptotic estimate carried as ln of its (positive) value together
/// with the additive pieces it was assembled from. An estimate without a
/// log value is zero-flagged: the coefficient vanishes identically (gauge
/// divisibility fails).
struct LogEstimate {
    Regime regime = Regime::Comparable;
    double tau = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> log_value;
    std::vector<Factor> factors;

    bool zero_flagged() const { return !log_value.has_value(); }

    /// Value of the factor with this label, or 0 when absent.
    double factor(std::string_view label) const;

    /// Sums the factors in order; log_value is exactly that sum.
    static LogEstimate from_factors(Regime regime, double tau, std::vector<Factor> factors);
    static LogEstimate zero(Regime regime);

    bool operator==(const LogEstimate&) const = default;
};

/// The M_psi < 1 case of Otter-Meir-Moon yields only
///   A_n R^{n-1} / psi(R)^n n^{3/2} -> 0,
/// so the reported value is an upper envelope, never an equivalent.
struct UpperEnvelope {
    double log_value = 0.0;
    double radius = 0.0;
    std::vector<Factor> factors;
    std::string note = "little-o, not equivalent";
};

}  // namespace lpow
