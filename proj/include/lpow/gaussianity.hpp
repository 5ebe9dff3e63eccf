#pragma once

// Numeric diagnostics for uniform Gaussianity and the Hayman arc cuts of e^g.

#include <complex>
#include <cstdint>
#include <vector>

#include "lpow/spec.hpp"

namespace lpow {

/// E(e^{i theta X_t}) = f(t e^{i theta}) / f(t), 0 < t < R.
std::complex<double> char_fn(const SeriesSpec& spec, double t, double theta);

/// I_n(t) = int_{|theta| <= pi sigma(t) sqrt(n)} |E(e^{i theta Xbreve_t / sqrt(n)})^n - e^{-theta^2/2}| dtheta
/// with Xbreve_t = (X_t - m(t))/sigma(t). Composite Simpson, doubled until
/// successive values agree to 1e-6 relative. Exp and ExpPolynomial only.
double gaussian_integral_I(const SeriesSpec& spec, double t, std::uint64_t n);

/// (1/6)(b_1 t + 8 b_2 t^2 + (9/2) t^3 g'''(t)); g[j] is the coefficient of z^j.
double omega_g(const std::vector<Rational>& g, double t);

struct ArcReport {
    std::uint64_t n = 0;
    double t = 0.0;
    double cut = 0.0;
    double major_sup = 0.0;
    double minor_sup = 0.0;
    double integral_i = 0.0;
    unsigned quadrature_points = 0;

    bool operator==(const ArcReport&) const = default;
};

inline constexpr unsigned kArcGridPoints = 4096;

/// Cut h = t^{-5N/12} n^{-5/12} for f = e^g with deg g = N;
///   majorSup = sup_{|theta| <= h sigma sqrt(n)} |E(e^{i theta Xbreve_t/sqrt(n)})^n e^{theta^2/2} - 1|,
///   minorSup = sqrt(n) sigma(t) sup_{h <= |theta| <= pi} |E(e^{i theta X_t})|^n,
/// both as maxima over a 4096-point grid. Requires gcd(supp g) = 1 and t >= 1.
ArcReport hayman_cut_check(const std::vector<Rational>& g, std::uint64_t n, double t);

}  // namespace lpow
