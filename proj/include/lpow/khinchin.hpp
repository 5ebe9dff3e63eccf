#pragma once

// Khinchin family functionals: the variable X_t with P(X_t = n) = b_n t^n / f(t).

#include <cmath>

#include "lpow/spec.hpp"

namespace lpow {

/// f and the first two moments of X_t at radius t. `log_f` is always
/// finite; `f_value`, `f_prime`, `f_double_prime` may overflow to +inf for
/// entire functions at large t.
struct KhinchinEval {
    double t = 0.0;
    double log_f = 0.0;
    double f_value = 0.0;
    double f_prime = 0.0;
    double f_double_prime = 0.0;
    double mean = 0.0;
    double variance = 0.0;

    double sigma() const { return std::sqrt(variance); }
    double log_sigma() const { return 0.5 * std::log(variance); }
};

/// Evaluates at 0 <= t < R (t <= 0.95 R for incomplete Truncated specs,
/// t <= R for complete ones). Throws RangeError outside the domain.
KhinchinEval evaluate(const SeriesSpec& spec, double t);

struct Gauge {
    unsigned value = 1;
    /// True when computed from a prefix of an unknown series: coefficients
    /// beyond the list could lower the gcd.
    bool observed = false;
};

/// gcd of the indices of the nonzero coefficients.
Gauge gauge(const SeriesSpec& spec);

/// Gauge usable by the asymptotic estimators: exact for builtins and
/// complete lists, the asserted value for incomplete Truncated specs.
/// Throws PreconditionError when only an observed gauge is available.
unsigned certified_gauge(const SeriesSpec& spec);

struct MeanLimit {
    bool finite = false;
    double value = INFINITY;  // +inf unless finite
};

/// M_f = lim_{t -> R} m(t).
MeanLimit mean_limit(const SeriesSpec& spec);

/// True when R < inf, M_f < inf and sigma^2(R) < inf, i.e. the family can
/// be extended to t = R with finite variance.
bool has_boundary_extension(const SeriesSpec& spec);

/// Unique t with m(t) = x, for 0 < x < M_f; returns R when x = M_f and the
/// boundary extension exists. Throws RangeError("mean out of range").
double solve_mean(const SeriesSpec& spec, double x);

/// Evaluation record at t = R. Throws RangeError when R = inf or M_f = inf,
/// and RangeError("infinite boundary variance") when sum n^2 b_n R^n
/// diverges.
KhinchinEval boundary_eval(const SeriesSpec& spec);

}  // namespace lpow
