#include "lpow/lagrange.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

#include "lpow/errors.hpp"
#include "lpow/khinchin.hpp"

namespace lpow {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
constexpr double kMeanOneTol = 1e-9;

double dbl(std::uint64_t x) { return static_cast<double>(x); }

// (a, b) when psi(z) = a + b z.
std::optional<std::pair<Rational, Rational>> affine_pair(const SeriesSpec& spec) {
    if (const auto* a = spec.get_if<kind::Affine>()) return std::pair{a->a, a->b};
    const std::vector<Rational>* c = nullptr;
    if (const auto* p = spec.get_if<kind::Polynomial>()) c = &p->coeffs;
    if (const auto* t = spec.get_if<kind::Truncated>(); t && t->complete && !std::isfinite(t->radius))
        c = &t->coeffs;
    if (c == nullptr || c->size() < 2 || (*c)[1] == 0) return std::nullopt;
    for (std::size_t j = 2; j < c->size(); ++j)
        if ((*c)[j] != 0) return std::nullopt;
    return std::pair{(*c)[0], (*c)[1]};
}

// ln psi(R) for a series whose mean limit is finite, even when the
// boundary variance diverges.
double log_psi_at_radius(const SeriesSpec& spec) {
    try {
        return boundary_eval(spec).log_f;
    } catch (const RangeError&) {
        const auto* tr = spec.get_if<kind::Truncated>();
        if (tr == nullptr) throw;
        const double lr = std::log(tr->radius);
        double top = -INFINITY;
        std::vector<double> w(tr->coeffs.size(), -INFINITY);
        for (std::size_t j = 0; j < w.size(); ++j) {
            w[j] = log_of(tr->coeffs[j]) + static_cast<double>(j) * lr;
            top = std::max(top, w[j]);
        }
        long double z = 0;
        for (double x : w) z += std::exp(static_cast<long double>(x - top));
        return top + static_cast<double>(std::log(z));
    }
}

enum class MeanCase { Above, One, Below };

MeanCase classify(const SeriesSpec& spec) {
    const MeanLimit M = mean_limit(spec);
    if (!M.finite || M.value > 1.0 + kMeanOneTol) return MeanCase::Above;
    if (M.value >= 1.0 - kMeanOneTol) return MeanCase::One;
    return MeanCase::Below;
}

// Evaluation point for the M_psi >= 1 cases.
KhinchinEval omm_point(const SeriesSpec& spec, MeanCase c) {
    if (c == MeanCase::Above) return evaluate(spec, solve_mean(spec, 1.0));
    if (!std::isfinite(spec.radius()))
        throw PreconditionError("M_psi = 1 with infinite radius requires an affine psi");
    return boundary_eval(spec);
}

}  // namespace

Rational lagrange_coeff(const SeriesSpec& spec, std::uint64_t n) {
    if (n < 1) throw PreconditionError("lagrange_coeff: n must be >= 1");
    return coeff_of_power(spec, n - 1, n) / Rational(Integer(std::to_string(n), 10));
}

std::vector<Rational> lagrange_coeffs(const SeriesSpec& spec, std::size_t D) {
    std::vector<Rational> a(D + 1);
    for (std::size_t n = 1; n <= D; ++n) a[n] = lagrange_coeff(spec, n);
    return a;
}

Rational lagrange_power_coeff(const SeriesSpec& spec, std::uint64_t n, std::uint64_t q) {
    if (n < 1 || q < 1) throw PreconditionError("lagrange_power_coeff: n and q must be >= 1");
    if (n < q) return 0;
    Rational r = coeff_of_power(spec, n - q, n) * Rational(Integer(std::to_string(q), 10)) /
                 Rational(Integer(std::to_string(n), 10));
    r.canonicalize();
    return r;
}

Rational lagrange_H_coeff(const SeriesSpec& H, const SeriesSpec& spec, std::uint64_t n) {
    return lagrange_H_coeff(expand(H, n), spec, n);
}

Rational lagrange_H_coeff(const ExactSeries& H, const SeriesSpec& spec, std::uint64_t n) {
    for (const auto& c : H.coeffs())
        if (c < 0) throw PreconditionError("lagrange_H_coeff: H must have nonnegative coefficients");
    if (n == 0) return H[0];
    const ExactSeries dH = series_derivative(H.truncated(n));
    const ExactSeries pw = power_coefficients(spec, n, n - 1);
    Rational sum = 0;
    for (std::uint64_t i = 0; i <= n - 1; ++i) sum += dH[i] * pw[n - 1 - i];
    return sum / Rational(Integer(std::to_string(n), 10));
}

OmmResult omm_asymptotic(const SeriesSpec& spec, std::uint64_t n) {
    if (n < 1) throw PreconditionError("omm_asymptotic: n must be >= 1");
    if (auto ab = affine_pair(spec)) {
        return LogEstimate::from_factors(Regime::AffineExact, std::numeric_limits<double>::quiet_NaN(),
                                         {
                                             {"logA", log_of(ab->first)},
                                             {"nMinus1LogB", (dbl(n) - 1.0) * log_of(ab->second)},
                                         });
    }
    const unsigned Q = certified_gauge(spec);
    const MeanCase mc = classify(spec);
    if ((n - 1) % Q != 0) return LogEstimate::zero(mc == MeanCase::One ? Regime::OmmBoundary : Regime::Omm);

    if (mc == MeanCase::Below) {
        const double R = spec.radius();
        const double lpsi = log_psi_at_radius(spec);
        UpperEnvelope env;
        env.radius = R;
        env.factors = {
            {"nMinus1LogPsiROverR", (dbl(n) - 1.0) * (lpsi - std::log(R))},
            {"logPsiR", lpsi},
            {"minusThreeHalvesLogN", -1.5 * std::log(dbl(n))},
        };
        for (const auto& f : env.factors) env.log_value += f.value;
        return env;
    }

    const KhinchinEval ev = omm_point(spec, mc);
    const double lt = std::log(ev.t);
    return LogEstimate::from_factors(mc == MeanCase::One ? Regime::OmmBoundary : Regime::Omm, ev.t,
                                     {
                                         {"gaugeFactor", std::log(static_cast<double>(Q))},
                                         {"logPrefactor", -kHalfLog2Pi},
                                         {"logTau", lt},
                                         {"minusLogSigma", -ev.log_sigma()},
                                         {"minusThreeHalvesLogN", -1.5 * std::log(dbl(n))},
                                         {"nLogPsiOverTau", dbl(n) * (ev.log_f - lt)},
                                     });
}

LogEstimate omm_power_asymptotic(const SeriesSpec& spec, std::uint64_t n, std::uint64_t q,
                                 double alpha, double beta) {
    if (n < 1 || q < 1) throw PreconditionError("omm_power_asymptotic: n and q must be >= 1");
    if (!(alpha >= 0 && alpha < 1)) throw RangeError("omm_power_asymptotic: alpha must lie in [0, 1)");
    if (certified_gauge(spec) != 1) throw PreconditionError("omm_power_asymptotic requires gauge 1");
    const MeanLimit M = mean_limit(spec);
    const double target = 1.0 - alpha;
    if (M.finite && !(M.value > target))
        throw RangeError("omm_power_asymptotic: requires M_psi > 1 - alpha");

    const KhinchinEval ev = evaluate(spec, solve_mean(spec, target));
    const double lt = std::log(ev.t);
    std::vector<Factor> f{
        {"logQ", std::log(dbl(q))},
        {"logPrefactor", -kHalfLog2Pi},
        {"qLogTau", dbl(q) * lt},
        {"minusLogSigma", -ev.log_sigma()},
        {"minusThreeHalvesLogN", -1.5 * std::log(dbl(n))},
        {"nLogPsiOverTau", dbl(n) * (ev.log_f - lt)},
    };
    if (beta != 0) f.push_back({"correction", -beta * beta / (2.0 * ev.variance)});
    return LogEstimate::from_factors(Regime::OmmPower, ev.t, std::move(f));
}

SolutionRadius solution_radius(const SeriesSpec& spec) {
    if (auto ab = affine_pair(spec)) return {1.0 / ab->second.get_d(), false};
    const MeanCase mc = classify(spec);
    if (mc == MeanCase::Below) {
        const double R = spec.radius();
        return {std::exp(std::log(R) - log_psi_at_radius(spec)), true};
    }
    const KhinchinEval ev = omm_point(spec, mc);
    return {std::exp(std::log(ev.t) - ev.log_f), false};
}

}  // namespace lpow
