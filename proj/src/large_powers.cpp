#include "lpow/large_powers.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "lpow/errors.hpp"
#include "lpow/khinchin.hpp"

namespace lpow {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double dbl(std::uint64_t x) { return static_cast<double>(x); }

Integer to_integer(std::uint64_t x) { return Integer(std::to_string(x), 10); }

Rational rational_pow(const Rational& q, std::uint64_t e) {
    Integer num, den;
    mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), e);
    Rational r(num, den);
    r.canonicalize();
    return r;
}

void require_positive_k(std::uint64_t k, std::uint64_t n, const char* who) {
    if (n < 1) throw PreconditionError(std::string(who) + ": n must be >= 1");
    if (k < 1) throw PreconditionError(std::string(who) + ": k must be >= 1");
}

void require_b1(const SeriesSpec& spec) {
    if (std::isinf(log_coefficients(spec, 1)[1]))
        throw PreconditionError("small-k regime requires psi'(0)!=0");
}

// ln Q - ln sqrt(2 pi) + n ln psi(tau) - k ln tau - ln sqrt(n) - ln sigma(tau) [+ correction]
LogEstimate master(Regime regime, const KhinchinEval& ev, unsigned Q, std::uint64_t k,
                   std::uint64_t n, std::optional<double> correction) {
    std::vector<Factor> f{
        {"gaugeFactor", std::log(static_cast<double>(Q))},
        {"logPrefactor", -kHalfLog2Pi},
        {"nLogPsiTau", dbl(n) * ev.log_f},
        {"minusKLogTau", -dbl(k) * std::log(ev.t)},
        {"minusHalfLogN", -0.5 * std::log(dbl(n))},
        {"minusLogSigma", -ev.log_sigma()},
    };
    if (correction) f.push_back({"correction", *correction});
    return LogEstimate::from_factors(regime, ev.t, std::move(f));
}

void require_below_mean_limit(const SeriesSpec& spec, double ratio, const char* who) {
    const MeanLimit M = mean_limit(spec);
    if (M.finite && ratio >= M.value)
        throw RangeError(std::string(who) + ": ratio " + std::to_string(ratio) +
                         " >= M_psi = " + std::to_string(M.value) + "; use estimate_boundary");
}

}  // namespace

LogEstimate estimate_comparable(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n) {
    require_positive_k(k, n, "estimate_comparable");
    const unsigned Q = certified_gauge(spec);
    const double ratio = dbl(k) / dbl(n);
    require_below_mean_limit(spec, ratio, "estimate_comparable");
    if (k % Q != 0) return LogEstimate::zero(Regime::Comparable);
    const KhinchinEval ev = evaluate(spec, solve_mean(spec, ratio));
    return master(Regime::Comparable, ev, Q, k, n, std::nullopt);
}

LogEstimate estimate_limit_ratio(const SeriesSpec& spec, std::uint64_t n, double L, double omega,
                                 std::uint64_t k) {
    if (n < 1) throw PreconditionError("estimate_limit_ratio: n must be >= 1");
    if (!(L > 0)) throw PreconditionError("estimate_limit_ratio: L must be positive");
    const unsigned Q = certified_gauge(spec);
    require_below_mean_limit(spec, L, "estimate_limit_ratio");
    if (k % Q != 0) return LogEstimate::zero(Regime::LimitRatio);
    const KhinchinEval ev = evaluate(spec, solve_mean(spec, L));
    return master(Regime::LimitRatio, ev, Q, k, n, -omega * omega / (2.0 * ev.variance));
}

LogEstimate estimate_boundary(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n) {
    if (n < 1) throw PreconditionError("estimate_boundary: n must be >= 1");
    const unsigned Q = certified_gauge(spec);
    const KhinchinEval ev = boundary_eval(spec);
    if (k % Q != 0) return LogEstimate::zero(Regime::Boundary);
    const double omega = (dbl(k) - dbl(n) * ev.mean) / std::sqrt(dbl(n));
    return master(Regime::Boundary, ev, Q, k, n, -omega * omega / (2.0 * ev.variance));
}

LogEstimate estimate_small_k(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n) {
    require_positive_k(k, n, "estimate_small_k");
    require_b1(spec);
    const double ratio = dbl(k) / dbl(n);
    require_below_mean_limit(spec, ratio, "estimate_small_k");
    const KhinchinEval ev = evaluate(spec, solve_mean(spec, ratio));
    return LogEstimate::from_factors(Regime::SmallK, ev.t,
                                     {
                                         {"logPrefactor", -kHalfLog2Pi},
                                         {"nLogPsiTau", dbl(n) * ev.log_f},
                                         {"minusKLogTau", -dbl(k) * std::log(ev.t)},
                                         {"minusHalfLogK", -0.5 * std::log(dbl(k))},
                                     });
}

LogEstimate estimate_small_k_unsimplified(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n) {
    require_positive_k(k, n, "estimate_small_k_unsimplified");
    require_b1(spec);
    const double ratio = dbl(k) / dbl(n);
    require_below_mean_limit(spec, ratio, "estimate_small_k_unsimplified");
    const KhinchinEval ev = evaluate(spec, solve_mean(spec, ratio));
    return LogEstimate::from_factors(Regime::SmallKUnsimplified, ev.t,
                                     {
                                         {"logPrefactor", -kHalfLog2Pi},
                                         {"nLogPsiTau", dbl(n) * ev.log_f},
                                         {"minusKLogTau", -dbl(k) * std::log(ev.t)},
                                         {"minusHalfLogN", -0.5 * std::log(dbl(n))},
                                         {"minusLogSigma", -ev.log_sigma()},
                                     });
}

BExpansion expansion_B(const SeriesSpec& spec, std::size_t j_max) {
    if (j_max < 1) throw PreconditionError("expansion_B: jMax must be >= 1");
    const ExactSeries psi = expand(spec, j_max + 1);
    if (psi[1] == 0) throw PreconditionError("expansion_B requires psi'(0)!=0");
    const ExactSeries P = series_div(psi, series_derivative(psi), j_max);

    BExpansion out;
    out.B.reserve(j_max);
    out.C.reserve(j_max);
    ExactSeries power{Rational(1)};  // P^{j-1}
    for (std::size_t j = 1; j <= j_max; ++j) {
        const Rational jj(static_cast<unsigned long>(j));
        out.B.push_back(power[j - 1] / jj);
        power = series_mul(power, P, j_max);  // P^j
        out.C.push_back(power[j] / jj);
    }
    return out;
}

LogEstimate estimate_small_k_closed(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n,
                                    unsigned J) {
    if (J < 1) throw PreconditionError("estimate_small_k_closed: J must be >= 1");
    require_positive_k(k, n, "estimate_small_k_closed");
    const std::vector<double> lb = log_coefficients(spec, 1);
    if (std::isinf(lb[1])) throw PreconditionError("small-k regime requires psi'(0)!=0");

    const double kd = dbl(k), nd = dbl(n);
    double correction = 0.0;
    if (J >= 2) {
        const BExpansion be = expansion_B(spec, J);
        for (unsigned j = 2; j <= J; ++j) {
            const double scale = std::exp(j * std::log(kd) - (j - 1) * std::log(nd)) / (j - 1);
            correction -= be.b(j).get_d() * scale;
        }
    }
    return LogEstimate::from_factors(Regime::SmallKClosed, std::numeric_limits<double>::quiet_NaN(),
                                     {
                                         {"logPrefactor", -kHalfLog2Pi},
                                         {"nMinusKLogB0", (nd - kd) * lb[0]},
                                         {"kLogB1", kd * lb[1]},
                                         {"kLogN", kd * std::log(nd)},
                                         {"kMinusKLogK", kd - kd * std::log(kd)},
                                         {"minusHalfLogK", -0.5 * std::log(kd)},
                                         {"correction", correction},
                                     });
}

Rational FixedKPolynomial::exact(std::uint64_t n) const {
    Rational sum = 0;
    for (std::uint64_t l = 0; l < C.size() && l <= n; ++l) {
        if (C[l] == 0) continue;
        Integer binom;
        mpz_bin_ui(binom.get_mpz_t(), to_integer(n).get_mpz_t(), static_cast<unsigned long>(l));
        sum += Rational(binom) * rational_pow(b0, n - l) * C[l];
    }
    return sum;
}

double FixedKPolynomial::log_leading(std::uint64_t n) const {
    if (C.empty() || C[gamma] == 0) return -std::numeric_limits<double>::infinity();
    const double g = static_cast<double>(gamma);
    return log_of(C[gamma]) + (dbl(n) - g) * log_of(b0) + g * std::log(dbl(n)) - std::lgamma(g + 1.0);
}

std::string FixedKPolynomial::leading_description() const {
    if (C.empty() || C[gamma] == 0) return "coefficient vanishes for every n";
    return "C_gamma b0^(n-gamma) n^gamma / gamma!, gamma = " + std::to_string(gamma) +
           ", C_gamma = " + to_string(C[gamma]);
}

FixedKPolynomial fixed_k_polynomial(const SeriesSpec& spec, std::uint64_t k) {
    const ExactSeries psi = expand(spec, k);
    FixedKPolynomial out;
    out.k = k;
    out.b0 = psi[0];
    out.C.assign(k + 1, Rational(0));

    std::vector<Rational> fact(k + 1);
    fact[0] = 1;
    for (std::size_t i = 1; i <= k; ++i) fact[i] = fact[i - 1] * Rational(static_cast<unsigned long>(i));

    // Walk the parts i = k, k-1, ..., 1 choosing multiplicities j_i;
    // weight accumulates prod b_i^{j_i} / j_i!.
    std::function<void(std::uint64_t, std::uint64_t, std::uint64_t, const Rational&)> walk =
        [&](std::uint64_t part, std::uint64_t remaining, std::uint64_t l, const Rational& weight) {
            if (remaining == 0) {
                out.C[l] += fact[l] * weight;
                return;
            }
            if (part == 0) return;
            const Rational bi = psi[part];
            Rational w = weight;
            for (std::uint64_t j = 0; j * part <= remaining; ++j) {
                if (j > 0) {
                    if (bi == 0) break;
                    w = w * bi / Rational(static_cast<unsigned long>(j));
                }
                walk(part - 1, remaining - j * part, l + j, w);
            }
        };
    walk(k, k, 0, Rational(1));

    for (std::size_t l = 0; l <= k; ++l)
        if (out.C[l] != 0) out.gamma = l;
    return out;
}

LogEstimate estimate_fixed_k(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n) {
    if (n < 1) throw PreconditionError("estimate_fixed_k: n must be >= 1");
    const FixedKPolynomial p = fixed_k_polynomial(spec, k);
    if (p.C[p.gamma] == 0) return LogEstimate::zero(Regime::FixedK);
    const double g = static_cast<double>(p.gamma);
    return LogEstimate::from_factors(Regime::FixedK, std::numeric_limits<double>::quiet_NaN(),
                                     {
                                         {"logCGamma", log_of(p.C[p.gamma])},
                                         {"nMinusGammaLogB0", (dbl(n) - g) * log_of(p.b0)},
                                         {"gammaLogN", g * std::log(dbl(n))},
                                         {"minusLogGammaFactorial", -std::lgamma(g + 1.0)},
                                     });
}

bool is_uniformly_gaussian(const SeriesSpec& spec) {
    if (spec.is<kind::Exp>()) return true;
    if (spec.is<kind::ExpPolynomial>()) return gauge(spec).value == 1;
    return false;
}

LogEstimate estimate_large_k(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n) {
    if (!is_uniformly_gaussian(spec)) throw PreconditionError("regime requires uniform Gaussianity");
    require_positive_k(k, n, "estimate_large_k");
    const KhinchinEval ev = evaluate(spec, solve_mean(spec, dbl(k) / dbl(n)));
    return master(Regime::LargeK, ev, 1, k, n, std::nullopt);
}

LogEstimate estimate_with_prefactor(const SeriesSpec& h, const SeriesSpec& spec, std::uint64_t k,
                                    std::uint64_t n, PrefactorRegime regime) {
    switch (regime) {
        case PrefactorRegime::Comparable: {
            if (certified_gauge(spec) != 1)
                throw PreconditionError("prefactor comparable regime requires gauge 1");
            LogEstimate base = estimate_comparable(spec, k, n);
            const double tau = base.tau;
            if (!(tau < h.max_eval_t()) && !(h.closed_domain() && tau <= h.max_eval_t()))
                throw RangeError("prefactor: tau_n = " + std::to_string(tau) +
                                 " lies outside the domain of h");
            base.factors.push_back({"logH", evaluate(h, tau).log_f});
            return LogEstimate::from_factors(Regime::Comparable, tau, std::move(base.factors));
        }
        case PrefactorRegime::SmallK: {
            if (certified_gauge(spec) != 1)
                throw PreconditionError("prefactor small-k regime requires gauge 1");
            LogEstimate base = estimate_small_k(spec, k, n);
            base.factors.push_back({"logH", log_coefficients(h, 0)[0]});
            return LogEstimate::from_factors(Regime::SmallK, base.tau, std::move(base.factors));
        }
        case PrefactorRegime::FixedK: {
            if (n < 1) throw PreconditionError("estimate_with_prefactor: n must be >= 1");
            const unsigned Q = certified_gauge(spec);
            const std::vector<double> lc = log_coefficients(h, k);
            const std::vector<double> lb = log_coefficients(spec, Q);
            for (std::uint64_t j0 = k % Q; j0 <= k; j0 += Q) {
                if (std::isinf(lc[j0])) continue;
                const double m = dbl((k - j0) / Q);
                return LogEstimate::from_factors(
                    Regime::FixedK, std::numeric_limits<double>::quiet_NaN(),
                    {
                        {"logCJ0", lc[j0]},
                        {"minusLogMFactorial", -std::lgamma(m + 1.0)},
                        {"nMinusMLogB0", (dbl(n) - m) * lb[0]},
                        {"mLogBQ", m * lb[Q]},
                        {"mLogN", m * std::log(dbl(n))},
                    });
            }
            return LogEstimate::zero(Regime::FixedK);
        }
    }
    throw PreconditionError("estimate_with_prefactor: unknown regime");
}

RegimeSuggestion suggest_regime(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n) {
    RegimeSuggestion out;
    const double ratio = n > 0 ? dbl(k) / dbl(n) : INFINITY;
    const MeanLimit M = mean_limit(spec);
    const bool below_M = !M.finite || ratio < M.value;

    std::optional<unsigned> Q;
    std::string gauge_issue;
    try {
        Q = certified_gauge(spec);
    } catch (const PreconditionError& e) {
        gauge_issue = e.what();
    }
    const bool divisible = Q && k % *Q == 0;
    bool b1 = false;
    try {
        b1 = !std::isinf(log_coefficients(spec, 1)[1]);
    } catch (const PreconditionError&) {
    }
    const bool boundary = has_boundary_extension(spec);

    auto gauge_unmet = [&](std::vector<std::string>& u) {
        if (!Q)
            u.push_back(gauge_issue);
        else if (!divisible)
            u.push_back("k not divisible by gauge Q = " + std::to_string(*Q));
    };

    RegimeSuggestion::Entry comparable{Regime::Comparable, {}};
    if (k < 1) comparable.unmet.push_back("k >= 1");
    if (!below_M) comparable.unmet.push_back("k/n < M_psi");
    gauge_unmet(comparable.unmet);

    RegimeSuggestion::Entry small{Regime::SmallK, {}};
    if (!b1) small.unmet.push_back("psi'(0) != 0");
    if (k < 1) small.unmet.push_back("k >= 1");
    if (!below_M) small.unmet.push_back("k/n < M_psi");

    RegimeSuggestion::Entry large{Regime::LargeK, {}};
    if (!is_uniformly_gaussian(spec)) large.unmet.push_back("psi uniformly Gaussian");

    RegimeSuggestion::Entry fixed{Regime::FixedK, {}};
    if (n < 1) fixed.unmet.push_back("n >= 1");

    RegimeSuggestion::Entry bound{Regime::Boundary, {}};
    if (!boundary) bound.unmet.push_back("R < inf, M_psi < inf and sigma^2(R) < inf");
    gauge_unmet(bound.unmet);

    out.regimes = {comparable, small, large, fixed, bound};

    auto ok = [&](const RegimeSuggestion::Entry& e) { return e.unmet.empty(); };
    if (k <= 10 && ok(fixed))
        out.suggested = Regime::FixedK;
    else if (ok(bound) && M.finite && std::abs(dbl(k) - dbl(n) * M.value) <= std::sqrt(dbl(n)))
        out.suggested = Regime::Boundary;
    else if (ratio <= 0.01 && ok(small))
        out.suggested = Regime::SmallK;
    else if (ratio >= 100 && ok(large))
        out.suggested = Regime::LargeK;
    else if (ok(comparable))
        out.suggested = Regime::Comparable;
    else if (ok(small))
        out.suggested = Regime::SmallK;
    else
        out.suggested = Regime::FixedK;
    return out;
}

}  // namespace lpow
