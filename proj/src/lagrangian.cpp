#include "lpow/lagrangian.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "lpow/errors.hpp"
#include "lpow/khinchin.hpp"
#include "lpow/lagrange.hpp"

namespace lpow {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
constexpr double kCriticalTol = 1e-12;
constexpr double kMeanOneTol = 1e-9;
constexpr unsigned kChunks = 64;

double dbl(std::uint64_t x) { return static_cast<double>(x); }

// Coefficients of a^n through z^cap by the J.C.P. Miller recurrence.
// For cap < n every term is nonnegative, so no cancellation occurs.
std::vector<long double> power_ld(const std::vector<long double>& a, std::uint64_t n, std::size_t cap) {
    std::size_t d = a.size() - 1;
    while (d > 0 && a[d] == 0) --d;
    std::vector<long double> c(cap + 1, 0.0L);
    c[0] = std::pow(a[0], static_cast<long double>(n));
    const long double n1 = static_cast<long double>(n) + 1.0L;
    for (std::size_t k = 1; k <= cap; ++k) {
        long double s = 0;
        const std::size_t top = std::min(k, d);
        for (std::size_t j = 1; j <= top; ++j)
            s += (n1 * j - static_cast<long double>(k)) * a[j] * c[k - j];
        c[k] = s / (static_cast<long double>(k) * a[0]);
    }
    return c;
}

void require_subcritical(const TiltedPgf& tp) {
    if (tp.mean > 1.0 + kCriticalTol)
        throw RangeError("supercritical tilt: m_psi(t) = " + std::to_string(tp.mean) + " > 1");
}

// Distribution of the initial generation: P(f_s = j), j = 0..cap.
std::vector<long double> initial_masses(const LagrangianSpec& ls, std::size_t cap) {
    if (const auto* m = std::get_if<Monomial>(&ls.initial)) {
        if (m->j < 1) throw PreconditionError("monomial initial requires j >= 1");
        std::vector<long double> q(cap + 1, 0.0L);
        if (m->j <= cap) q[m->j] = 1.0L;
        return q;
    }
    if (!(ls.s > 0)) throw RangeError("initial tilt s must be positive");
    return tilt(std::get<SeriesSpec>(ls.initial), ls.s).coefficients(cap);
}

// Coefficients of psi_t^n. Poisson tilts use e^{-n r} (n r)^k / k! directly,
// which keeps the whole PMF at O(n) per mass instead of O(n^2).
struct TiltedPowers {
    std::vector<long double> coeffs;
    std::optional<long double> poisson_rate;

    TiltedPowers(const TiltedPgf& tp, std::size_t cap) {
        if (tp.closed_form)
            poisson_rate = tp.closed_form->get_if<kind::PoissonPgf>()->rate;
        else
            coeffs = tp.coefficients(cap);
    }

    std::vector<long double> power(std::uint64_t n, std::size_t cap) const {
        if (!poisson_rate) return power_ld(coeffs, n, cap);
        const long double nr = static_cast<long double>(n) * *poisson_rate;
        const long double lnr = std::log(nr);
        std::vector<long double> c(cap + 1);
        for (std::size_t k = 0; k <= cap; ++k) {
            const long double kk = static_cast<long double>(k);
            c[k] = std::exp(-nr + kk * lnr - std::lgamma(kk + 1.0L));
        }
        return c;
    }
};

// P(Z = n) for n >= 1 given the offspring powers and initial masses.
long double pmf_one(const TiltedPowers& psi_t, const std::vector<long double>& q, std::uint64_t n) {
    const std::vector<long double> pw = psi_t.power(n, n - 1);
    long double sum = 0;
    for (std::uint64_t j = 1; j <= n && j < q.size(); ++j) {
        if (q[j] == 0) continue;
        sum += q[j] * static_cast<long double>(j) * pw[n - j];
    }
    return sum / static_cast<long double>(n);
}

KhinchinEval critical_point(const SeriesSpec& spec) {
    const MeanLimit M = mean_limit(spec);
    if (!M.finite || M.value > 1.0 + kMeanOneTol) return evaluate(spec, solve_mean(spec, 1.0));
    if (M.value >= 1.0 - kMeanOneTol && std::isfinite(spec.radius())) return boundary_eval(spec);
    throw RangeError("no critical tilt: requires M_psi > 1, or M_psi = 1 with R < inf");
}

// Offspring or initial-generation sampler for a tilted pgf.
struct Sampler {
    enum class Kind { Fixed, Poisson, Geometric, Categorical } kind = Kind::Fixed;
    std::uint64_t fixed = 0;
    double param = 0.0;
    std::vector<double> cdf;

    template <class Rng>
    std::uint64_t draw(Rng& rng) const {
        switch (kind) {
            case Kind::Fixed:
                return fixed;
            case Kind::Poisson: {
                const double u = uniform(rng);
                double p = std::exp(-param), F = p;
                std::uint64_t k = 0;
                while (u > F && k < 10000) {
                    ++k;
                    p *= param / static_cast<double>(k);
                    F += p;
                }
                return k;
            }
            case Kind::Geometric: {
                // P(k) = (1 - r) r^k
                const double u = 1.0 - uniform(rng);
                return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log(param)));
            }
            case Kind::Categorical: {
                const double u = uniform(rng);
                auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
                if (it == cdf.end()) --it;
                return static_cast<std::uint64_t>(it - cdf.begin());
            }
        }
        return 0;
    }

    template <class Rng>
    static double uniform(Rng& rng) {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }
};

Sampler sampler_for(const SeriesSpec& spec, double t) {
    const TiltedPgf tp = tilt(spec, t);
    Sampler s;
    if (tp.closed_form) {
        s.kind = Sampler::Kind::Poisson;
        s.param = tp.closed_form->get_if<kind::PoissonPgf>()->rate;
        if (s.param > 30) throw PreconditionError("Poisson sampler supports rates <= 30");
        return s;
    }
    if (spec.is<kind::Geometric>()) {
        s.kind = Sampler::Kind::Geometric;
        s.param = t;
        return s;
    }
    const auto fin = spec.finite_coefficients();
    if (!fin) throw PreconditionError("no sampler for " + spec.to_string());
    const std::vector<long double> c = tp.coefficients(fin->size() - 1);
    s.kind = Sampler::Kind::Categorical;
    long double acc = 0;
    for (long double x : c) {
        acc += x;
        s.cdf.push_back(static_cast<double>(acc));
    }
    return s;
}

unsigned worker_count() {
    unsigned w = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) w = static_cast<unsigned>(v);
    }
    return std::min(w, kChunks);
}

}  // namespace

std::vector<long double> TiltedPgf::coefficients(std::size_t cap) const {
    std::vector<long double> out(cap + 1);
    const std::vector<double> lc = log_coefficients(base, cap);
    const long double lt = std::log(static_cast<long double>(t));
    for (std::size_t j = 0; j <= cap; ++j) {
        if (std::isinf(lc[j])) {
            out[j] = 0;
            continue;
        }
        out[j] = std::exp(static_cast<long double>(lc[j]) + static_cast<long double>(j) * lt -
                          static_cast<long double>(log_norm));
    }
    return out;
}

std::optional<std::vector<Rational>> TiltedPgf::exact_coefficients() const {
    auto fin = base.finite_coefficients();
    if (!fin) return std::nullopt;
    const Rational tq = rational_from_double(t);
    Rational pw = 1, total = 0;
    for (auto& c : *fin) {
        c *= pw;
        total += c;
        pw *= tq;
    }
    for (auto& c : *fin) c /= total;
    return fin;
}

TiltedPgf tilt(const SeriesSpec& spec, double t) {
    if (!(t > 0)) throw RangeError("tilt: t must be positive");
    const KhinchinEval ev = evaluate(spec, t);
    TiltedPgf tp{spec, t, ev.log_f, ev.mean, std::nullopt};
    if (spec.is<kind::Exp>()) tp.closed_form = SeriesSpec::poisson_pgf(t);
    if (const auto* p = spec.get_if<kind::PoissonPgf>()) tp.closed_form = SeriesSpec::poisson_pgf(p->rate * t);
    return tp;
}

Pmf lagrangian_pmf(const LagrangianSpec& ls, std::uint64_t n_max) {
    const TiltedPgf tp = tilt(ls.offspring, ls.t);
    require_subcritical(tp);
    const TiltedPowers psi_t(tp, n_max);
    const std::vector<long double> q = initial_masses(ls, n_max);

    Pmf out;
    out.n_max = n_max;
    out.masses.assign(n_max + 1, 0.0);
    out.masses[0] = static_cast<double>(q[0]);
    long double total = q[0];
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        const long double p = pmf_one(psi_t, q, n);
        out.masses[n] = static_cast<double>(p);
        total += p;
    }
    out.tail_mass = static_cast<double>(1.0L - total);
    return out;
}

double lagrangian_pmf_at(const LagrangianSpec& ls, std::uint64_t n) {
    const TiltedPgf tp = tilt(ls.offspring, ls.t);
    require_subcritical(tp);
    const std::vector<long double> q = initial_masses(ls, n);
    if (n == 0) return static_cast<double>(q[0]);
    return static_cast<double>(pmf_one(TiltedPowers(tp, n), q, n));
}

Pmf lagrangian_pmf_exact(const LagrangianSpec& ls, std::uint64_t n_max) {
    const TiltedPgf tp = tilt(ls.offspring, ls.t);
    require_subcritical(tp);
    const auto psi_t = tp.exact_coefficients();
    if (!psi_t) throw PreconditionError("exact pipeline requires polynomial offspring");

    std::vector<Rational> q(n_max + 1);
    if (const auto* m = std::get_if<Monomial>(&ls.initial)) {
        if (m->j < 1) throw PreconditionError("monomial initial requires j >= 1");
        if (m->j <= n_max) q[m->j] = 1;
    } else {
        if (!(ls.s > 0)) throw RangeError("initial tilt s must be positive");
        const TiltedPgf fs = tilt(std::get<SeriesSpec>(ls.initial), ls.s);
        const auto fc = fs.exact_coefficients();
        if (!fc) throw PreconditionError("exact pipeline requires a polynomial or monomial initial");
        for (std::size_t j = 0; j < fc->size() && j <= n_max; ++j) q[j] = (*fc)[j];
    }

    const ExactSeries base(*psi_t);
    Pmf out;
    out.n_max = n_max;
    std::vector<Rational> exact(n_max + 1);
    exact[0] = q[0];
    Rational total = q[0];
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        const ExactSeries pw = series_pow_recurrence(base, n, n - 1);
        Rational sum = 0;
        for (std::uint64_t j = 1; j <= n; ++j)
            if (q[j] != 0) sum += q[j] * Rational(static_cast<unsigned long>(j)) * pw[n - j];
        exact[n] = sum / Rational(Integer(std::to_string(n), 10));
        total += exact[n];
    }
    out.masses.resize(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) out.masses[n] = exact[n].get_d();
    out.tail_mass = Rational(1 - total).get_d();
    out.exact = std::move(exact);
    return out;
}

LogEstimate lagrangian_pmf_asymptotic(const LagrangianSpec& ls, std::uint64_t n) {
    if (n < 1) throw PreconditionError("lagrangian_pmf_asymptotic: n must be >= 1");
    const TiltedPgf tp = tilt(ls.offspring, ls.t);
    require_subcritical(tp);
    const KhinchinEval crit = critical_point(ls.offspring);
    const double tau = crit.t, t = ls.t, s = ls.s;
    const double log_ratio = std::log(tau) - std::log(t);  // ln(tau/t)

    std::vector<Factor> f{{"logPrefactor", -kHalfLog2Pi}};
    if (const auto* m = std::get_if<Monomial>(&ls.initial)) {
        const double j = m->j;
        f.push_back({"logS", std::log(s)});
        f.push_back({"minusLogFS", -j * std::log(s)});
        f.push_back({"logFPrime", std::log(j) + (j - 1.0) * (std::log(s) + log_ratio)});
    } else {
        const SeriesSpec& fs = std::get<SeriesSpec>(ls.initial);
        const double S = fs.radius();
        if (!(s * tau < t * S))
            throw RangeError("lagrangian_pmf_asymptotic: requires s*tau < t*S (s tau < t S)");
        const double x = s * tau / t;
        const KhinchinEval ex = evaluate(fs, x);
        f.push_back({"logS", std::log(s)});
        f.push_back({"minusLogFS", -evaluate(fs, s).log_f});
        f.push_back({"logFPrime", ex.log_f + std::log(ex.mean) - std::log(x)});
    }
    f.push_back({"nLogPsiTauOverPsiT", dbl(n) * (crit.log_f - tp.log_norm)});
    f.push_back({"nMinus1LogTOverTau", -(dbl(n) - 1.0) * log_ratio});
    f.push_back({"minusThreeHalvesLogN", -1.5 * std::log(dbl(n))});
    f.push_back({"minusLogSigma", -crit.log_sigma()});
    return LogEstimate::from_factors(Regime::LagrangianPmf, tau, std::move(f));
}

double borel_tanner_pmf(double t, unsigned j, std::uint64_t n) {
    if (!(t > 0 && t <= 1)) throw RangeError("borel_tanner_pmf: t must lie in (0, 1]");
    if (j < 1) throw PreconditionError("borel_tanner_pmf: j must be >= 1");
    if (n < j) return 0.0;
    const double nd = dbl(n), m = dbl(n - j);
    const double lp = std::log(static_cast<double>(j)) - std::log(nd) - t * nd +
                      (m > 0 ? m * std::log(t * nd) : 0.0) - std::lgamma(m + 1.0);
    return std::exp(lp);
}

double poisson_poisson_pmf(double s, double t, std::uint64_t n) {
    if (!(s > 0)) throw RangeError("poisson_poisson_pmf: s must be positive");
    if (!(t > 0 && t <= 1)) throw RangeError("poisson_poisson_pmf: t must lie in (0, 1]");
    if (n == 0) return std::exp(-s);
    const double nd = dbl(n);
    const double lp = -t * nd - s + (nd - 1.0) * std::log(t * nd + s) + std::log(s) - std::lgamma(nd + 1.0);
    return std::exp(lp);
}

Histogram gw_simulate(const LagrangianSpec& ls, std::uint64_t samples, std::uint64_t seed,
                      std::uint64_t cap) {
    require_subcritical(tilt(ls.offspring, ls.t));
    const Sampler offspring = sampler_for(ls.offspring, ls.t);
    Sampler initial;
    if (const auto* m = std::get_if<Monomial>(&ls.initial)) {
        initial.fixed = m->j;
    } else {
        if (!(ls.s > 0)) throw RangeError("initial tilt s must be positive");
        initial = sampler_for(std::get<SeriesSpec>(ls.initial), ls.s);
    }

    std::vector<Histogram> parts(kChunks);
    std::atomic<unsigned> next{0};
    auto work = [&] {
        for (unsigned c = next++; c < kChunks; c = next++) {
            Histogram& h = parts[c];
            h.samples = samples / kChunks + (c < samples % kChunks ? 1 : 0);
            std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), c};
            std::mt19937_64 rng(sq);
            for (std::uint64_t i = 0; i < h.samples; ++i) {
                std::uint64_t gen = initial.draw(rng);
                std::uint64_t total = gen;
                while (gen > 0 && total <= cap) {
                    std::uint64_t born = 0;
                    for (std::uint64_t k = 0; k < gen && total + born <= cap; ++k) born += offspring.draw(rng);
                    total += born;
                    gen = born;
                }
                if (total > cap)
                    ++h.escaped;
                else {
                    // Grown on demand; cap can be far above any observed total.
                    if (total >= h.counts.size()) h.counts.resize(total + 1, 0);
                    ++h.counts[total];
                }
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned workers = worker_count();
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    Histogram out;
    for (const auto& h : parts) {
        if (h.counts.size() > out.counts.size()) out.counts.resize(h.counts.size(), 0);
        for (std::size_t z = 0; z < h.counts.size(); ++z) out.counts[z] += h.counts[z];
        out.escaped += h.escaped;
        out.samples += h.samples;
    }
    return out;
}

RescaleResult rescale_check(const SeriesSpec& spec, double t, std::size_t degree) {
    const TiltedPgf tp = tilt(spec, t);
    require_subcritical(tp);
    const std::vector<Rational> A = lagrange_coeffs(spec, degree);

    if (const auto psi_t = tp.exact_coefficients()) {
        const Rational tq = rational_from_double(t);
        // psi_t(0) = b_0 / psi(t)
        const Rational ratio = tq * (*psi_t)[0] / expand(spec, 0)[0];
        const ExactSeries base(*psi_t);
        Rational scale = 1 / tq;  // (1/t) (t/psi(t))^n
        double residual = 0;
        for (std::size_t n = 1; n <= degree; ++n) {
            scale *= ratio;
            const Rational lhs = series_pow_recurrence(base, n, n - 1)[n - 1] / Rational(static_cast<unsigned long>(n));
            const Rational diff = lhs - A[n] * scale;
            residual = std::max(residual, std::fabs(diff.get_d()));
        }
        return {residual, true};
    }

    const std::vector<long double> psi_t = tp.coefficients(degree);
    const long double lratio = std::log(static_cast<long double>(t)) - static_cast<long double>(tp.log_norm);
    double residual = 0;
    for (std::size_t n = 1; n <= degree; ++n) {
        const long double lhs = power_ld(psi_t, n, n - 1)[n - 1] / static_cast<long double>(n);
        const long double rhs = std::exp(static_cast<long double>(log_of(A[n])) + n * lratio -
                                         std::log(static_cast<long double>(t)));
        residual = std::max(residual, static_cast<double>(std::fabs(lhs - rhs)));
    }
    return {residual, false};
}

std::vector<double> limit_case_ratio(const SeriesSpec& spec, const SeriesSpec& f,
                                     const std::vector<double>& s_seq,
                                     const std::vector<std::uint64_t>& n_seq) {
    if (s_seq.size() != n_seq.size()) throw PreconditionError("limit_case_ratio: sequence lengths differ");
    const double tau = critical_point(spec).t;
    std::vector<double> out;
    out.reserve(s_seq.size());
    for (std::size_t i = 0; i < s_seq.size(); ++i) {
        const LagrangianSpec ls{spec, f, tau, s_seq[i]};
        const double p = lagrangian_pmf_at(ls, n_seq[i]);
        const double mf = evaluate(f, s_seq[i]).mean;
        out.push_back(std::pow(dbl(n_seq[i]), 1.5) * p / mf);
    }
    return out;
}

}  // namespace lpow
