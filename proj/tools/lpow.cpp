// lpow: coefficients of large powers, Lagrange inversion and Lagrangian
// distributions from the command line.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <gmpxx.h>

#include "CLI11.hpp"
#include "lpow/errors.hpp"
#include "lpow/gaussianity.hpp"
#include "lpow/khinchin.hpp"
#include "lpow/lagrange.hpp"
#include "lpow/lagrangian.hpp"
#include "lpow/large_powers.hpp"
#include "lpow/text_io.hpp"

using namespace lpow;
using nlohmann::json;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

// Counts such as "1e6" are accepted.
std::uint64_t parse_count(const std::string& s, const char* what) {
    const Rational q = parse_rational(s);
    if (q < 0 || q.get_den() != 1) throw ParseError(std::string(what) + " must be a nonnegative integer", 0);
    return std::stoull(q.get_num().get_str());
}

std::string decimal(const Rational& q, int digits) {
    if (digits <= 0) return to_string(q);
    const mpf_class f(q, static_cast<mp_bitcnt_t>(digits * 4 + 64));
    std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
    gmp_snprintf(buf.data(), buf.size(), "%.*Fe", digits - 1, f.get_mpf_t());
    return buf.data();
}

void print_estimate(const LogEstimate& e, bool as_json) {
    if (as_json) {
        std::cout << to_json(e).dump(2) << '\n';
        return;
    }
    std::cout << "regime   " << regime_name(e.regime) << '\n';
    if (!std::isnan(e.tau)) std::cout << "tau      " << csv_number(e.tau) << '\n';
    if (e.zero_flagged()) {
        std::cout << "value    0 (gauge does not divide the index)\n";
        return;
    }
    std::cout << "logValue " << csv_number(*e.log_value) << '\n';
    for (const auto& f : e.factors) std::printf("  %-24s %s\n", f.label.c_str(), csv_number(f.value).c_str());
}

void print_envelope(const UpperEnvelope& e, bool as_json) {
    if (as_json) {
        std::cout << to_json(e).dump(2) << '\n';
        return;
    }
    std::cout << "upper envelope (" << e.note << ")\n";
    std::cout << "logValue " << csv_number(e.log_value) << '\n';
    for (const auto& f : e.factors) std::printf("  %-24s %s\n", f.label.c_str(), csv_number(f.value).c_str());
}

Regime regime_arg(const std::string& name) {
    const auto r = regime_from_name(name);
    if (!r) throw ParseError("unknown regime '" + name + "'", 0);
    return *r;
}

struct EstimateArgs {
    Regime regime;
    unsigned J = 2;
    double L = 0, omega = 0;
    std::optional<SeriesSpec> prefactor;
};

LogEstimate run_estimate(const SeriesSpec& spec, std::uint64_t k, std::uint64_t n, const EstimateArgs& a) {
    if (a.prefactor) {
        switch (a.regime) {
            case Regime::Comparable:
                return estimate_with_prefactor(*a.prefactor, spec, k, n, PrefactorRegime::Comparable);
            case Regime::SmallK:
                return estimate_with_prefactor(*a.prefactor, spec, k, n, PrefactorRegime::SmallK);
            case Regime::FixedK:
                return estimate_with_prefactor(*a.prefactor, spec, k, n, PrefactorRegime::FixedK);
            default:
                throw PreconditionError("--prefactor supports comparable, small-k and fixed-k only");
        }
    }
    switch (a.regime) {
        case Regime::Comparable: return estimate_comparable(spec, k, n);
        case Regime::LimitRatio: return estimate_limit_ratio(spec, n, a.L, a.omega, k);
        case Regime::Boundary: return estimate_boundary(spec, k, n);
        case Regime::SmallK: return estimate_small_k(spec, k, n);
        case Regime::SmallKUnsimplified: return estimate_small_k_unsimplified(spec, k, n);
        case Regime::SmallKClosed: return estimate_small_k_closed(spec, k, n, a.J);
        case Regime::FixedK: return estimate_fixed_k(spec, k, n);
        case Regime::LargeK: return estimate_large_k(spec, k, n);
        default: throw PreconditionError("regime '" + std::string(regime_name(a.regime)) + "' is not a large-power regime");
    }
}

// k as a function of n for `compare`.
struct KRule {
    enum class Kind { HalfN, SqrtN, Fixed, Ratio } kind = Kind::HalfN;
    std::uint64_t fixed = 0;
    double L = 0, omega = 0;

    std::uint64_t operator()(std::uint64_t n) const {
        const double nd = static_cast<double>(n);
        switch (kind) {
            case Kind::HalfN: return n / 2;
            case Kind::SqrtN: return static_cast<std::uint64_t>(std::floor(std::sqrt(nd)));
            case Kind::Fixed: return fixed;
            case Kind::Ratio: return static_cast<std::uint64_t>(std::floor(nd * L + omega * std::sqrt(nd)));
        }
        return 0;
    }
};

KRule parse_k_rule(const std::string& s) {
    KRule r;
    if (s == "half-n") return r;
    if (s == "sqrt-n") {
        r.kind = KRule::Kind::SqrtN;
        return r;
    }
    if (s.rfind("fixed:", 0) == 0) {
        r.kind = KRule::Kind::Fixed;
        r.fixed = parse_count(s.substr(6), "fixed:K");
        return r;
    }
    if (s.rfind("ratio:", 0) == 0) {
        r.kind = KRule::Kind::Ratio;
        const auto v = parse_rational_list(s.substr(6));
        if (v.empty() || v.size() > 2) throw ParseError("ratio:L[,omega] expects one or two numbers", 6);
        r.L = v[0].get_d();
        if (v.size() == 2) r.omega = v[1].get_d();
        return r;
    }
    throw ParseError("unknown k rule '" + s + "'", 0);
}

unsigned worker_count() {
    unsigned w = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) w = static_cast<unsigned>(v);
    }
    return w;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coefficients of large powers of power series, Lagrange inversion and Lagrangian distributions"};
    app.require_subcommand(1);

    std::string spec_text, regime_text, k_rule_text = "half-n", n_list_text, prefactor_text;
    std::string offspring_text, initial_text = "mono:1", g_text;
    std::string samples_text = "1e6", cap_text = "1e7";
    std::uint64_t k = 0, n = 0, q = 0, n_max = 0, seed = 42;
    unsigned J = 2, bt_j = 0;
    double t = 0, s = 1, L = 0, omega = 0, alpha = 0, beta = 0;
    int digits = 0;
    bool exact = false, as_json = false, asymptotic = false, poisson_poisson = false;

    auto* coeff = app.add_subcommand("coeff", "coeff_[k](psi^n): exact or a named asymptotic regime");
    coeff->add_option("--spec", spec_text, "series spec")->required();
    coeff->add_option("--k", k, "coefficient index")->required();
    coeff->add_option("--n", n, "power")->required();
    coeff->add_flag("--exact", exact, "exact rational value");
    coeff->add_option("--regime", regime_text,
                      "comparable|limit-ratio|boundary|small-k|small-k-unsimplified|small-k-closed|fixed-k|large-k");
    coeff->add_option("--J", J, "expansion order for small-k-closed");
    coeff->add_option("--L", L, "limit ratio for limit-ratio");
    coeff->add_option("--omega", omega, "sqrt(n) offset for limit-ratio");
    coeff->add_option("--prefactor", prefactor_text, "h in coeff_[k](h psi^n)");
    coeff->add_option("--digits", digits, "render the exact value in scientific notation with this many digits");
    coeff->add_flag("--json", as_json, "JSON output");

    auto* compare = app.add_subcommand("compare", "exact versus asymptotic over a list of n (CSV)");
    compare->add_option("--spec", spec_text, "series spec")->required();
    compare->add_option("--regime", regime_text, "estimator regime")->required();
    compare->add_option("--k-rule", k_rule_text, "half-n|sqrt-n|fixed:K|ratio:L[,omega]");
    compare->add_option("--n-list", n_list_text, "comma-separated n values")->required();
    compare->add_option("--J", J, "expansion order for small-k-closed");

    auto* lagrange = app.add_subcommand("lagrange", "coefficients of the solution of g = w psi(g)");
    lagrange->add_option("--spec", spec_text, "series spec psi")->required();
    lagrange->add_option("--n", n, "coefficient index")->required();
    lagrange->add_option("--q", q, "coefficient of g^q");
    lagrange->add_option("--alpha", alpha, "q = alpha n + beta sqrt(n) (asymptotic)");
    lagrange->add_option("--beta", beta, "q = alpha n + beta sqrt(n) (asymptotic)");
    lagrange->add_flag("--asymptotic", asymptotic, "Otter-Meir-Moon asymptotics");
    lagrange->add_flag("--json", as_json, "JSON output");

    auto* radius = app.add_subcommand("lagrange-radius", "radius of convergence of the solution");
    radius->add_option("--spec", spec_text, "series spec psi")->required();

    auto* pmf = app.add_subcommand("pmf", "Lagrangian distribution masses (CSV)");
    pmf->add_option("--offspring", offspring_text, "offspring spec psi")->required();
    pmf->add_option("--t", t, "offspring tilt")->required();
    pmf->add_option("--initial", initial_text, "initial spec or mono:j");
    pmf->add_option("--s", s, "initial tilt");
    pmf->add_option("--n-max", n_max, "largest n")->required();
    pmf->add_flag("--asymptotic", asymptotic, "asymptotic masses");
    pmf->add_flag("--exact", exact, "rational masses (polynomial offspring)");
    pmf->add_option("--borel-tanner", bt_j, "closed-form Borel-Tanner with j initial individuals");
    pmf->add_flag("--poisson-poisson", poisson_poisson, "closed-form Poisson-Poisson with parameters s, t");
    pmf->add_flag("--json", as_json, "JSON output");

    auto* simulate = app.add_subcommand("simulate", "Galton-Watson total progeny histogram (CSV)");
    simulate->add_option("--offspring", offspring_text, "offspring spec psi")->required();
    simulate->add_option("--t", t, "offspring tilt")->required();
    simulate->add_option("--initial", initial_text, "initial spec or mono:j");
    simulate->add_option("--s", s, "initial tilt");
    simulate->add_option("--samples", samples_text, "number of runs");
    simulate->add_option("--seed", seed, "seed");
    simulate->add_option("--cap", cap_text, "total progeny above which a run counts as escaped");

    auto* gauss = app.add_subcommand("gauss", "uniform Gaussianity integral I_n(t) (JSON)");
    gauss->add_option("--spec", spec_text, "exp or exppoly spec")->required();
    gauss->add_option("--t", t, "radius")->required();
    gauss->add_option("--n", n, "power")->required();

    auto* hayman = app.add_subcommand("hayman-cut", "major/minor arc report for e^g (JSON)");
    hayman->add_option("--g", g_text, "coefficients c1,c2,... of g")->required();
    hayman->add_option("--n", n, "power")->required();
    hayman->add_option("--t", t, "radius")->required();

    auto* suggest = app.add_subcommand("suggest-regime", "heuristic regime tag with unmet preconditions");
    suggest->add_option("--spec", spec_text, "series spec")->required();
    suggest->add_option("--k", k, "coefficient index")->required();
    suggest->add_option("--n", n, "power")->required();
    suggest->add_flag("--json", as_json, "JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*coeff) {
            const SeriesSpec spec = parse_spec(spec_text);
            if (exact || regime_text.empty()) {
                if (n < 1) throw PreconditionError("n must be >= 1");
                const Rational c = coeff_of_power(spec, k, n);
                if (as_json)
                    std::cout << json{{"k", k}, {"n", n}, {"exact", to_string(c)}, {"logExact", log_of(c)}}.dump(2) << '\n';
                else
                    std::cout << decimal(c, digits) << '\n';
                return 0;
            }
            EstimateArgs a{regime_arg(regime_text), J, L, omega, std::nullopt};
            if (!prefactor_text.empty()) a.prefactor = parse_spec(prefactor_text);
            print_estimate(run_estimate(spec, k, n, a), as_json);
            return 0;
        }

        if (*compare) {
            const SeriesSpec spec = parse_spec(spec_text);
            const KRule rule = parse_k_rule(k_rule_text);
            EstimateArgs a{regime_arg(regime_text), J, rule.L, rule.omega, std::nullopt};
            std::vector<std::uint64_t> ns;
            for (const auto& v : parse_rational_list(n_list_text)) ns.push_back(parse_count(to_string(v), "n"));
            std::sort(ns.begin(), ns.end());

            std::vector<std::string> rows(ns.size());
            std::vector<std::string> errors(ns.size());
            std::atomic<std::size_t> next{0};
            auto work = [&] {
                for (std::size_t i = next++; i < ns.size(); i = next++) {
                    try {
                        const std::uint64_t nn = ns[i], kk = rule(nn);
                        const double le = log_coeff_of_power(spec, kk, nn);
                        const LogEstimate est = run_estimate(spec, kk, nn, a);
                        const double la = est.log_value.value_or(-INFINITY);
                        const double ratio = est.zero_flagged() && std::isinf(le) ? 1.0 : std::exp(la - le);
                        rows[i] = std::to_string(nn) + "," + std::to_string(kk) + "," + csv_number(le) + "," +
                                  csv_number(la) + "," + csv_number(ratio);
                    } catch (const std::exception& e) {
                        errors[i] = "n=" + std::to_string(ns[i]) + ": " + e.what();
                    }
                }
            };
            std::vector<std::thread> pool;
            const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(ns.size()));
            for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
            work();
            for (auto& th : pool) th.join();
            for (const auto& e : errors)
                if (!e.empty()) throw RangeError(e);
            std::cout << "n,k,logExact,logEstimate,ratio\n";
            for (const auto& r : rows) std::cout << r << '\n';
            return 0;
        }

        if (*lagrange) {
            const SeriesSpec spec = parse_spec(spec_text);
            const std::uint64_t qq = q == 0 ? 1 : q;
            if (!asymptotic) {
                const Rational c = qq == 1 ? lagrange_coeff(spec, n) : lagrange_power_coeff(spec, n, qq);
                if (as_json)
                    std::cout << json{{"n", n}, {"q", qq}, {"exact", to_string(c)}}.dump(2) << '\n';
                else
                    std::cout << to_string(c) << '\n';
                return 0;
            }
            if (qq == 1 && alpha == 0 && beta == 0) {
                const OmmResult r = omm_asymptotic(spec, n);
                if (const auto* e = std::get_if<LogEstimate>(&r))
                    print_estimate(*e, as_json);
                else
                    print_envelope(std::get<UpperEnvelope>(r), as_json);
                return 0;
            }
            print_estimate(omm_power_asymptotic(spec, n, qq, alpha, beta), as_json);
            return 0;
        }

        if (*radius) {
            const SolutionRadius r = solution_radius(parse_spec(spec_text));
            std::cout << csv_number(r.value) << (r.from_envelope ? " (from envelope)" : "") << '\n';
            return 0;
        }

        if (*pmf) {
            const LagrangianSpec ls{parse_spec(offspring_text), parse_initial(initial_text), t, s};
            if (bt_j > 0 || poisson_poisson) {
                std::cout << "n,pmf\n";
                for (std::uint64_t i = 0; i <= n_max; ++i) {
                    const double p = poisson_poisson ? poisson_poisson_pmf(s, t, i) : borel_tanner_pmf(t, bt_j, i);
                    std::cout << i << ',' << csv_number(p) << '\n';
                }
                return 0;
            }
            if (asymptotic) {
                std::cout << "n,logPmf,pmf\n";
                for (std::uint64_t i = 1; i <= n_max; ++i) {
                    const LogEstimate e = lagrangian_pmf_asymptotic(ls, i);
                    std::cout << i << ',' << csv_number(*e.log_value) << ',' << csv_number(std::exp(*e.log_value)) << '\n';
                }
                return 0;
            }
            const Pmf p = exact ? lagrangian_pmf_exact(ls, n_max) : lagrangian_pmf(ls, n_max);
            if (as_json) {
                std::cout << to_json(p).dump(2) << '\n';
                return 0;
            }
            std::cout << "n,pmf\n";
            for (std::uint64_t i = 0; i <= n_max; ++i) std::cout << i << ',' << csv_number(p.masses[i]) << '\n';
            std::cout << "# tailMass," << csv_number(p.tail_mass) << '\n';
            return 0;
        }

        if (*simulate) {
            const LagrangianSpec ls{parse_spec(offspring_text), parse_initial(initial_text), t, s};
            const std::uint64_t samples = parse_count(samples_text, "--samples");
            const std::uint64_t cap = parse_count(cap_text, "--cap");
            const Histogram h = gw_simulate(ls, samples, seed, cap);
            const double total = static_cast<double>(h.samples);
            std::cout << "n,count,frequency\n";
            for (std::size_t z = 0; z < h.counts.size(); ++z)
                if (h.counts[z] > 0)
                    std::cout << z << ',' << h.counts[z] << ',' << csv_number(h.counts[z] / total) << '\n';
            std::cout << "escaped," << h.escaped << ',' << csv_number(h.escaped / total) << '\n';
            return 0;
        }

        if (*gauss) {
            const SeriesSpec spec = parse_spec(spec_text);
            const KhinchinEval ev = evaluate(spec, t);
            std::cout << json{{"n", n}, {"t", t}, {"mean", ev.mean}, {"sigma", ev.sigma()},
                              {"integralI", gaussian_integral_I(spec, t, n)}}
                             .dump(2)
                      << '\n';
            return 0;
        }

        if (*hayman) {
            std::vector<Rational> g = parse_rational_list(g_text);
            g.insert(g.begin(), Rational(0));
            std::cout << to_json(hayman_cut_check(g, n, t)).dump(2) << '\n';
            return 0;
        }

        if (*suggest) {
            const RegimeSuggestion r = suggest_regime(parse_spec(spec_text), k, n);
            if (as_json) {
                std::cout << to_json(r).dump(2) << '\n';
                return 0;
            }
            std::cout << regime_name(r.suggested) << '\n';
            for (const auto& e : r.regimes) {
                std::cout << "  " << regime_name(e.regime) << ": ";
                if (e.unmet.empty()) std::cout << "all preconditions met";
                for (std::size_t i = 0; i < e.unmet.size(); ++i) std::cout << (i ? "; " : "") << e.unmet[i];
                std::cout << '\n';
            }
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const RangeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    }
    return 0;
}
