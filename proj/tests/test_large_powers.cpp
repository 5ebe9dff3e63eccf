#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lpow/errors.hpp"
#include "lpow/khinchin.hpp"
#include "lpow/large_powers.hpp"
#include "oracles.hpp"

using namespace lpow;

namespace {

const double kLog2 = std::numbers::ln2;
const double kPi = std::numbers::pi;

double exact_log(const SeriesSpec& s, std::uint64_t k, std::uint64_t n) { return log_coeff_of_power(s, k, n); }

double err(const LogEstimate& e, double log_exact) { return oracle::log_ratio_error(*e.log_value, log_exact); }

void check_factor_sum(const LogEstimate& e) {
    REQUIRE(e.log_value);
    double s = 0;
    for (const auto& f : e.factors) s += f.value;
    CHECK(std::fabs(*e.log_value - s) <= 1e-12);
}

// ln(k! e^k k^{-k} / sqrt(2 pi k)): the Stirling gap the closed form carries at fixed k.
double stirling_gap(double k) { return oracle::log_factorial(k) + k - k * std::log(k) - 0.5 * std::log(2 * kPi * k); }

}  // namespace

TEST_CASE("comparable regime") {
    const SeriesSpec a11 = SeriesSpec::affine(1, 1);
    const LogEstimate e = estimate_comparable(a11, 1000, 2000);
    CHECK(*e.log_value == doctest::Approx(2001 * kLog2 - 0.5 * std::log(4000 * kPi)).epsilon(1e-12));
    CHECK(err(e, oracle::log_binomial(2000, 1000)) <= 0.01);
    CHECK(e.regime == Regime::Comparable);
    CHECK(e.tau == doctest::Approx(1.0));
    check_factor_sum(e);

    const LogEstimate small = estimate_comparable(a11, 3, 10);
    CHECK(std::fabs(std::exp(*small.log_value) / 120.0 - 1) <= 0.10);

    CHECK(estimate_comparable(SeriesSpec::polynomial({1, 0, 1}), 5, 9).zero_flagged());
    CHECK_THROWS_AS(estimate_comparable(a11, 10, 10), RangeError);
    CHECK_THROWS_AS(estimate_comparable(a11, 0, 10), PreconditionError);
}

TEST_CASE("limit-ratio regime") {
    const SeriesSpec a11 = SeriesSpec::affine(1, 1);
    // lambda-shift of the central binomial: damping e^{-2 lambda^2}.
    const double lambda = 1.0;
    for (std::uint64_t n : {256u, 4096u}) {
        const auto k = static_cast<std::uint64_t>(std::floor(n / 2.0 + lambda * std::sqrt(n)));
        const LogEstimate e = estimate_limit_ratio(a11, n, 0.5, lambda, k);
        CHECK(e.factor("correction") == doctest::Approx(-2 * lambda * lambda));
        check_factor_sum(e);
    }
    // omega = 0 coincides with the comparable estimate at m(tau) = k/n.
    const LogEstimate lr = estimate_limit_ratio(a11, 300, 0.5, 0.0, 150);
    const LogEstimate cp = estimate_comparable(a11, 150, 300);
    CHECK(*lr.log_value == doctest::Approx(*cp.log_value).epsilon(1e-13));

    // coeff_{n-1}(e^{nz}) = n^{n-1}/(n-1)!.
    const LogEstimate ex = estimate_limit_ratio(SeriesSpec::exp(), 100, 1.0, 0.0, 99);
    CHECK(err(ex, 99 * std::log(100.0) - oracle::log_factorial(99)) <= 0.05);

    CHECK_THROWS_WITH_AS(estimate_limit_ratio(a11, 100, 1.0, 0.0, 100), doctest::Contains("estimate_boundary"),
                         RangeError);
}

TEST_CASE("boundary regime") {
    const SeriesSpec fin = SeriesSpec::truncated({1, 1}, 1.0, true);
    // k = n M exactly: no damping, tau = R = 1, sigma^2 = 1/4.
    const LogEstimate e = estimate_boundary(fin, 50, 100);
    CHECK(e.factor("correction") == 0.0);
    CHECK(e.tau == 1.0);
    CHECK(*e.log_value == doctest::Approx(-0.5 * std::log(2 * kPi) - std::log(0.5) - 0.5 * std::log(100.0) +
                                          100 * kLog2)
                              .epsilon(1e-12));
    CHECK(err(e, oracle::log_binomial(100, 50)) <= 0.01);
    // Ratio improves with n along k = n/2 + sqrt(n).
    auto shifted = [&](std::uint64_t n) {
        const auto k = n / 2 + static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
        return err(estimate_boundary(fin, k, n), oracle::log_binomial(n, k));
    };
    CHECK(shifted(1600) < shifted(100));

    CHECK(estimate_boundary(SeriesSpec::truncated({1, 0, 1}, 1.0, true), 51, 100).zero_flagged());
    CHECK_THROWS_AS(estimate_boundary(SeriesSpec::exp(), 5, 10), RangeError);
}

TEST_CASE("small-k regime") {
    const SeriesSpec e = SeriesSpec::exp();
    const std::uint64_t n = 1000000, k = 1000;
    const double exact = k * std::log(double(n)) - oracle::log_factorial(k);
    const LogEstimate s = estimate_small_k(e, k, n);
    CHECK(err(s, exact) <= 0.02);
    check_factor_sum(s);
    CHECK(err(estimate_small_k_unsimplified(e, k, n), exact) <= 0.02);

    const SeriesSpec g = SeriesSpec::geometric();
    const double exact_g = oracle::log_binomial(10000 + 10 - 1, 10);
    CHECK(err(estimate_small_k(g, 10, 10000), exact_g) <= 0.05);

    CHECK_THROWS_WITH_AS(estimate_small_k(SeriesSpec::polynomial({1, 0, 1}), 2, 100), doctest::Contains("psi'(0)"),
                         PreconditionError);
}

TEST_CASE("expansion_B") {
    for (const SeriesSpec& s : {SeriesSpec::exp(), SeriesSpec::geometric(), SeriesSpec::binomial_power(3),
                                SeriesSpec::polynomial({2, 3, 1, 5})}) {
        const BExpansion be = expansion_B(s, 6);
        CHECK(be.b(1) == 1);
        // C_j = ((j+1)/j) B_{j+1}
        for (std::size_t j = 1; j < 6; ++j)
            CHECK(be.c(j) == Rational(static_cast<unsigned long>(j + 1), static_cast<unsigned long>(j)) * be.b(j + 1));
    }
    CHECK(expansion_B(SeriesSpec::exp(), 2).b(2) == 0);
    // B_2 = 1/2 - b_2 b_0 / b_1^2
    CHECK(expansion_B(SeriesSpec::polynomial({2, 3, 1, 5}), 2).b(2) == Rational(1, 2) - Rational(2, 9));
    CHECK(expansion_B(SeriesSpec::geometric(), 2).b(2) == Rational(-1, 2));
    CHECK_THROWS_AS(expansion_B(SeriesSpec::polynomial({1, 0, 1}), 3), PreconditionError);
    CHECK_THROWS_AS(expansion_B(SeriesSpec::exp(), 0), PreconditionError);
}

TEST_CASE("expansion_B against an independent series reversion") {
    // ln(psi(m^{-1}(z))/b_0) = sum B_j z^j, with m(t) = t psi'(t)/psi(t).
    const std::vector<Rational> c{1, 2, Rational(1, 2), 3};
    const std::size_t D = 6;
    const ExactSeries psi = ExactSeries(c).truncated(D + 1);
    const ExactSeries m = series_mul(ExactSeries{0, 1}, series_div(series_derivative(psi), psi, D), D);
    // Reversion by fixed-point iteration: r = (z - (m(r) - m_1 r)) / m_1.
    ExactSeries r = ExactSeries{0, 1 / m[1]}.truncated(D);
    for (std::size_t it = 0; it < D + 1; ++it) {
        const ExactSeries mr = series_compose(m, r, D);
        std::vector<Rational> next(D + 1);
        for (std::size_t j = 1; j <= D; ++j) next[j] = ((j == 1 ? Rational(1) : Rational(0)) - (mr[j] - m[1] * r[j])) / m[1];
        r = ExactSeries(next);
    }
    const ExactSeries lhs = series_log(series_compose(psi, r, D), D);
    const BExpansion be = expansion_B(SeriesSpec::polynomial(c), D);
    for (std::size_t j = 1; j <= D; ++j) CHECK(lhs[j] == be.b(j));
}

TEST_CASE("small-k closed form") {
    const SeriesSpec e = SeriesSpec::exp();
    const std::uint64_t n = 1000000, k = 1000;
    const LogEstimate c2 = estimate_small_k_closed(e, k, n, 2);
    CHECK(c2.factor("correction") == 0.0);
    CHECK(err(c2, k * std::log(double(n)) - oracle::log_factorial(k)) <= 0.02);
    check_factor_sum(c2);

    // J = 1 is b_0^{n-k} b_1^k n^k / k! with Stirling's k!.
    const SeriesSpec p = SeriesSpec::polynomial({2, 3, 1});
    const LogEstimate c1 = estimate_small_k_closed(p, 40, 100000, 1);
    const double direct = (100000 - 40) * std::log(2.0) + 40 * std::log(3.0) + 40 * std::log(1e5) - oracle::log_factorial(40);
    CHECK(*c1.log_value == doctest::Approx(direct + stirling_gap(40)).epsilon(1e-12));

    // Fixed k = 5: the ratio to the exact coefficient tends to the Stirling gap, not to 1.
    const SeriesSpec q = SeriesSpec::polynomial({1, 2, 1, 1});
    auto gap_error = [&](std::uint64_t nn) {
        const double exact = exact_log(q, 5, nn);
        return std::fabs(*estimate_small_k_closed(q, 5, nn, 1).log_value - exact - stirling_gap(5));
    };
    CHECK(gap_error(2000) < gap_error(200));
    CHECK(gap_error(2000) < 0.01);
    CHECK_THROWS_AS(estimate_small_k_closed(e, 3, 100, 0), PreconditionError);
}

TEST_CASE("fixed-k polynomial") {
    const FixedKPolynomial a = fixed_k_polynomial(SeriesSpec::polynomial({2, 3, 1, 4}), 6);
    CHECK(a.gamma == 6);
    CHECK(a.C[6] == 729);  // b_1^k

    const FixedKPolynomial b = fixed_k_polynomial(SeriesSpec::polynomial({1, 0, 5, 7}), 8);  // k = 2q, q = 4
    CHECK(b.gamma == 4);
    CHECK(b.C[4] == 625);  // b_2^q

    const FixedKPolynomial c = fixed_k_polynomial(SeriesSpec::polynomial({1, 0, 5, 7}), 9);  // k = 2q+1, q = 4
    CHECK(c.gamma == 4);
    CHECK(c.C[4] == 4 * 125 * 7);  // q b_2^{q-1} b_3

    // Exact identity against repeated multiplication.
    const std::vector<Rational> coeffs{Rational(1, 2), 2, 0, Rational(3, 4), 1};
    for (std::uint64_t k = 0; k <= 6; ++k) {
        const FixedKPolynomial p = fixed_k_polynomial(SeriesSpec::polynomial(coeffs), k);
        for (std::uint64_t n = 1; n <= 12; ++n) CHECK(p.exact(n) == oracle::power(coeffs, n, k)[k]);
    }
    CHECK(a.leading_description().find("gamma = 6") != std::string::npos);

    const LogEstimate lead = estimate_fixed_k(SeriesSpec::polynomial({2, 3, 1, 4}), 6, 100000);
    CHECK(err(lead, exact_log(SeriesSpec::polynomial({2, 3, 1, 4}), 6, 100000)) <= 0.01);
    CHECK(estimate_fixed_k(SeriesSpec::polynomial({1, 0, 1}), 3, 10).zero_flagged());
}

TEST_CASE("large-k regime") {
    const SeriesSpec e = SeriesSpec::exp();
    const std::uint64_t k = 1000000, n = 1000;
    const LogEstimate l = estimate_large_k(e, k, n);
    const double exact = k * std::log(double(n)) - oracle::log_factorial(double(k));
    CHECK(err(l, exact) <= 0.02);
    check_factor_sum(l);
    CHECK_THROWS_WITH_AS(estimate_large_k(SeriesSpec::affine(1, 1), 10, 2), doctest::Contains("uniform Gaussianity"),
                         PreconditionError);
    CHECK_THROWS_AS(estimate_large_k(SeriesSpec::exp_polynomial({0, 0, 1}), 10, 2), PreconditionError);
    CHECK(is_uniformly_gaussian(SeriesSpec::exp_polynomial({0, 1, 1})));

    const LogEstimate same = estimate_large_k(e, 500, 500);
    CHECK(*same.log_value == doctest::Approx(*estimate_comparable(e, 500, 500).log_value).epsilon(1e-13));
    CHECK(same.tau == doctest::Approx(1.0));
}

TEST_CASE("prefactor h(z)") {
    const SeriesSpec a11 = SeriesSpec::affine(1, 1);
    // Constant h is not a valid spec; the prefactor contributes exactly ln h(tau_n).
    const SeriesSpec one = SeriesSpec::affine(1, 1);
    const LogEstimate plain = estimate_comparable(a11, 300, 600);
    const LogEstimate with1 = estimate_with_prefactor(one, a11, 300, 600, PrefactorRegime::Comparable);
    CHECK(*with1.log_value - *plain.log_value == doctest::Approx(std::log(2.0)).epsilon(1e-13));
    CHECK(with1.factor("logH") == doctest::Approx(std::log(1 + with1.tau)));

    // h = 1/(1-z): coeff_k(h psi^n) = sum_{j<=k} C(n, j). k = n/3 keeps tau = 1/2 inside |z| < 1.
    auto partial_sum = [](unsigned long n, unsigned long k) {
        oracle::Q s = 0;
        for (unsigned long j = 0; j <= k; ++j) s += oracle::binomial(n, j);
        return oracle::log_q(s);
    };
    auto geo_err = [&](unsigned long n) {
        const LogEstimate e = estimate_with_prefactor(SeriesSpec::geometric(), a11, n / 3, n, PrefactorRegime::Comparable);
        return err(e, partial_sum(n, n / 3));
    };
    CHECK(geo_err(3000) < geo_err(300));
    CHECK(geo_err(3000) <= 0.01);
    // k = n/2 puts tau on h's singularity.
    CHECK_THROWS_AS(estimate_with_prefactor(SeriesSpec::geometric(), a11, 50, 100, PrefactorRegime::Comparable),
                    RangeError);

    // Small k: multiply by h(0).
    const LogEstimate sk = estimate_with_prefactor(SeriesSpec::affine(3, 1), SeriesSpec::exp(), 100, 100000,
                                                   PrefactorRegime::SmallK);
    CHECK(sk.factor("logH") == doctest::Approx(std::log(3.0)));

    // Fixed k, Q = 2, h = e^z: c_0 n^{k/2} / (k/2)! against C(n,2) + n/2 + 1/24.
    const SeriesSpec psi = SeriesSpec::polynomial({1, 0, 1});
    auto fixed_err = [&](unsigned long n) {
        const LogEstimate e = estimate_with_prefactor(SeriesSpec::exp(), psi, 4, n, PrefactorRegime::FixedK);
        const oracle::Q exact = oracle::binomial(n, 2) + oracle::Q(n, 2) + oracle::Q(1, 24);
        return err(e, oracle::log_q(exact));
    };
    CHECK(fixed_err(2000) < fixed_err(200));
    CHECK(fixed_err(2000) <= 1e-3);
    // Odd k picks j_0 = 1: c_1 n^{(k-1)/2}/((k-1)/2)!.
    const LogEstimate odd = estimate_with_prefactor(SeriesSpec::exp(), psi, 5, 1000, PrefactorRegime::FixedK);
    CHECK(*odd.log_value == doctest::Approx(2 * std::log(1000.0) - std::log(2.0)).epsilon(1e-13));
    CHECK(estimate_with_prefactor(SeriesSpec::polynomial({1, 0, 1}), psi, 3, 10, PrefactorRegime::FixedK).zero_flagged());
    CHECK_THROWS_AS(estimate_with_prefactor(one, psi, 4, 10, PrefactorRegime::Comparable), PreconditionError);
}

TEST_CASE("gauge zero rule") {
    // psi(z) = phi(z^2): coeff_{2k}(psi^n) = coeff_k(phi^n).
    const SeriesSpec phi = SeriesSpec::affine(1, 1);
    const SeriesSpec psi = SeriesSpec::polynomial({1, 0, 1});
    CHECK(estimate_comparable(psi, 301, 1000).zero_flagged());
    CHECK(*estimate_comparable(psi, 600, 1000).log_value ==
          doctest::Approx(*estimate_comparable(phi, 300, 1000).log_value).epsilon(1e-12));
    CHECK(estimate_comparable(psi, 600, 1000).factor("gaugeFactor") == doctest::Approx(std::log(2.0)));

    const SeriesSpec phi3 = SeriesSpec::polynomial({1, 2, 1, 3});
    const SeriesSpec psi3 = SeriesSpec::polynomial({1, 0, 0, 2, 0, 0, 1, 0, 0, 3});
    CHECK(estimate_comparable(psi3, 1000, 700).zero_flagged());
    CHECK(estimate_limit_ratio(psi3, 700, 1.5, 0.0, 1001).zero_flagged());
    CHECK(*estimate_comparable(psi3, 1200, 700).log_value ==
          doctest::Approx(*estimate_comparable(phi3, 400, 700).log_value).epsilon(1e-12));
    CHECK(*estimate_limit_ratio(psi3, 700, 1.5, 0.5, 1200).log_value ==
          doctest::Approx(*estimate_limit_ratio(phi3, 700, 0.5, 0.5 / 3, 400).log_value).epsilon(1e-12));

    const SeriesSpec bpsi = SeriesSpec::truncated({1, 0, 1}, 1.0, true);
    const SeriesSpec bphi = SeriesSpec::truncated({1, 1}, 1.0, true);
    CHECK(estimate_boundary(bpsi, 101, 100).zero_flagged());
    CHECK(*estimate_boundary(bpsi, 110, 100).log_value ==
          doctest::Approx(*estimate_boundary(bphi, 55, 100).log_value).epsilon(1e-12));

    CHECK(estimate_fixed_k(psi3, 5, 100).zero_flagged());
    CHECK(*estimate_fixed_k(psi3, 6, 100).log_value ==
          doctest::Approx(*estimate_fixed_k(phi3, 2, 100).log_value).epsilon(1e-12));
}

TEST_CASE("oracle ratios improve from n = 200 to n = 2000") {
    struct Case {
        const char* name;
        SeriesSpec spec;
        double ratio;
    };
    const std::vector<Case> comparable{{"affine", SeriesSpec::affine(1, 1), 0.5},
                                       {"geometric", SeriesSpec::geometric(), 1.0},
                                       {"exp", SeriesSpec::exp(), 1.0},
                                       {"binpow", SeriesSpec::binomial_power(3), 1.2},
                                       {"poly", SeriesSpec::polynomial({1, 2, 0, 1}), 0.8},
                                       {"exppoly", SeriesSpec::exp_polynomial({0, 1, 1}), 1.5}};
    for (const Case& c : comparable) {
        CAPTURE(c.name);
        auto e = [&](std::uint64_t n) {
            const auto k = static_cast<std::uint64_t>(c.ratio * n);
            return err(estimate_comparable(c.spec, k, n), exact_log(c.spec, k, n));
        };
        CHECK(e(2000) < e(200));
    }
    for (const Case& c : comparable) {
        CAPTURE(c.name);
        auto e = [&](std::uint64_t n) {
            const auto k = static_cast<std::uint64_t>(std::sqrt(double(n)));
            return err(estimate_small_k(c.spec, k, n), exact_log(c.spec, k, n));
        };
        CHECK(e(2000) < e(200));
    }
    for (const SeriesSpec& s : {SeriesSpec::exp(), SeriesSpec::exp_polynomial({0, 1, 1})}) {
        auto e = [&](std::uint64_t n) { return err(estimate_large_k(s, 10 * n, n), exact_log(s, 10 * n, n)); };
        CHECK(e(200) < 1);
        CHECK(e(2000) < e(200));
    }
    auto fk = [&](std::uint64_t n) {
        const SeriesSpec s = SeriesSpec::polynomial({1, 1, 1});
        return err(estimate_fixed_k(s, 4, n), exact_log(s, 4, n));
    };
    CHECK(fk(2000) < fk(200));
    auto sc = [&](std::uint64_t n) {
        const SeriesSpec s = SeriesSpec::geometric();
        const auto k = static_cast<std::uint64_t>(std::sqrt(double(n)));
        return err(estimate_small_k_closed(s, k, n, 3), exact_log(s, k, n));
    };
    CHECK(sc(2000) < sc(200));
}

TEST_CASE("suggest_regime") {
    const RegimeSuggestion a = suggest_regime(SeriesSpec::affine(1, 1), 500, 1000);
    CHECK(a.suggested == Regime::Comparable);
    REQUIRE(a.regimes.size() == 5);
    for (const auto& e : a.regimes)
        if (e.regime == Regime::LargeK) CHECK_FALSE(e.unmet.empty());

    CHECK(suggest_regime(SeriesSpec::exp(), 3, 1000).suggested == Regime::FixedK);
    CHECK(suggest_regime(SeriesSpec::exp(), 50, 100000).suggested == Regime::SmallK);
    CHECK(suggest_regime(SeriesSpec::exp(), 100000, 50).suggested == Regime::LargeK);
    CHECK(suggest_regime(SeriesSpec::truncated({1, 1}, 1.0, true), 500, 1000).suggested == Regime::Boundary);
    const RegimeSuggestion odd = suggest_regime(SeriesSpec::polynomial({1, 0, 1}), 301, 1000);
    CHECK(odd.suggested != Regime::Comparable);
}
