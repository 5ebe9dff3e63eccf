#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lpow/errors.hpp"
#include "lpow/gaussianity.hpp"
#include "lpow/khinchin.hpp"

using namespace lpow;

namespace {

const double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("char_fn examples") {
    CHECK(std::abs(char_fn(SeriesSpec::exp(), 2.0, 0.0) - 1.0) <= 1e-15);
    CHECK(std::abs(char_fn(SeriesSpec::exp(), 1.5, kPi) - std::exp(-3.0)) <= 1e-15);
    // Affine: (a + b t e^{i theta}) / (a + b t).
    const std::complex<double> z = std::polar(0.8, 1.1);
    CHECK(std::abs(char_fn(SeriesSpec::affine(2, 3), 0.8, 1.1) - (2.0 + 3.0 * z) / 4.4) <= 1e-15);
    // Geometric: (1 - t) / (1 - t e^{i theta}).
    const std::complex<double> w = std::polar(0.6, 2.0);
    CHECK(std::abs(char_fn(SeriesSpec::geometric(), 0.6, 2.0) - 0.4 / (1.0 - w)) <= 1e-14);
    CHECK_THROWS_AS(char_fn(SeriesSpec::geometric(), 1.0, 0.3), RangeError);
}

TEST_CASE("characteristic functions are bounded by 1") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> theta(-kPi, kPi), u(0.01, 0.99);
    const std::vector<SeriesSpec> specs{SeriesSpec::exp(), SeriesSpec::geometric(), SeriesSpec::affine(1, 2),
                                        SeriesSpec::polynomial({1, 3, 0, 2}), SeriesSpec::exp_polynomial({0, 1, 0, 1}),
                                        SeriesSpec::binomial_power(4)};
    for (const auto& s : specs) {
        const double tmax = std::isfinite(s.radius()) ? s.radius() : 20.0;
        bool ok = true;
        for (int i = 0; i < 10000; ++i) ok = ok && std::abs(char_fn(s, u(rng) * tmax, theta(rng))) <= 1 + 1e-12;
        CHECK(ok);
        // Gauge 1: strict off 2 pi Z.
        for (double th : {0.5, 1.5, kPi}) CHECK(std::abs(char_fn(s, 0.5 * tmax, th)) < 1 - 1e-6);
        CHECK(std::abs(char_fn(s, 0.5 * tmax, 2 * kPi)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    // Gauge 2 reaches modulus 1 at theta = pi.
    CHECK(std::abs(char_fn(SeriesSpec::polynomial({1, 0, 1}), 0.7, kPi)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gaussian_integral_I scaling and decay") {
    const SeriesSpec e = SeriesSpec::exp();
    const double ref = gaussian_integral_I(e, 100.0, 1);
    for (auto [n, t] : std::vector<std::pair<std::uint64_t, double>>{{2, 50}, {4, 25}, {10, 10}})
        CHECK(std::fabs(gaussian_integral_I(e, t, n) - ref) <= 1e-6 * (1 + ref));
    const double i25 = gaussian_integral_I(e, 25.0, 1), i400 = gaussian_integral_I(e, 400.0, 1);
    CHECK(i400 < ref);
    CHECK(ref < i25);
    // Triangle bound at small t.
    const double small = gaussian_integral_I(e, 0.2, 1);
    CHECK(small >= 0);
    CHECK(small <= 2 * kPi * std::sqrt(0.2) + std::sqrt(2 * kPi));

    const SeriesSpec ep = SeriesSpec::exp_polynomial({0, 1, 1});
    CHECK(gaussian_integral_I(ep, 20.0, 1) < gaussian_integral_I(ep, 5.0, 1));
    CHECK_THROWS_AS(gaussian_integral_I(SeriesSpec::affine(1, 1), 1.0, 3), PreconditionError);
    CHECK_THROWS_AS(gaussian_integral_I(SeriesSpec::geometric(), 0.5, 3), PreconditionError);
}

TEST_CASE("omega_g") {
    CHECK(omega_g({0, 1}, 3.0) == doctest::Approx(0.5));
    CHECK(omega_g({0, 0, 1}, 3.0) == doctest::Approx(12.0));
    CHECK(omega_g({0, 0, 0, 1}, 2.0) == doctest::Approx(36.0));
    // Linear in g.
    CHECK(omega_g({0, 2, 1, 1}, 1.5) ==
          doctest::Approx(2 * omega_g({0, 1}, 1.5) + omega_g({0, 0, 1}, 1.5) + omega_g({0, 0, 0, 1}, 1.5)));
}

TEST_CASE("hayman_cut_check for e^z") {
    const ArcReport a = hayman_cut_check({0, 1}, 1, 100.0);
    const ArcReport b = hayman_cut_check({0, 1}, 4, 100.0);
    const ArcReport c = hayman_cut_check({0, 1}, 1, 400.0);
    CHECK(a.cut == doctest::Approx(std::pow(100.0, -5.0 / 12)));
    CHECK(a.quadrature_points == kArcGridPoints);
    CHECK(a.cut > 0);
    CHECK(a.cut < kPi);
    CHECK(b.major_sup < a.major_sup);
    CHECK(c.major_sup < a.major_sup);
    CHECK(b.integral_i < a.integral_i);
    // For e^z only nt matters.
    CHECK(b.major_sup == doctest::Approx(c.major_sup).epsilon(1e-10));

    // minorSup = sqrt(nt) exp(nt (cos h - 1)), written with sin^2 to avoid cancellation; it peaks near nt = 6^6 and decays beyond.
    for (const ArcReport& r : {a, b, c, hayman_cut_check({0, 1}, 1, 1e5)}) {
        const double x = double(r.n) * r.t;
        CHECK(r.minor_sup == doctest::Approx(std::sqrt(x) * std::exp(-2 * x * std::pow(std::sin(r.cut / 2), 2))).epsilon(1e-12));
    }
    CHECK(hayman_cut_check({0, 1}, 1, 1e6).minor_sup < hayman_cut_check({0, 1}, 1, 1e5).minor_sup);
    CHECK(hayman_cut_check({0, 1}, 10, 1e6).minor_sup < hayman_cut_check({0, 1}, 1, 1e6).minor_sup);
}

TEST_CASE("hayman_cut_check for e^{z + z^3}") {
    const std::vector<Rational> g{0, 1, 0, 1};
    const ArcReport r1 = hayman_cut_check(g, 1, 1.0);
    const ArcReport r2 = hayman_cut_check(g, 4, 2.0);
    const ArcReport r3 = hayman_cut_check(g, 1, 10.0);
    CHECK(r2.cut == doctest::Approx(std::pow(2.0, -15.0 / 12) * std::pow(4.0, -5.0 / 12)));
    CHECK(r2.major_sup < r1.major_sup);
    CHECK(r3.major_sup < r2.major_sup);
    CHECK(r2.minor_sup < r1.minor_sup);
    CHECK(r3.minor_sup < r2.minor_sup);
    // g[0] is the constant term and must vanish.
    CHECK_THROWS_AS(hayman_cut_check({1, 0, 1}, 2, 3.0), PreconditionError);

    CHECK_THROWS_AS(hayman_cut_check({0, 0, 1}, 2, 3.0), PreconditionError);
    CHECK_THROWS_AS(hayman_cut_check({0, 1}, 2, 0.5), RangeError);
}
