#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(LPOW_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("coeff") {
    const Run exact = run("coeff --spec affine:1,1 --k 2 --n 4 --exact");
    CHECK(exact.code == 0);
    CHECK(exact.out == "6\n");

    const Run j = run("coeff --spec affine:1,1 --k 1000 --n 2000 --regime comparable --json");
    REQUIRE(j.code == 0);
    const auto doc = nlohmann::json::parse(j.out);
    CHECK(doc.at("regime") == "comparable");
    CHECK(doc.at("logValue").get<double>() ==
          doctest::Approx(2001 * std::log(2.0) - 0.5 * std::log(4000 * std::numbers::pi)).epsilon(1e-12));

    CHECK(run("coeff --spec exp --k 3 --n 2 --exact").out == "4/3\n");
    CHECK(run("coeff --spec exp --k 100 --n 100 --exact --digits 6").out == "1.07151e+42\n");
    CHECK(run("coeff --spec geom --k 3 --n 2 --regime fixed-k --json").code == 0);
    CHECK(run("coeff --spec exp --k 99 --n 100 --regime limit-ratio --L 1 --json").code == 0);
    const Run pre = run("coeff --spec affine:1,1 --k 100 --n 300 --regime comparable --prefactor geom --json");
    CHECK(pre.code == 0);
    CHECK(pre.out.find("logH") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(run("").code == 2);
    CHECK(run("coeff --spec bogus --k 1 --n 1").code == 2);
    CHECK(run("coeff --spec exp --k x --n 1").code == 2);
    CHECK(run("coeff --spec exp --n 1").code == 2);
    CHECK(run("coeff --spec poly:1,0,1 --k 2 --n 10 --regime small-k").code == 1);
    CHECK(run("coeff --spec affine:1,1 --k 10 --n 2 --regime large-k").code == 1);
    CHECK(run("pmf --offspring exp --t 1.5 --n-max 3").code == 1);
    CHECK(run("gauss --spec affine:1,1 --t 1 --n 2").code == 1);
    CHECK(run("hayman-cut --g 0,1 --n 1 --t 10").code == 1);
}

TEST_CASE("compare") {
    const Run r = run("compare --spec affine:1,1 --regime comparable --k-rule half-n --n-list 400,100,200");
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 4);
    CHECK(ls[0] == "n,k,logExact,logEstimate,ratio");
    CHECK(ls[1].rfind("100,50,", 0) == 0);
    CHECK(ls[3].rfind("400,200,", 0) == 0);
    for (std::size_t i = 1; i < ls.size(); ++i) {
        double n, k, le, la, ratio;
        REQUIRE(std::sscanf(ls[i].c_str(), "%lf,%lf,%lf,%lf,%lf", &n, &k, &le, &la, &ratio) == 5);
        CHECK(std::isfinite(le));
        CHECK(std::isfinite(la));
        CHECK(ratio == doctest::Approx(std::exp(la - le)).epsilon(1e-12));
    }
    CHECK(run("compare --spec exp --regime small-k --k-rule sqrt-n --n-list 100,1000").code == 0);
    CHECK(run("compare --spec exp --regime fixed-k --k-rule fixed:3 --n-list 10,20").code == 0);
    CHECK(run("compare --spec affine:1,1 --regime limit-ratio --k-rule ratio:0.5,1 --n-list 256,4096").code == 0);
    CHECK(run("compare --spec exp --regime comparable --k-rule ratio:x --n-list 10").code == 2);
}

TEST_CASE("lagrange") {
    CHECK(run("lagrange --spec binpow:2 --n 5").out == "42\n");
    CHECK(run("lagrange --spec exp --n 3 --q 2").out == "2\n");
    const Run a = run("lagrange --spec exp --n 200 --asymptotic --json");
    REQUIRE(a.code == 0);
    CHECK(nlohmann::json::parse(a.out).at("regime") == "omm");
    const Run env = run("lagrange --spec poly:1,1/4@1 --n 20 --asymptotic --json");
    REQUIRE(env.code == 0);
    CHECK(nlohmann::json::parse(env.out).at("note") == "little-o, not equivalent");
    const Run rad = run("lagrange-radius --spec binpow:2");
    CHECK(std::stod(rad.out) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("pmf and simulate") {
    const Run bt = run("pmf --offspring exp --t 0.5 --initial mono:1 --n-max 2 --borel-tanner 1");
    REQUIRE(bt.code == 0);
    const auto ls = lines(bt.out);
    CHECK(ls[0] == "n,pmf");
    CHECK(ls.back() == "2,1.83939720585721e-01");

    const Run series = run("pmf --offspring exp --t 0.5 --n-max 2");
    CHECK(lines(series.out)[3] == "2,1.83939720585721e-01");
    CHECK(series.out.find("# tailMass,") != std::string::npos);

    const Run ex = run("pmf --offspring affine:1,1 --t 1 --n-max 4 --exact --json");
    REQUIRE(ex.code == 0);
    CHECK(nlohmann::json::parse(ex.out).at("exact")[4] == "1/16");

    CHECK(run("pmf --offspring exp --t 0.7 --initial exp --s 0.8 --n-max 5 --poisson-poisson").code == 0);
    CHECK(run("pmf --offspring exp --t 0.7 --initial mono:2 --n-max 40 --asymptotic").code == 0);

    const Run sim = run("simulate --offspring exp --t 0.6 --samples 2000 --seed 5 --cap 30");
    REQUIRE(sim.code == 0);
    CHECK(lines(sim.out)[0] == "n,count,frequency");
    CHECK(sim.out.find("escaped,") != std::string::npos);
    CHECK(run("simulate --offspring exp --t 0.6 --samples 2000 --seed 5 --cap 30").out == sim.out);
}

TEST_CASE("gauss, hayman-cut and suggest-regime") {
    const auto g = nlohmann::json::parse(run("gauss --spec exp --t 50 --n 2").out);
    const auto g1 = nlohmann::json::parse(run("gauss --spec exp --t 100 --n 1").out);
    CHECK(g.at("integralI").get<double>() == doctest::Approx(g1.at("integralI").get<double>()).epsilon(1e-6));

    const auto h = nlohmann::json::parse(run("hayman-cut --g 1,0,1 --n 2 --t 3").out);
    CHECK(h.at("quadraturePoints") == 4096);
    CHECK(h.at("cut").get<double>() == doctest::Approx(std::pow(3.0, -15.0 / 12) * std::pow(2.0, -5.0 / 12)));

    const Run s = run("suggest-regime --spec exp --k 3 --n 1000");
    CHECK(lines(s.out)[0] == "fixed-k");
    CHECK(nlohmann::json::parse(run("suggest-regime --spec exp --k 3 --n 1000 --json").out).at("suggested") ==
          "fixed-k");
}
