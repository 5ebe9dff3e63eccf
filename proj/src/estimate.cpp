#include "lpow/estimate.hpp"

#include <array>
#include <utility>

namespace lpow {

namespace {

constexpr std::array<std::pair<Regime, std::string_view>, 13> kNames{{
    {Regime::Comparable, "comparable"},
    {Regime::LimitRatio, "limit-ratio"},
    {Regime::Boundary, "boundary"},
    {Regime::SmallK, "small-k"},
    {Regime::SmallKUnsimplified, "small-k-unsimplified"},
    {Regime::SmallKClosed, "small-k-closed"},
    {Regime::FixedK, "fixed-k"},
    {Regime::LargeK, "large-k"},
    {Regime::Omm, "omm"},
    {Regime::OmmBoundary, "omm-boundary"},
    {Regime::OmmPower, "omm-power"},
    {Regime::AffineExact, "affine-exact"},
    {Regime::LagrangianPmf, "lagrangian-pmf"},
}};

}  // namespace

std::string_view regime_name(Regime r) {
    for (const auto& [reg, name] : kNames)
        if (reg == r) return name;
    return "unknown";
}

std::optional<Regime> regime_from_name(std::string_view name) {
    for (const auto& [reg, n] : kNames)
        if (n == name) return reg;
    return std::nullopt;
}

double LogEstimate::factor(std::string_view label) const {
    for (const auto& f : factors)
        if (f.label == label) return f.value;
    return 0.0;
}

LogEstimate LogEstimate::from_factors(Regime regime, double tau, std::vector<Factor> factors) {
    LogEstimate e;
    e.regime = regime;
    e.tau = tau;
    double sum = 0.0;
    for (const auto& f : factors) sum += f.value;
    e.factors = std::move(factors);
    e.log_value = sum;
    return e;
}

LogEstimate LogEstimate::zero(Regime regime) {
    LogEstimate e;
    e.regime = regime;
    return e;
}

}  // namespace lpow
