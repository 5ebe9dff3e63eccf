#include "lpow/text_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "lpow/errors.hpp"

namespace lpow {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

Rational parse_at(std::string_view token, std::size_t offset) {
    const std::string t = trim(token);
    const std::size_t lead = token.find_first_not_of(" \t");
    try {
        return parse_rational(t);
    } catch (const ParseError& e) {
        throw e.shifted(offset + (lead == std::string_view::npos ? 0 : lead));
    }
}

double parse_double_at(std::string_view token, std::size_t offset) {
    const std::string t = trim(token);
    if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
    return parse_at(token, offset).get_d();
}

unsigned parse_unsigned_at(std::string_view token, std::size_t offset) {
    const Rational q = parse_at(token, offset);
    if (q.get_den() != 1 || q < 0 || q > std::numeric_limits<unsigned>::max())
        throw ParseError("expected a nonnegative integer", offset);
    return static_cast<unsigned>(q.get_num().get_ui());
}

std::vector<Rational> parse_list_at(std::string_view text, std::size_t offset) {
    try {
        return parse_rational_list(text);
    } catch (const ParseError& e) {
        throw e.shifted(offset);
    }
}

// Parses "@R[;gauge=Q]" starting at `at` (the '@').
struct RadiusSuffix {
    double radius;
    std::optional<unsigned> gauge;
};

RadiusSuffix parse_radius_suffix(std::string_view text, std::size_t at) {
    RadiusSuffix out{};
    const std::size_t semi = text.find(';', at);
    const std::size_t end = semi == std::string_view::npos ? text.size() : semi;
    if (end == at + 1) throw ParseError("missing radius after '@'", at + 1);
    out.radius = parse_double_at(text.substr(at + 1, end - at - 1), at + 1);
    if (semi != std::string_view::npos) {
        const std::string_view opt = text.substr(semi + 1);
        constexpr std::string_view key = "gauge=";
        if (opt.substr(0, key.size()) != key) throw ParseError("expected 'gauge=Q'", semi + 1);
        out.gauge = parse_unsigned_at(opt.substr(key.size()), semi + 1 + key.size());
    }
    return out;
}

SeriesSpec build(std::string_view text) {
    const std::size_t colon = text.find(':');
    const std::string head(text.substr(0, colon));
    const std::size_t body_at = colon == std::string_view::npos ? text.size() : colon + 1;
    const std::string_view body = text.substr(body_at);

    auto no_body = [&](SeriesSpec s) {
        if (colon != std::string_view::npos) throw ParseError("'" + head + "' takes no arguments", colon);
        return s;
    };
    auto need_body = [&] {
        if (colon == std::string_view::npos || body.empty())
            throw ParseError("'" + head + "' requires arguments after ':'", text.size());
    };

    if (head == "exp") return no_body(SeriesSpec::exp());
    if (head == "geom") return no_body(SeriesSpec::geometric());
    if (head == "affine") {
        need_body();
        const auto c = parse_list_at(body, body_at);
        if (c.size() != 2) throw ParseError("affine expects exactly two numbers a,b", body_at);
        return SeriesSpec::affine(c[0], c[1]);
    }
    if (head == "binpow") {
        need_body();
        return SeriesSpec::binomial_power(parse_unsigned_at(body, body_at));
    }
    if (head == "poisson") {
        need_body();
        return SeriesSpec::poisson_pgf(parse_double_at(body, body_at));
    }
    if (head == "exppoly") {
        need_body();
        std::vector<Rational> g = parse_list_at(body, body_at);
        g.insert(g.begin(), Rational(0));
        return SeriesSpec::exp_polynomial(std::move(g));
    }
    if (head == "poly") {
        need_body();
        const std::size_t at = body.find('@');
        if (at == std::string_view::npos) return SeriesSpec::polynomial(parse_list_at(body, body_at));
        const RadiusSuffix rs = parse_radius_suffix(text, body_at + at);
        if (rs.gauge) throw ParseError("gauge assertions apply to truncated lists only", body_at + at);
        return SeriesSpec::truncated(parse_list_at(body.substr(0, at), body_at), rs.radius, true);
    }
    if (head == "trunc" || head == "trunclist") {
        need_body();
        const std::size_t at = body.find('@');
        if (at == std::string_view::npos) throw ParseError("'" + head + "' requires '@R'", text.size());
        const RadiusSuffix rs = parse_radius_suffix(text, body_at + at);
        std::vector<Rational> c;
        if (head == "trunclist") {
            c = parse_list_at(body.substr(0, at), body_at);
        } else {
            const std::string path = trim(body.substr(0, at));
            try {
                c = read_coefficient_file(path);
            } catch (const ParseError& e) {
                // File offsets do not map into the spec text; point at the path instead.
                const std::string where =
                    e.position() > 0 ? " (byte " + std::to_string(e.position()) + " of '" + path + "')" : "";
                throw ParseError(e.message() + where, body_at);
            }
        }
        return SeriesSpec::truncated(std::move(c), rs.radius, false, rs.gauge);
    }
    throw ParseError("unknown series kind '" + head + "'", 0);
}

json factors_json(const std::vector<Factor>& fs) {
    json arr = json::array();
    for (const auto& f : fs) arr.push_back({{"label", f.label}, {"value", f.value}});
    return arr;
}

json nullable(double x) { return std::isnan(x) ? json(nullptr) : json(x); }

double from_nullable(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

SeriesSpec parse_spec(std::string_view text) {
    try {
        return build(text);
    } catch (const PreconditionError& e) {
        throw ParseError(std::string("invalid spec: ") + e.what(), 0);
    }
}

InitialSpec parse_initial(std::string_view text) {
    constexpr std::string_view mono = "mono:";
    if (text.substr(0, mono.size()) == mono) {
        const unsigned j = parse_unsigned_at(text.substr(mono.size()), mono.size());
        if (j < 1) throw ParseError("mono:j requires j >= 1", mono.size());
        return Monomial{j};
    }
    return parse_spec(text);
}

std::vector<Rational> parse_rational_list(std::string_view text) {
    std::vector<Rational> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
        out.push_back(parse_at(text.substr(start, end - start), start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<Rational> read_coefficient_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open coefficient file '" + path + "'", 0);
    std::vector<Rational> out;
    std::string line;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        const std::string body = trim(std::string_view(line).substr(0, hash));
        if (!body.empty()) out.push_back(parse_at(std::string_view(line).substr(0, hash), offset));
        offset += line.size() + 1;
    }
    if (out.empty()) throw ParseError("coefficient file '" + path + "' has no entries", 0);
    return out;
}

std::string csv_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.14e", x == 0 ? 0.0 : x);  // no "-0"
    return buf;
}

json to_json(const LogEstimate& e) {
    return {
        {"regime", std::string(regime_name(e.regime))},
        {"tau", nullable(e.tau)},
        {"logValue", e.log_value ? json(*e.log_value) : json(nullptr)},
        {"zeroFlagged", e.zero_flagged()},
        {"factors", factors_json(e.factors)},
    };
}

json to_json(const UpperEnvelope& e) {
    return {
        {"kind", "upperEnvelope"},
        {"logValue", e.log_value},
        {"radius", e.radius},
        {"factors", factors_json(e.factors)},
        {"note", e.note},
    };
}

json to_json(const Pmf& p) {
    json j{{"nMax", p.n_max}, {"masses", p.masses}, {"tailMass", p.tail_mass}};
    if (p.exact) {
        json ex = json::array();
        for (const auto& q : *p.exact) ex.push_back(to_string(q));
        j["exact"] = ex;
    }
    return j;
}

json to_json(const ArcReport& r) {
    return {
        {"n", r.n},
        {"t", r.t},
        {"cut", r.cut},
        {"majorSup", r.major_sup},
        {"minorSup", r.minor_sup},
        {"integralI", r.integral_i},
        {"quadraturePoints", r.quadrature_points},
    };
}

json to_json(const RegimeSuggestion& s) {
    json regimes = json::array();
    for (const auto& e : s.regimes)
        regimes.push_back({{"regime", std::string(regime_name(e.regime))}, {"unmet", e.unmet}});
    return {{"suggested", std::string(regime_name(s.suggested))}, {"regimes", regimes}};
}

LogEstimate log_estimate_from_json(const json& j) {
    LogEstimate e;
    const auto r = regime_from_name(j.at("regime").get<std::string>());
    if (!r) throw ParseError("unknown regime '" + j.at("regime").get<std::string>() + "'", 0);
    e.regime = *r;
    e.tau = from_nullable(j.at("tau"));
    if (!j.at("logValue").is_null()) e.log_value = j.at("logValue").get<double>();
    for (const auto& f : j.at("factors")) e.factors.push_back({f.at("label").get<std::string>(), f.at("value").get<double>()});
    return e;
}

Pmf pmf_from_json(const json& j) {
    Pmf p;
    p.n_max = j.at("nMax").get<std::uint64_t>();
    p.masses = j.at("masses").get<std::vector<double>>();
    p.tail_mass = j.at("tailMass").get<double>();
    if (j.contains("exact")) {
        std::vector<Rational> ex;
        for (const auto& s : j.at("exact")) ex.push_back(parse_rational(s.get<std::string>()));
        p.exact = std::move(ex);
    }
    return p;
}

ArcReport arc_report_from_json(const json& j) {
    ArcReport r;
    r.n = j.at("n").get<std::uint64_t>();
    r.t = j.at("t").get<double>();
    r.cut = j.at("cut").get<double>();
    r.major_sup = j.at("majorSup").get<double>();
    r.minor_sup = j.at("minorSup").get<double>();
    r.integral_i = j.at("integralI").get<double>();
    r.quadrature_points = j.at("quadraturePoints").get<unsigned>();
    return r;
}

}  // namespace lpow
