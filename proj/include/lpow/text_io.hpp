#pragma once

// Text forms shared by the command-line tool: the spec grammar, JSON
// encodings and CSV number formatting.
//
//   exp | geom | affine:a,b | binpow:d | poisson:r
//   poly:c0,c1,...[@R]            finite list; @R declares a finite radius
//   exppoly:c1,c2,...             e^{c1 z + c2 z^2 + ...}
//   trunc:path.csv@R[;gauge=Q]    prefix read from a file, one coefficient per line
//   trunclist:c0,c1,...@R[;gauge=Q]
//   mono:j                        initial generation only
//
// Numbers are rationals `p/q` or decimals (read exactly).

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "lpow/estimate.hpp"
#include "lpow/gaussianity.hpp"
#include "lpow/lagrangian.hpp"
#include "lpow/large_powers.hpp"
#include "lpow/spec.hpp"

namespace lpow {

/// Throws ParseError with the offset into `text` of the offending token.
SeriesSpec parse_spec(std::string_view text);
InitialSpec parse_initial(std::string_view text);

/// Comma-separated rationals; positions are relative to `text`.
std::vector<Rational> parse_rational_list(std::string_view text);

/// Coefficients from a `trunc:` file. Blank lines and `#` comments are skipped.
std::vector<Rational> read_coefficient_file(const std::string& path);

/// Scientific notation with 15 significant digits.
std::string csv_number(double x);

nlohmann::json to_json(const LogEstimate& e);
nlohmann::json to_json(const UpperEnvelope& e);
nlohmann::json to_json(const Pmf& p);
nlohmann::json to_json(const ArcReport& r);
nlohmann::json to_json(const RegimeSuggestion& s);

LogEstimate log_estimate_from_json(const nlohmann::json& j);
Pmf pmf_from_json(const nlohmann::json& j);
ArcReport arc_report_from_json(const nlohmann::json& j);

}  // namespace lpow
