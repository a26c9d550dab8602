#pragma once

// Tracker traces: one JSON object per line,
//   {"t": s, "u": px, "v": px, "w": px, "h": px, "conf": [0,1]}
// with strictly increasing t.

#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pageflip/error.hpp"
#include "pageflip/filter.hpp"

namespace pageflip {

inline nlohmann::ordered_json prediction_to_json(const TrackerPrediction& p) {
  return {{"t", p.t}, {"u", p.u}, {"v", p.v}, {"w", p.w}, {"h", p.h}, {"conf", p.conf}};
}

inline TrackerPrediction prediction_from_json(const nlohmann::json& j, std::size_t line_no) {
  TrackerPrediction p;
  try {
    p.t = j.at("t").get<double>();
    p.u = j.at("u").get<double>();
    p.v = j.at("v").get<double>();
    p.w = j.at("w").get<double>();
    p.h = j.at("h").get<double>();
    p.conf = j.at("conf").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(line_no, e.what());
  }
  if (!std::isfinite(p.t)) throw ParseError(line_no, "t must be finite");
  if (!(p.conf >= 0.0 && p.conf <= 1.0)) throw ParseError(line_no, "conf outside [0, 1]");
  if (!(p.w >= 0.0) || !(p.h >= 0.0)) throw ParseError(line_no, "negative box size");
  return p;
}

inline std::vector<TrackerPrediction> parse_trace(std::istream& in) {
  std::vector<TrackerPrediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, e.what());
    }
    const TrackerPrediction p = prediction_from_json(j, line_no);
    if (!out.empty() && !(p.t > out.back().t)) throw NonMonotonicTrace(line_no);
    out.push_back(p);
  }
  return out;
}

inline std::vector<TrackerPrediction> load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace " + path);
  return parse_trace(in);
}

inline void write_trace(std::ostream& out, const std::vector<TrackerPrediction>& preds) {
  for (const TrackerPrediction& p : preds) out << prediction_to_json(p).dump() << '\n';
}

}  // namespace pageflip
