#pragma once

// Flat JSON config files. Every key names a config field directly, e.g.
//   {"window": 41, "turn_fraction": 0.6, "blackout_sec": 1.5}
// Keys belonging to other subsystems are allowed; unknown keys are not.

#include <fstream>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "pageflip/error.hpp"
#include "pageflip/layout.hpp"
#include "pageflip/session.hpp"
#include "pageflip/simulate.hpp"

namespace pageflip {

inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys{
      // layout
      "window", "offset", "line_threshold_rel", "staff_gap_factor", "staves_per_system",
      "system_gap_factor", "col_threshold_rel",
      // filter
      "backward_conf", "backtrack_eps", "max_snap", "min_conf",
      // policy
      "kind", "turn_fraction", "confirm_count", "window_sec", "min_samples", "min_velocity",
      "lead_time_sec",
      // session
      "rate_hz", "blackout_sec", "device_timeout_ms",
      // simulation
      "seconds_per_page", "noise_px", "outlier_prob", "outlier_conf_range", "inlier_conf_range",
      "seed"};
  return keys;
}

inline nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadConfig("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw BadConfig("invalid JSON in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw BadConfig("config " + path + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known_config_keys().count(key)) throw BadConfig("unknown config key '" + key + "'");
  }
  return j;
}

namespace detail {

template <typename T>
void take(const nlohmann::json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw BadConfig(std::string("config key '") + key + "' has the wrong type");
  }
}

inline void take_range(const nlohmann::json& j, const char* key, ConfRange& r) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw BadConfig(std::string("config key '") + key + "' must be [lo, hi]");
  }
  r = {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace detail

inline void apply_config(const nlohmann::json& j, LayoutConfig& c) {
  detail::take(j, "window", c.window);
  detail::take(j, "offset", c.offset);
  detail::take(j, "line_threshold_rel", c.line_threshold_rel);
  detail::take(j, "staff_gap_factor", c.staff_gap_factor);
  detail::take(j, "staves_per_system", c.staves_per_system);
  detail::take(j, "system_gap_factor", c.system_gap_factor);
  detail::take(j, "col_threshold_rel", c.col_threshold_rel);
  c.validate();
}

inline void apply_config(const nlohmann::json& j, FilterConfig& c) {
  detail::take(j, "backward_conf", c.backward_conf);
  detail::take(j, "backtrack_eps", c.backtrack_eps);
  if (j.contains("max_snap")) {
    double v = 0;
    detail::take(j, "max_snap", v);
    c.max_snap = v;
  }
  detail::take(j, "min_conf", c.min_conf);
  c.validate();
}

inline void apply_config(const nlohmann::json& j, PolicyConfig& c) {
  if (j.contains("kind")) {
    std::string k;
    detail::take(j, "kind", k);
    c.kind = parse_policy_kind(k);
  }
  detail::take(j, "turn_fraction", c.turn_fraction);
  detail::take(j, "confirm_count", c.confirm_count);
  detail::take(j, "window_sec", c.window_sec);
  detail::take(j, "min_samples", c.min_samples);
  detail::take(j, "min_velocity", c.min_velocity);
  detail::take(j, "lead_time_sec", c.lead_time_sec);
  c.validate();
}

inline void apply_config(const nlohmann::json& j, SessionConfig& c) {
  detail::take(j, "rate_hz", c.rate_hz);
  detail::take(j, "blackout_sec", c.blackout_sec);
  detail::take(j, "device_timeout_ms", c.device_timeout_ms);
  apply_config(j, c.filter);
  apply_config(j, c.policy);
  c.validate();
}

inline void apply_config(const nlohmann::json& j, SyntheticConfig& c) {
  detail::take(j, "seconds_per_page", c.seconds_per_page);
  detail::take(j, "rate_hz", c.rate_hz);
  detail::take(j, "noise_px", c.noise_px);
  detail::take(j, "outlier_prob", c.outlier_prob);
  detail::take_range(j, "outlier_conf_range", c.outlier_conf);
  detail::take_range(j, "inlier_conf_range", c.inlier_conf);
  detail::take(j, "seed", c.seed);
  c.validate();
}

}  // namespace pageflip
