#pragma once

// Page-turn trigger policies, fed one accepted ReadingPosition at a time.
//
// halfway: turn once the reader has been at or past `turn_fraction` of the
//          last system for `confirm_count` consecutive accepted positions.
// tempo:   fit reading velocity (page fraction per second) over a trailing
//          window and turn when the projected time to the end of the page
//          drops to `lead_time_sec`, provided the reader is in the last system.

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "pageflip/error.hpp"
#include "pageflip/filter.hpp"
#include "pageflip/layout.hpp"

namespace pageflip {

enum class PolicyKind { Halfway, Tempo };

constexpr std::string_view to_string(PolicyKind k) {
  return k == PolicyKind::Halfway ? "halfway" : "tempo";
}

inline PolicyKind parse_policy_kind(std::string_view s) {
  if (s == "halfway") return PolicyKind::Halfway;
  if (s == "tempo") return PolicyKind::Tempo;
  throw BadConfig("unknown policy '" + std::string(s) + "' (expected halfway or tempo)");
}

struct PolicyConfig {
  PolicyKind kind = PolicyKind::Halfway;
  double turn_fraction = 0.5;
  int confirm_count = 3;
  double window_sec = 3.0;
  std::size_t min_samples = 5;
  double min_velocity = 1e-4;  // page fraction per second
  double lead_time_sec = 1.0;

  void validate() const {
    if (!(turn_fraction > 0.0 && turn_fraction <= 1.0)) {
      throw BadConfig("turn_fraction must lie in (0, 1]");
    }
    if (confirm_count < 1) throw BadConfig("confirm_count must be >= 1");
    if (!(window_sec > 0.0)) throw BadConfig("window_sec must be > 0");
    if (min_samples < 2) throw BadConfig("min_samples must be >= 2");
    if (!(lead_time_sec > 0.0)) throw BadConfig("lead_time_sec must be > 0");
  }
};

struct TimedFraction {
  double t = 0.0;
  double frac_page = 0.0;
};

struct PolicyState {
  bool turned = false;
  int streak = 0;
  std::deque<TimedFraction> history;  // strictly increasing t
};

struct TurnDecision {
  std::optional<ReadingPosition> trigger;  // set = Turn, empty = Hold

  bool is_turn() const { return trigger.has_value(); }
  static TurnDecision hold() { return {}; }
  static TurnDecision turn(const ReadingPosition& p) { return {p}; }
};

struct PolicyStep {
  PolicyState state;
  TurnDecision decision;
};

inline PolicyStep halfway_step(PolicyState ps, const ReadingPosition& pos, const PageLayout& layout,
                               const PolicyConfig& cfg) {
  const bool in_region =
      pos.system_index == layout.last_index() && pos.frac_in_system >= cfg.turn_fraction;
  ps.streak = in_region ? ps.streak + 1 : 0;
  if (!ps.turned && ps.streak >= cfg.confirm_count) {
    ps.turned = true;
    return {std::move(ps), TurnDecision::turn(pos)};
  }
  return {std::move(ps), TurnDecision::hold()};
}

// Least-squares slope of frac_page over t, restricted to samples within
// window_sec of the newest one.
template <typename Range>
std::optional<double> tempo_estimate(const Range& history, const PolicyConfig& cfg) {
  if (std::empty(history)) return std::nullopt;
  const double newest = std::rbegin(history)->t;
  double n = 0, st = 0, sf = 0;
  for (const TimedFraction& s : history) {
    if (s.t < newest - cfg.window_sec) continue;
    n += 1;
    st += s.t;
    sf += s.frac_page;
  }
  if (n < static_cast<double>(cfg.min_samples)) return std::nullopt;
  const double mt = st / n;
  const double mf = sf / n;
  double sxx = 0, sxy = 0;
  for (const TimedFraction& s : history) {
    if (s.t < newest - cfg.window_sec) continue;
    sxx += (s.t - mt) * (s.t - mt);
    sxy += (s.t - mt) * (s.frac_page - mf);
  }
  if (sxx <= 0.0) return std::nullopt;
  const double slope = sxy / sxx;
  if (slope <= cfg.min_velocity) return std::nullopt;
  return slope;
}

inline PolicyStep tempo_step(PolicyState ps, const ReadingPosition& pos, const PageLayout& layout,
                             const PolicyConfig& cfg) {
  if (!ps.history.empty() && ps.history.back().t == pos.t) {
    ps.history.back().frac_page = pos.frac_page;
  } else {
    ps.history.push_back({pos.t, pos.frac_page});
  }
  while (ps.history.front().t < pos.t - cfg.window_sec) ps.history.pop_front();

  const std::optional<double> v = tempo_estimate(ps.history, cfg);
  if (!v || ps.turned || pos.system_index != layout.last_index()) {
    return {std::move(ps), TurnDecision::hold()};
  }
  const double eta = (1.0 - pos.frac_page) / *v;
  if (eta <= cfg.lead_time_sec) {
    ps.turned = true;
    return {std::move(ps), TurnDecision::turn(pos)};
  }
  return {std::move(ps), TurnDecision::hold()};
}

inline PolicyStep policy_step(PolicyState ps, const ReadingPosition& pos, const PageLayout& layout,
                              const PolicyConfig& cfg) {
  return cfg.kind == PolicyKind::Halfway ? halfway_step(std::move(ps), pos, layout, cfg)
                                         : tempo_step(std::move(ps), pos, layout, cfg);
}

}  // namespace pageflip
