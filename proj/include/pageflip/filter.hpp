#pragma once

// Reading-order filter for raw tracker predictions.
//
// A page is read left to right, top to bottom. The filter starts every page
// at the top left of system 0 and accepts a prediction only if it keeps to
// that order: no skipping over a system, and no backward move unless the
// tracker is confident about it. Rejections are values, never exceptions,
// and leave the reading position untouched.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "pageflip/error.hpp"
#include "pageflip/layout.hpp"

namespace pageflip {

// One output of the score follower, in page pixel coordinates.
struct TrackerPrediction {
  double t = 0.0;     // seconds since session start
  double u = 0.0;     // bbox center x
  double v = 0.0;     // bbox center y
  double w = 0.0;
  double h = 0.0;
  double conf = 0.0;  // [0, 1]

  bool operator==(const TrackerPrediction&) const = default;
};

struct ReadingPosition {
  int page_index = 0;
  int system_index = 0;
  double x = 0.0;
  double frac_in_system = 0.0;
  double frac_page = 0.0;
  double t = 0.0;

  bool operator==(const ReadingPosition&) const = default;
};

struct FilterConfig {
  double backward_conf = 0.5;
  double backtrack_eps = 10.0;           // px of same-system regression tolerated
  std::optional<double> max_snap;        // unset: half the median system height
  double min_conf = 0.0;                 // 0 disables the general gate

  void validate() const {
    if (!(backward_conf >= 0.0 && backward_conf <= 1.0)) {
      throw BadConfig("backward_conf must lie in [0, 1]");
    }
    if (!(backtrack_eps >= 0.0)) throw BadConfig("backtrack_eps must be >= 0");
    if (max_snap && !(*max_snap >= 0.0)) throw BadConfig("max_snap must be >= 0");
    if (!(min_conf >= 0.0 && min_conf <= 1.0)) throw BadConfig("min_conf must lie in [0, 1]");
  }
};

struct FilterState {
  int page_index = 0;
  int current_system = 0;
  double current_x = 0.0;
  std::int64_t accepted_count = 0;
  std::int64_t rejected_count = 0;
  double last_t = -std::numeric_limits<double>::infinity();

  bool operator==(const FilterState&) const = default;
};

enum class RejectReason {
  OffSystem,
  NonAdjacentJump,
  LowConfidenceBackward,
  LowConfidence,
  NonMonotonicTime,
};

constexpr std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::OffSystem: return "off_system";
    case RejectReason::NonAdjacentJump: return "non_adjacent_jump";
    case RejectReason::LowConfidenceBackward: return "low_confidence_backward";
    case RejectReason::LowConfidence: return "low_confidence";
    case RejectReason::NonMonotonicTime: return "non_monotonic_time";
  }
  return "unknown";
}

struct Accept {
  ReadingPosition position;
};

struct Reject {
  RejectReason reason;
};

using FilterOutcome = std::variant<Accept, Reject>;

struct FilterStep {
  FilterState state;
  FilterOutcome outcome;

  bool accepted() const { return std::holds_alternative<Accept>(outcome); }
};

struct Snap {
  int system_index = 0;
  double x = 0.0;
};

inline double default_max_snap(const PageLayout& layout) {
  std::vector<double> heights;
  for (const System& s : layout.systems) heights.push_back(s.height());
  return 0.5 * detail::median(std::move(heights));
}

inline double effective_max_snap(const PageLayout& layout, const FilterConfig& cfg) {
  return cfg.max_snap ? *cfg.max_snap : default_max_snap(layout);
}

// Containing system if any; otherwise the system whose center is nearest,
// provided v is within max_snap of its [y_top, y_bottom] interval.
inline std::optional<Snap> snap_to_system(const TrackerPrediction& pred, const PageLayout& layout,
                                          const FilterConfig& cfg) {
  const auto& systems = layout.systems;
  const System* chosen = nullptr;
  for (const System& s : systems) {
    if (pred.v >= s.y_top && pred.v <= s.y_bottom) {
      chosen = &s;
      break;
    }
  }
  if (!chosen) {
    chosen = &*std::min_element(systems.begin(), systems.end(), [&](const System& a, const System& b) {
      return std::abs(pred.v - a.y_center()) < std::abs(pred.v - b.y_center());
    });
    const double dist = pred.v < chosen->y_top ? chosen->y_top - pred.v : pred.v - chosen->y_bottom;
    if (dist > effective_max_snap(layout, cfg)) return std::nullopt;
  }
  const double x = std::clamp(pred.u, static_cast<double>(chosen->x_left),
                              static_cast<double>(chosen->x_right));
  return Snap{chosen->index, x};
}

inline double frac_in_system(const System& s, double x) {
  return std::clamp((x - s.x_left) / s.width(), 0.0, 1.0);
}

// Progress through the page in reading order, weighting systems by width.
inline double reading_fraction(int system_index, double x, const PageLayout& layout) {
  double before = 0.0;
  double total = 0.0;
  for (const System& s : layout.systems) {
    if (s.index < system_index) before += s.width();
    total += s.width();
  }
  const System& s = layout.systems.at(static_cast<std::size_t>(system_index));
  const double within = std::clamp(x - s.x_left, 0.0, s.width());
  return std::clamp((before + within) / total, 0.0, 1.0);
}

inline ReadingPosition make_position(int page_index, int system_index, double x, double t,
                                     const PageLayout& layout) {
  const System& s = layout.systems.at(static_cast<std::size_t>(system_index));
  return {page_index, system_index, x, frac_in_system(s, x),
          reading_fraction(system_index, x, layout), t};
}

inline FilterState reset_for_page(int page_index, const PageLayout& layout) {
  if (layout.systems.empty()) throw Error("cannot reset filter on a layout without systems");
  FilterState s;
  s.page_index = page_index;
  s.current_system = 0;
  s.current_x = layout.systems.front().x_left;
  return s;
}

inline FilterStep filter_step(const FilterState& state, const TrackerPrediction& pred,
                              const PageLayout& layout, const FilterConfig& cfg) {
  auto reject = [&](RejectReason r) {
    FilterState next = state;
    ++next.rejected_count;
    return FilterStep{next, Reject{r}};
  };

  if (pred.t < state.last_t) return reject(RejectReason::NonMonotonicTime);
  const std::optional<Snap> snap = snap_to_system(pred, layout, cfg);
  if (!snap) return reject(RejectReason::OffSystem);
  if (pred.conf < cfg.min_conf) return reject(RejectReason::LowConfidence);
  if (std::abs(snap->system_index - state.current_system) >= 2) {
    return reject(RejectReason::NonAdjacentJump);
  }
  const bool backward =
      snap->system_index < state.current_system ||
      (snap->system_index == state.current_system && snap->x < state.current_x - cfg.backtrack_eps);
  if (backward && pred.conf < cfg.backward_conf) {
    return reject(RejectReason::LowConfidenceBackward);
  }

  FilterState next = state;
  next.current_system = snap->system_index;
  next.current_x = snap->x;
  next.last_t = pred.t;
  ++next.accepted_count;
  return FilterStep{next, Accept{make_position(state.page_index, snap->system_index, snap->x,
                                               pred.t, layout)}};
}

}  // namespace pageflip
