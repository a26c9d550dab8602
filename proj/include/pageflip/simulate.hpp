#pragma once

// Stand-in for the neural score follower: a reader moving through each page
// at constant speed in reading order, observed through Gaussian position
// noise and occasional low-confidence outliers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pageflip/error.hpp"
#include "pageflip/filter.hpp"
#include "pageflip/layout.hpp"
#include "pageflip/policy.hpp"

namespace pageflip {

struct ConfRange {
  double lo = 0.0;
  double hi = 1.0;
};

struct SyntheticConfig {
  double seconds_per_page = 10.0;
  double rate_hz = 20.0;
  double noise_px = 3.0;
  double outlier_prob = 0.05;
  ConfRange outlier_conf{0.0, 0.4};
  ConfRange inlier_conf{0.6, 1.0};
  std::uint64_t seed = 0;

  void validate() const {
    if (!(seconds_per_page > 0.0)) throw BadConfig("seconds_per_page must be > 0");
    if (!(rate_hz > 0.0)) throw BadConfig("rate_hz must be > 0");
    if (!(noise_px >= 0.0)) throw BadConfig("noise_px must be >= 0");
    if (!(outlier_prob >= 0.0 && outlier_prob < 1.0)) throw BadConfig("outlier_prob must lie in [0, 1)");
    for (const ConfRange& r : {outlier_conf, inlier_conf}) {
      if (!(r.lo >= 0.0 && r.lo <= r.hi && r.hi <= 1.0)) {
        throw BadConfig("confidence ranges must satisfy 0 <= lo <= hi <= 1");
      }
    }
  }
};

struct PagedPrediction {
  int page_index = 0;
  TrackerPrediction pred;
  bool outlier = false;
};

// Where the reader truly is at a given page fraction.
struct TruthPosition {
  int system_index = 0;
  double x = 0.0;
  double frac_in_system = 0.0;
  double v = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent generator per page, so adding pages leaves earlier pages'
// samples unchanged.
inline std::mt19937_64 page_stream(std::uint64_t seed, int page_index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(page_index) + 1)));
}

// Inverse of reading_fraction: page fraction -> system and x.
inline TruthPosition truth_at(const PageLayout& layout, double frac_page) {
  double total = 0.0;
  for (const System& s : layout.systems) total += s.width();
  double target = std::clamp(frac_page, 0.0, 1.0) * total;
  for (const System& s : layout.systems) {
    if (target <= s.width() || s.index == layout.last_index()) {
      const double within = std::clamp(target, 0.0, s.width());
      return {s.index, s.x_left + within, within / s.width(), s.y_center()};
    }
    target -= s.width();
  }
  return {};
}

inline std::vector<PagedPrediction> synth_trajectory(const std::vector<PageLayout>& layouts,
                                                     const SyntheticConfig& cfg) {
  cfg.validate();
  if (layouts.empty()) throw BadConfig("synthetic trajectory needs at least one page");
  for (const PageLayout& l : layouts) {
    if (l.systems.empty()) throw BadConfig("synthetic trajectory needs non-empty layouts");
  }

  const double duration = cfg.seconds_per_page * static_cast<double>(layouts.size());
  std::vector<PagedPrediction> out;
  int stream_page = -1;
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, cfg.noise_px > 0.0 ? cfg.noise_px : 1.0);

  for (std::int64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) / cfg.rate_hz;
    if (t >= duration) break;
    const int page = std::min(static_cast<int>(t / cfg.seconds_per_page),
                              static_cast<int>(layouts.size()) - 1);
    if (page != stream_page) {
      rng = page_stream(cfg.seed, page);
      stream_page = page;
    }
    const PageLayout& layout = layouts[static_cast<std::size_t>(page)];
    const double local = (t - page * cfg.seconds_per_page) / cfg.seconds_per_page;
    const TruthPosition truth = truth_at(layout, local);
    const System& sys = layout.systems[static_cast<std::size_t>(truth.system_index)];

    PagedPrediction pp;
    pp.page_index = page;
    pp.pred.t = t;
    pp.pred.h = sys.height();
    pp.pred.w = 0.5 * sys.height();
    if (unit(rng) < cfg.outlier_prob) {
      pp.outlier = true;
      pp.pred.u = unit(rng) * layout.width;
      pp.pred.v = unit(rng) * layout.height;
      pp.pred.conf = cfg.outlier_conf.lo + unit(rng) * (cfg.outlier_conf.hi - cfg.outlier_conf.lo);
    } else {
      pp.pred.u = truth.x;
      pp.pred.v = truth.v;
      if (cfg.noise_px > 0.0) {
        pp.pred.u += noise(rng);
        pp.pred.v += noise(rng);
      }
      pp.pred.conf = cfg.inlier_conf.lo + unit(rng) * (cfg.inlier_conf.hi - cfg.inlier_conf.lo);
    }
    out.push_back(pp);
  }
  return out;
}

inline std::vector<TrackerPrediction> predictions_only(const std::vector<PagedPrediction>& paged) {
  std::vector<TrackerPrediction> out;
  out.reserve(paged.size());
  for (const PagedPrediction& p : paged) out.push_back(p.pred);
  return out;
}

// First time (page-local seconds, 1 ms grid) at which the noiseless reader is
// in the last system at or past turn_fraction of its width.
inline double oracle_turn_time(const PageLayout& layout, const SyntheticConfig& cfg,
                               const PolicyConfig& policy_cfg) {
  std::vector<double> widths;
  for (const System& s : layout.systems) widths.push_back(std::max(1, s.x_right - s.x_left));
  double total = 0.0;
  for (double w : widths) total += w;
  const double before_last = total - widths.back();

  const auto steps = static_cast<std::int64_t>(std::ceil(cfg.seconds_per_page * 1000.0));
  for (std::int64_t i = 0; i <= steps; ++i) {
    const double t = std::min(static_cast<double>(i) / 1000.0, cfg.seconds_per_page);
    const double reached = t / cfg.seconds_per_page * total;
    if (reached <= before_last) continue;
    if ((reached - before_last) / widths.back() >= policy_cfg.turn_fraction) return t;
  }
  return cfg.seconds_per_page;
}

// Absolute session times of the expected turn on every non-final page.
inline std::vector<double> oracle_schedule(const std::vector<PageLayout>& layouts,
                                           const SyntheticConfig& cfg,
                                           const PolicyConfig& policy_cfg) {
  std::vector<double> out;
  for (std::size_t p = 0; p + 1 < layouts.size(); ++p) {
    out.push_back(static_cast<double>(p) * cfg.seconds_per_page +
                  oracle_turn_time(layouts[p], cfg, policy_cfg));
  }
  return out;
}

}  // namespace pageflip
