#pragma once

// Page layout analysis: locate the systems of a sheet-music page.
//
//   gray -> adaptive Gaussian binarization -> row ink profile
//        -> line bands (thresholded profile runs)
//        -> staves (bands split at large gaps)
//        -> systems (staves chunked or gap-clustered)
//
// Everything here is a pure function of its inputs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pageflip/error.hpp"
#include "pageflip/image.hpp"

namespace pageflip {

struct LayoutConfig {
  int window = 51;                   // odd, >= 3
  double offset = 10.0;              // subtracted from the local mean
  double line_threshold_rel = 0.5;   // fraction of max row count
  double staff_gap_factor = 2.0;     // x median line gap
  int staves_per_system = 2;         // 0 = cluster by gap only
  double system_gap_factor = 1.5;    // x median staff gap
  double col_threshold_rel = 0.5;    // fraction of band count

  void validate() const {
    if (window < 3 || window % 2 == 0) {
      throw BadConfig("window must be odd and >= 3, got " + std::to_string(window));
    }
    if (!(staff_gap_factor > 0) || !(system_gap_factor > 0)) {
      throw BadConfig("gap factors must be > 0");
    }
    auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!in_unit(line_threshold_rel) || !in_unit(col_threshold_rel)) {
      throw BadConfig("thresholds must lie in (0, 1]");
    }
    if (staves_per_system < 0) {
      throw BadConfig("staves_per_system must be >= 0");
    }
  }
};

struct RowProfile {
  std::vector<int> counts;
  int width = 0;
};

// Inclusive row interval.
struct LineBand {
  int y_start = 0;
  int y_end = 0;

  double center() const { return 0.5 * (y_start + y_end); }
  bool operator==(const LineBand&) const = default;
};

struct Staff {
  std::vector<LineBand> bands;

  int y_top() const { return bands.front().y_start; }
  int y_bottom() const { return bands.back().y_end; }
  double mid() const { return 0.5 * (y_top() + y_bottom()); }
};

struct System {
  int index = 0;
  int y_top = 0;
  int y_bottom = 0;
  int x_left = 0;
  int x_right = 0;
  bool x_fallback = false;
  int band_count = 0;

  double y_center() const { return 0.5 * (y_top + y_bottom); }
  double height() const { return static_cast<double>(y_bottom - y_top); }
  // Never zero, so fractions along the system are always defined.
  double width() const { return static_cast<double>(std::max(1, x_right - x_left)); }
};

struct PageLayout {
  int page_index = 0;
  int width = 0;
  int height = 0;
  std::vector<System> systems;
  std::vector<std::string> warnings;

  const System& last_system() const { return systems.back(); }
  int last_index() const { return static_cast<int>(systems.size()) - 1; }
};

struct XExtent {
  int x_left = 0;
  int x_right = 0;
  bool fallback = false;
};

namespace detail {

// Mirror without repeating the edge sample: ... c b | a b c d | c b ...
inline int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

inline double gaussian_sigma(int window) { return 0.3 * ((window - 1) * 0.5 - 1.0) + 0.8; }

// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
inline std::vector<double> gaussian_kernel(int window) {
  const double sigma = gaussian_sigma(window);
  const double scale = -0.5 / (sigma * sigma);
  const int r = window / 2;
  std::vector<double> k(window);
  double sum = 0.0;
  for (int i = 0; i < window; ++i) {
    const double d = i - r;
    k[i] = std::exp(scale * d * d);
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Differences this small are rounding noise in the weighted mean; a pixel
// that ties its threshold stays background.
inline constexpr double kTieEpsilon = 1e-9;

inline BinaryImage binarize_adaptive_gaussian(const GrayImage& img, const LayoutConfig& cfg) {
  if (cfg.window < 3 || cfg.window % 2 == 0) {
    throw BadConfig("window must be odd and >= 3, got " + std::to_string(cfg.window));
  }
  check_dimensions(img);
  const int w = img.width;
  const int h = img.height;
  const int r = cfg.window / 2;
  const std::vector<double> k = gaussian_kernel(cfg.window);

  // Horizontal pass into a double buffer.
  std::vector<double> horiz(static_cast<std::size_t>(w) * h);
  std::vector<double> padded(static_cast<std::size_t>(w) + 2 * r);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = &img.pixels[static_cast<std::size_t>(y) * w];
    for (int x = -r; x < w + r; ++x) padded[x + r] = row[detail::reflect101(x, w)];
    double* out = &horiz[static_cast<std::size_t>(y) * w];
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < cfg.window; ++i) acc += k[i] * padded[x + i];
      out[x] = acc;
    }
  }

  // Vertical pass, accumulated row by row, then compared.
  BinaryImage out(w, h);
  std::vector<double> acc(w);
  for (int y = 0; y < h; ++y) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int i = 0; i < cfg.window; ++i) {
      const double* src = &horiz[static_cast<std::size_t>(detail::reflect101(y + i - r, h)) * w];
      const double ki = k[i];
      for (int x = 0; x < w; ++x) acc[x] += ki * src[x];
    }
    const std::size_t base = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      out.ink[base + x] = img.pixels[base + x] < acc[x] - cfg.offset - kTieEpsilon ? 1 : 0;
    }
  }
  return out;
}

inline RowProfile row_ink_profile(const BinaryImage& img) {
  RowProfile p;
  p.width = img.width;
  p.counts.resize(img.height);
  for (int y = 0; y < img.height; ++y) {
    const auto first = img.ink.begin() + static_cast<std::ptrdiff_t>(y) * img.width;
    p.counts[y] = static_cast<int>(std::count(first, first + img.width, std::uint8_t{1}));
  }
  return p;
}

inline std::vector<LineBand> detect_line_bands(const RowProfile& profile, const LayoutConfig& cfg) {
  if (profile.counts.empty()) throw BadConfig("empty row profile");
  const int peak = *std::max_element(profile.counts.begin(), profile.counts.end());
  if (peak == 0) throw NoInk();
  const double tau = cfg.line_threshold_rel * peak;

  std::vector<LineBand> bands;
  const int n = static_cast<int>(profile.counts.size());
  for (int y = 0; y < n;) {
    if (profile.counts[y] < tau) {
      ++y;
      continue;
    }
    const int start = y;
    while (y < n && profile.counts[y] >= tau) ++y;
    bands.push_back({start, y - 1});
  }
  return bands;
}

inline std::vector<Staff> group_bands_into_staves(const std::vector<LineBand>& bands,
                                                  const LayoutConfig& cfg) {
  if (bands.empty()) throw BadConfig("no line bands to group");
  std::vector<Staff> staves{Staff{{bands.front()}}};
  if (bands.size() == 1) return staves;

  std::vector<double> gaps;
  for (std::size_t i = 0; i + 1 < bands.size(); ++i) {
    gaps.push_back(bands[i + 1].center() - bands[i].center());
  }
  const double limit = cfg.staff_gap_factor * detail::median(gaps);
  for (std::size_t i = 1; i < bands.size(); ++i) {
    if (gaps[i - 1] > limit) staves.emplace_back();
    staves.back().bands.push_back(bands[i]);
  }
  return staves;
}

// Columns whose ink count inside [y_top, y_bottom] reaches
// col_threshold_rel * band_count bound the system horizontally.
inline XExtent system_x_extent(const BinaryImage& img, int y_top, int y_bottom, int band_count,
                               const LayoutConfig& cfg) {
  std::vector<int> cols(img.width, 0);
  for (int y = std::max(0, y_top); y <= std::min(y_bottom, img.height - 1); ++y) {
    for (int x = 0; x < img.width; ++x) cols[x] += img.at(x, y) ? 1 : 0;
  }
  const double need = std::max(1.0, cfg.col_threshold_rel * band_count);
  XExtent e{-1, -1, false};
  for (int x = 0; x < img.width; ++x) {
    if (cols[x] >= need) {
      if (e.x_left < 0) e.x_left = x;
      e.x_right = x;
    }
  }
  if (e.x_left < 0) return {0, img.width - 1, true};
  return e;
}

namespace detail {

inline System make_system(const std::vector<Staff>& group, const BinaryImage& img,
                          const LayoutConfig& cfg) {
  System s;
  s.y_top = group.front().y_top();
  s.y_bottom = group.back().y_bottom();
  for (const Staff& st : group) s.band_count += static_cast<int>(st.bands.size());
  const XExtent e = system_x_extent(img, s.y_top, s.y_bottom, s.band_count, cfg);
  s.x_left = e.x_left;
  s.x_right = e.x_right;
  s.x_fallback = e.fallback;
  return s;
}

}  // namespace detail

inline std::vector<System> group_staves_into_systems(const std::vector<Staff>& staves,
                                                     const BinaryImage& img,
                                                     const LayoutConfig& cfg,
                                                     std::vector<std::string>& warnings) {
  if (staves.empty()) throw BadConfig("no staves to group");
  std::vector<std::vector<Staff>> groups;
  const std::size_t per = static_cast<std::size_t>(cfg.staves_per_system);

  if (per > 0 && staves.size() % per == 0) {
    for (std::size_t i = 0; i < staves.size(); i += per) {
      groups.emplace_back(staves.begin() + i, staves.begin() + i + per);
    }
  } else {
    if (per > 0) {
      warnings.push_back("staff count " + std::to_string(staves.size()) +
                         " not divisible by staves_per_system " + std::to_string(per) +
                         "; grouped by gap");
    }
    groups.push_back({staves.front()});
    if (staves.size() > 1) {
      std::vector<double> gaps;
      for (std::size_t i = 0; i + 1 < staves.size(); ++i) {
        gaps.push_back(staves[i + 1].mid() - staves[i].mid());
      }
      const double limit = cfg.system_gap_factor * detail::median(gaps);
      for (std::size_t i = 1; i < staves.size(); ++i) {
        if (gaps[i - 1] > limit) groups.emplace_back();
        groups.back().push_back(staves[i]);
      }
    }
  }

  std::vector<System> systems;
  for (const auto& g : groups) {
    systems.push_back(detail::make_system(g, img, cfg));
    systems.back().index = static_cast<int>(systems.size()) - 1;
  }
  return systems;
}

namespace detail {

// Sort by y_top, fold overlapping intervals together, widen zero-height or
// zero-width systems, and renumber.
inline void normalize_systems(std::vector<System>& systems, const BinaryImage& img,
                              const LayoutConfig& cfg, std::vector<std::string>& warnings) {
  std::sort(systems.begin(), systems.end(),
            [](const System& a, const System& b) { return a.y_top < b.y_top; });
  std::vector<System> merged;
  for (const System& s : systems) {
    if (!merged.empty() && s.y_top <= merged.back().y_bottom) {
      System& m = merged.back();
      warnings.push_back("overlapping systems at rows " + std::to_string(m.y_top) + ".." +
                         std::to_string(s.y_bottom) + " merged");
      m.y_bottom = std::max(m.y_bottom, s.y_bottom);
      m.band_count += s.band_count;
      const XExtent e = system_x_extent(img, m.y_top, m.y_bottom, m.band_count, cfg);
      m.x_left = e.x_left;
      m.x_right = e.x_right;
      m.x_fallback = e.fallback;
      continue;
    }
    merged.push_back(s);
  }
  for (std::size_t i = 0; i < merged.size(); ++i) {
    System& s = merged[i];
    s.index = static_cast<int>(i);
    if (s.y_top == s.y_bottom) {
      const int limit = i + 1 < merged.size() ? merged[i + 1].y_top - 1 : img.height - 1;
      if (s.y_bottom < limit) {
        ++s.y_bottom;
      } else if (s.y_top > (i > 0 ? merged[i - 1].y_bottom + 1 : 0)) {
        --s.y_top;
      }
      warnings.push_back("system " + std::to_string(i) + " is a single row");
    }
    if (s.x_left == s.x_right) {
      if (s.x_right < img.width - 1) {
        ++s.x_right;
      } else if (s.x_left > 0) {
        --s.x_left;
      }
    }
  }
  systems = std::move(merged);
}

}  // namespace detail

inline PageLayout analyze_page(const GrayImage& gray, int page_index, const LayoutConfig& cfg) {
  cfg.validate();
  check_dimensions(gray);

  const BinaryImage bin = binarize_adaptive_gaussian(gray, cfg);
  const RowProfile profile = row_ink_profile(bin);
  const std::vector<LineBand> bands = detect_line_bands(profile, cfg);

  PageLayout layout;
  layout.page_index = page_index;
  layout.width = gray.width;
  layout.height = gray.height;
  if (bands.size() < 5) {
    layout.warnings.push_back("only " + std::to_string(bands.size()) +
                              " line bands found; layout is a rough estimate");
  }
  const std::vector<Staff> staves = group_bands_into_staves(bands, cfg);
  layout.systems = group_staves_into_systems(staves, bin, cfg, layout.warnings);
  detail::normalize_systems(layout.systems, bin, cfg, layout.warnings);
  return layout;
}

inline PageLayout analyze_page(const RgbImage& rgb, int page_index, const LayoutConfig& cfg) {
  check_dimensions(rgb);
  return analyze_page(to_grayscale(rgb), page_index, cfg);
}

}  // namespace pageflip
