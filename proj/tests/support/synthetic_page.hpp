#pragma once

// Draws piano-style pages with known staff geometry. Test-only: the ground
// truth it returns is what layout detection is checked against.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pageflip/image.hpp"

namespace pageflip::testing {

struct TruthSystem {
  int y_top = 0;
  int y_bottom = 0;
  int x_left = 0;
  int x_right = 0;
};

struct SyntheticPage {
  GrayImage image;
  std::vector<TruthSystem> systems;
  int line_gap = 0;
  int staff_gap = 0;
  int system_gap = 0;
};

struct PageSpec {
  int width = 1000;
  int height = 1400;
  int systems = 3;
  int staves_per_system = 2;
  int line_gap = 10;       // line-to-line distance (top row to top row)
  int thickness = 2;
  int staff_gap = 40;      // blank rows between the two staves of a system
  int system_gap = 140;    // blank rows between systems
  int top = 120;
  int x_left = 60;
  int x_right = 940;
  bool decorate = true;    // notes, stems, barlines, brace, title
  bool lighting = true;    // background gradient plus sensor noise
  std::uint64_t seed = 1;
};

inline void fill_rect(GrayImage& img, int x0, int y0, int x1, int y1, std::uint8_t v) {
  for (int y = std::max(0, y0); y <= std::min(img.height - 1, y1); ++y) {
    for (int x = std::max(0, x0); x <= std::min(img.width - 1, x1); ++x) img.at(x, y) = v;
  }
}

inline SyntheticPage render_page(const PageSpec& s) {
  std::mt19937_64 rng(s.seed);
  SyntheticPage page;
  page.image = GrayImage(s.width, s.height, 255);
  page.line_gap = s.line_gap;
  page.staff_gap = s.staff_gap;
  page.system_gap = s.system_gap;
  GrayImage& img = page.image;

  if (s.lighting) {
    std::normal_distribution<double> n(0.0, 2.0);
    for (int y = 0; y < s.height; ++y) {
      for (int x = 0; x < s.width; ++x) {
        const double shade = 250.0 - 40.0 * (static_cast<double>(x) / s.width) *
                                         (static_cast<double>(y) / s.height);
        img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(shade + n(rng)), 0L, 255L));
      }
    }
  }

  std::uniform_int_distribution<int> ink(10, 60);
  const int staff_height = 4 * s.line_gap + s.thickness;
  int y = s.top;
  if (s.decorate) {
    // Title block well above the first system.
    fill_rect(img, s.width / 3, 30, 2 * s.width / 3, 52, static_cast<std::uint8_t>(ink(rng)));
  }
  for (int sys = 0; sys < s.systems; ++sys) {
    TruthSystem truth{y, 0, s.x_left, s.x_right};
    for (int st = 0; st < s.staves_per_system; ++st) {
      for (int line = 0; line < 5; ++line) {
        const int ly = y + line * s.line_gap;
        fill_rect(img, s.x_left, ly, s.x_right, ly + s.thickness - 1,
                  static_cast<std::uint8_t>(ink(rng)));
      }
      if (s.decorate) {
        const int bottom = y + staff_height - 1;
        for (int k = 1; k <= 4; ++k) {
          const int bx = s.x_left + k * (s.x_right - s.x_left) / 4 - (k == 4 ? 1 : 0);
          fill_rect(img, bx - 1, y, bx, bottom, 20);
        }
        std::uniform_int_distribution<int> nx(s.x_left + 40, s.x_right - 20);
        std::uniform_int_distribution<int> ny(0, 8);
        for (int n = 0; n < 24; ++n) {
          const int cx = nx(rng);
          const int cy = y + ny(rng) * s.line_gap / 2;
          const int rx = s.line_gap * 2 / 3;
          const int ry = s.line_gap / 2;
          for (int dy = -ry; dy <= ry; ++dy) {
            for (int dx = -rx; dx <= rx; ++dx) {
              if (dx * dx * ry * ry + dy * dy * rx * rx <= rx * rx * ry * ry) {
                const int px = cx + dx, py = cy + dy;
                if (px >= 0 && py >= 0 && px < s.width && py < s.height) img.at(px, py) = 15;
              }
            }
          }
          // Stems stay inside the staff so the system's vertical extent is
          // defined by its outer lines.
          const bool up = cy > y + staff_height / 2;
          const int sy0 = up ? std::max(y, cy - 3 * s.line_gap) : cy;
          const int sy1 = up ? cy : std::min(y + staff_height - 1, cy + 3 * s.line_gap);
          const int sx = up ? cx + rx : cx - rx;
          fill_rect(img, sx, sy0, sx, sy1, 15);
        }
      }
      if (st + 1 < s.staves_per_system) y += staff_height + s.staff_gap;
    }
    truth.y_bottom = y + staff_height - 1;
    if (s.decorate) {
      fill_rect(img, s.x_left - 12, truth.y_top, s.x_left - 9, truth.y_bottom, 20);  // brace
    }
    page.systems.push_back(truth);
    y = truth.y_bottom + 1 + s.system_gap;
  }
  return page;
}

// Random page within the acceptance envelope: 2-6 grand-staff systems,
// line gap >= 8 px, system gap >= 3x the staff gap, ~1000x1400.
inline SyntheticPage random_page(std::uint64_t seed, int min_systems = 2) {
  std::mt19937_64 rng(seed * 7919 + 17);
  std::uniform_int_distribution<int> systems(min_systems, 6);
  PageSpec s;
  s.seed = seed;
  s.systems = systems(rng);
  s.width = std::uniform_int_distribution<int>(960, 1040)(rng);
  s.height = std::uniform_int_distribution<int>(1360, 1440)(rng);
  s.x_left = std::uniform_int_distribution<int>(50, 90)(rng);
  s.x_right = s.width - std::uniform_int_distribution<int>(50, 90)(rng);
  s.thickness = std::uniform_int_distribution<int>(1, 2)(rng);
  s.top = std::uniform_int_distribution<int>(100, 140)(rng);
  for (int attempt = 0;; ++attempt) {
    const int max_gap = std::max(8, 14 - attempt / 4);
    s.line_gap = std::uniform_int_distribution<int>(8, max_gap)(rng);
    s.staff_gap = std::uniform_int_distribution<int>(3 * s.line_gap, 4 * s.line_gap)(rng);
    s.system_gap = 3 * s.staff_gap + std::uniform_int_distribution<int>(0, s.staff_gap / 2)(rng);
    const int staff_height = 4 * s.line_gap + s.thickness;
    const int system_height = 2 * staff_height + s.staff_gap;
    const int needed = s.top + s.systems * system_height + (s.systems - 1) * s.system_gap + 60;
    if (needed <= s.height) break;
  }
  return render_page(s);
}

}  // namespace pageflip::testing
