#pragma once

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "pageflip/error.hpp"
#include "pageflip/image.hpp"
#include "pageflip/layout.hpp"

namespace pageflip {

using ordered_json = nlohmann::ordered_json;

inline ordered_json layout_to_json(const PageLayout& layout) {
  ordered_json systems = ordered_json::array();
  for (const System& s : layout.systems) {
    systems.push_back({{"index", s.index},
                       {"y_top", s.y_top},
                       {"y_bottom", s.y_bottom},
                       {"x_left", s.x_left},
                       {"x_right", s.x_right},
                       {"x_fallback", s.x_fallback}});
  }
  return {{"page", layout.page_index},
          {"width", layout.width},
          {"height", layout.height},
          {"systems", systems},
          {"warnings", layout.warnings}};
}

// Parses and checks the layout invariants the rest of the pipeline relies on.
inline PageLayout layout_from_json(const nlohmann::json& j) {
  PageLayout layout;
  try {
    layout.page_index = j.at("page").get<int>();
    layout.width = j.at("width").get<int>();
    layout.height = j.at("height").get<int>();
    for (const auto& js : j.at("systems")) {
      System s;
      s.index = js.at("index").get<int>();
      s.y_top = js.at("y_top").get<int>();
      s.y_bottom = js.at("y_bottom").get<int>();
      s.x_left = js.at("x_left").get<int>();
      s.x_right = js.at("x_right").get<int>();
      s.x_fallback = js.value("x_fallback", false);
      s.band_count = js.value("band_count", 0);
      layout.systems.push_back(s);
    }
    if (j.contains("warnings")) layout.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed layout JSON: ") + e.what());
  }
  if (layout.systems.empty()) throw Error("layout has no systems");
  for (std::size_t i = 0; i < layout.systems.size(); ++i) {
    const System& s = layout.systems[i];
    if (s.index != static_cast<int>(i)) throw Error("layout system indices must be 0..n-1");
    if (s.y_top > s.y_bottom || s.x_left > s.x_right) throw Error("layout system has inverted extent");
    if (i > 0 && s.y_top <= layout.systems[i - 1].y_bottom) {
      throw Error("layout systems must be sorted and y-disjoint");
    }
  }
  return layout;
}

inline PageLayout read_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open layout " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid JSON in " + path + ": " + e.what());
  }
  return layout_from_json(j);
}

inline void write_layout(const std::string& path, const PageLayout& layout) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << layout_to_json(layout).dump(2) << '\n';
}

// Source image with every system boxed and the turn line of the last system
// drawn at `turn_fraction` of its width.
inline RgbImage render_overlay(const GrayImage& page, const PageLayout& layout,
                               double turn_fraction = 0.5) {
  RgbImage out(page.width, page.height);
  for (std::size_t i = 0; i < page.pixels.size(); ++i) {
    const auto v = page.pixels[i];
    out.pixels[i] = {v, v, v};
  }
  auto put = [&](int x, int y, Rgb c) {
    if (x >= 0 && y >= 0 && x < out.width && y < out.height) out.at(x, y) = c;
  };
  const Rgb box{220, 30, 30};
  const Rgb turn{30, 60, 230};
  for (const System& s : layout.systems) {
    for (int t = 0; t < 2; ++t) {
      for (int x = s.x_left; x <= s.x_right; ++x) {
        put(x, s.y_top - t, box);
        put(x, s.y_bottom + t, box);
      }
      for (int y = s.y_top; y <= s.y_bottom; ++y) {
        put(s.x_left - t, y, box);
        put(s.x_right + t, y, box);
      }
    }
  }
  const System& last = layout.last_system();
  const int xt = last.x_left + static_cast<int>(std::lround(turn_fraction * last.width()));
  for (int y = last.y_top; y <= last.y_bottom; ++y) {
    for (int t = -1; t <= 1; ++t) put(xt + t, y, turn);
  }
  return out;
}

}  // namespace pageflip
