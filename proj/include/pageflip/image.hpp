#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "pageflip/error.hpp"

namespace pageflip {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
};

// Row-major 24-bit colour image.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = {255, 255, 255})
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// 0 = black ink, 255 = white paper.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 255)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// true (1) = ink / foreground. Stored as bytes to keep row access contiguous.
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> ink;

  BinaryImage() = default;
  BinaryImage(int w, int h, bool fill = false)
      : width(w), height(h), ink(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

  bool at(int x, int y) const { return ink[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { ink[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

  std::size_t ink_count() const {
    return static_cast<std::size_t>(std::count(ink.begin(), ink.end(), std::uint8_t{1}));
  }
};

template <typename Image>
void check_dimensions(const Image& img) {
  if (img.width <= 0 || img.height <= 0) {
    throw BadConfig("image dimensions must be positive");
  }
}

// BT.601 luma, rounded half away from zero.
inline std::uint8_t luma(Rgb p) {
  const double y = 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
  return static_cast<std::uint8_t>(std::clamp(std::round(y), 0.0, 255.0));
}

inline GrayImage to_grayscale(const RgbImage& img) {
  GrayImage out(img.width, img.height);
  std::transform(img.pixels.begin(), img.pixels.end(), out.pixels.begin(), luma);
  return out;
}

}  // namespace pageflip
