#pragma once

// PNG (via libpng) and binary PGM/PPM reading, PNG writing.
// Consumers must link libpng.

#include <png.h>

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "pageflip/error.hpp"
#include "pageflip/image.hpp"

namespace pageflip {

using AnyImage = std::variant<GrayImage, RgbImage>;

inline GrayImage as_gray(const AnyImage& img) {
  if (const auto* g = std::get_if<GrayImage>(&img)) return *g;
  return to_grayscale(std::get<RgbImage>(img));
}

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw ImageIoError("cannot open " + path);
  return f;
}

inline bool has_png_signature(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  unsigned char sig[8] = {};
  in.read(reinterpret_cast<char*>(sig), 8);
  return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

inline AnyImage read_png(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw ImageIoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw ImageIoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ImageIoError("corrupt PNG: " + path);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);

  // Normalize to 8-bit gray or 8-bit RGB, alpha dropped.
  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int channels = png_get_channels(png, info);
  std::vector<png_byte> data(static_cast<std::size_t>(w) * h * channels);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) rows[y] = &data[static_cast<std::size_t>(y) * w * channels];
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels == 1) {
    GrayImage g(w, h);
    g.pixels.assign(data.begin(), data.end());
    return g;
  }
  if (channels != 3) throw ImageIoError("unsupported PNG channel layout: " + path);
  RgbImage rgb(w, h);
  for (std::size_t i = 0; i < rgb.pixels.size(); ++i) {
    rgb.pixels[i] = {data[3 * i], data[3 * i + 1], data[3 * i + 2]};
  }
  return rgb;
}

inline void skip_pnm_space(std::istream& in) {
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline AnyImage read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P6") throw ImageIoError("not a binary PGM/PPM or PNG: " + path);
  int w = 0, h = 0, maxval = 0;
  skip_pnm_space(in);
  in >> w;
  skip_pnm_space(in);
  in >> h;
  skip_pnm_space(in);
  in >> maxval;
  in.get();
  if (!in || w <= 0 || h <= 0 || maxval != 255) {
    throw ImageIoError("bad PNM header (8-bit only): " + path);
  }
  const int channels = magic == "P5" ? 1 : 3;
  std::vector<char> data(static_cast<std::size_t>(w) * h * channels);
  in.read(data.data(), static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw ImageIoError("truncated PNM data: " + path);
  }
  if (channels == 1) {
    GrayImage g(w, h);
    for (std::size_t i = 0; i < data.size(); ++i) g.pixels[i] = static_cast<std::uint8_t>(data[i]);
    return g;
  }
  RgbImage rgb(w, h);
  for (std::size_t i = 0; i < rgb.pixels.size(); ++i) {
    rgb.pixels[i] = {static_cast<std::uint8_t>(data[3 * i]),
                     static_cast<std::uint8_t>(data[3 * i + 1]),
                     static_cast<std::uint8_t>(data[3 * i + 2])};
  }
  return rgb;
}

}  // namespace detail

inline AnyImage read_image(const std::string& path) {
  {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw ImageIoError("cannot open " + path);
  }
  return detail::has_png_signature(path) ? detail::read_png(path) : detail::read_pnm(path);
}

inline void write_png(const std::string& path, const RgbImage& img) {
  detail::FilePtr f = detail::open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw ImageIoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw ImageIoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw ImageIoError("PNG write failed: " + path);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(img.width) * 3);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const Rgb p = img.at(x, y);
      row[3 * x] = p.r;
      row[3 * x + 1] = p.g;
      row[3 * x + 2] = p.b;
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

inline void write_png(const std::string& path, const GrayImage& img) {
  RgbImage rgb(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const auto v = img.pixels[i];
    rgb.pixels[i] = {v, v, v};
  }
  write_png(path, rgb);
}

}  // namespace pageflip
