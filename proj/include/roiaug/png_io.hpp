// Copyright 2026 The roiaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <png.h>

#include <bit>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "roiaug/error.hpp"
#include "roiaug/image.hpp"

namespace roiaug {

// PNG is the interchange format: 8- or 16-bit grayscale, non-paletted.
// Anything else is rejected at load time so no other code path ever sees a
// multi-channel buffer. Writes are deterministic: fixed libpng settings,
// no timestamp chunk, so identical images produce identical files.

struct PngInfo {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  bool grayscale = false;
};

namespace detail {

// libpng reports errors through a callback; throwing from it unwinds
// through libpng's C frames, which Linux distro builds support. Keeps RAII
// intact and setjmp out of the picture.
[[noreturn]] inline void png_error_thrower(png_structp, png_const_charp msg) {
  fail(Errc::decode_error, std::string("libpng: ") + (msg ? msg : "error"));
}

inline void png_warning_sink(png_structp, png_const_charp) {}

struct PngReader {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;

  explicit PngReader(const std::filesystem::path& path) {
    fp = std::fopen(path.c_str(), "rb");
    if (!fp) fail(Errc::io_error, "cannot open " + path.string());
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                 png_error_thrower, png_warning_sink);
    if (!png) fail(Errc::decode_error, "png_create_read_struct failed");
    info = png_create_info_struct(png);
    if (!info) fail(Errc::decode_error, "png_create_info_struct failed");
    png_init_io(png, fp);
  }

  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  ~PngReader() {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    if (fp) std::fclose(fp);
  }
};

struct PngWriter {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;

  explicit PngWriter(const std::filesystem::path& path) {
    fp = std::fopen(path.c_str(), "wb");
    if (!fp) fail(Errc::io_error, "cannot open for writing " + path.string());
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                  png_error_thrower, png_warning_sink);
    if (!png) fail(Errc::io_error, "png_create_write_struct failed");
    info = png_create_info_struct(png);
    if (!info) fail(Errc::io_error, "png_create_info_struct failed");
    png_init_io(png, fp);
  }

  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;

  ~PngWriter() {
    if (png) png_destroy_write_struct(&png, &info);
    if (fp) std::fclose(fp);
  }
};

}  // namespace detail

// Reads dimensions and format without decoding pixel data.
inline PngInfo read_png_info(const std::filesystem::path& path) {
  detail::PngReader r(path);
  png_read_info(r.png, r.info);
  PngInfo out;
  out.width = static_cast<int>(png_get_image_width(r.png, r.info));
  out.height = static_cast<int>(png_get_image_height(r.png, r.info));
  out.bit_depth = png_get_bit_depth(r.png, r.info);
  out.grayscale = png_get_color_type(r.png, r.info) == PNG_COLOR_TYPE_GRAY;
  return out;
}

inline Image load_png(const std::filesystem::path& path) {
  detail::PngReader r(path);
  png_read_info(r.png, r.info);

  const int width = static_cast<int>(png_get_image_width(r.png, r.info));
  const int height = static_cast<int>(png_get_image_height(r.png, r.info));
  const int depth = png_get_bit_depth(r.png, r.info);
  const int color = png_get_color_type(r.png, r.info);

  if (color != PNG_COLOR_TYPE_GRAY)
    fail(Errc::decode_error,
         "unsupported color type in " + path.string() + " (grayscale only)");
  if (depth != 8 && depth != 16)
    fail(Errc::decode_error, "unsupported bit depth " + std::to_string(depth) +
                                 " in " + path.string());

  if (depth == 16 && std::endian::native == std::endian::little)
    png_set_swap(r.png);

  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  if (depth == 16) {
    std::vector<std::uint16_t> buf(static_cast<std::size_t>(width) * height);
    for (int j = 0; j < height; ++j)
      rows[j] = reinterpret_cast<png_bytep>(buf.data() +
                                            static_cast<std::size_t>(j) * width);
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);
    return Image::from_pixels(width, height, 16, std::move(buf));
  }

  std::vector<std::uint8_t> buf8(static_cast<std::size_t>(width) * height);
  for (int j = 0; j < height; ++j)
    rows[j] = buf8.data() + static_cast<std::size_t>(j) * width;
  png_read_image(r.png, rows.data());
  png_read_end(r.png, nullptr);
  std::vector<std::uint16_t> widened(buf8.begin(), buf8.end());
  return Image::from_pixels(width, height, 8, std::move(widened));
}

inline void save_png(const Image& img, const std::filesystem::path& path) {
  if (img.empty()) fail(Errc::invalid_argument, "cannot save empty image");
  detail::PngWriter w(path);

  png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(img.width()),
               static_cast<png_uint_32>(img.height()), img.bit_depth(),
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  // Fast compression; batch outputs are large and write-bound.
  png_set_compression_level(w.png, 1);
  png_write_info(w.png, w.info);

  const int width = img.width();
  const int height = img.height();
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));

  if (img.bit_depth() == 16) {
    if (std::endian::native == std::endian::little) png_set_swap(w.png);
    // libpng swaps in place when writing, so hand it a mutable copy.
    std::vector<std::uint16_t> buf(img.pixels().begin(), img.pixels().end());
    for (int j = 0; j < height; ++j)
      rows[j] = reinterpret_cast<png_bytep>(buf.data() +
                                            static_cast<std::size_t>(j) * width);
    png_write_image(w.png, rows.data());
    png_write_end(w.png, w.info);
    return;
  }

  std::vector<std::uint8_t> buf8(static_cast<std::size_t>(width) * height);
  auto src = img.pixels();
  for (std::size_t k = 0; k < buf8.size(); ++k)
    buf8[k] = static_cast<std::uint8_t>(src[k]);
  for (int j = 0; j < height; ++j)
    rows[j] = buf8.data() + static_cast<std::size_t>(j) * width;
  png_write_image(w.png, rows.data());
  png_write_end(w.png, w.info);
}

}  // namespace roiaug
