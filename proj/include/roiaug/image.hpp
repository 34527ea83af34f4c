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

#include <cassert>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "roiaug/error.hpp"

namespace roiaug {

// Single-channel raster with a declared depth of 8 or 16 bits. Pixels are
// row-major intensities stored as uint16_t regardless of depth; every value
// must stay within [0, max_value()]. Value type: copy freely, share
// read-only across workers.
class Image {
 public:
  Image() = default;

  Image(int width, int height, int bit_depth, std::uint16_t fill = 0)
      : width_(width), height_(height), bit_depth_(bit_depth) {
    check_shape(width, height, bit_depth);
    if (fill > max_value())
      fail(Errc::invalid_argument, "fill value exceeds bit depth");
    pixels_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  static Image from_pixels(int width, int height, int bit_depth,
                           std::vector<std::uint16_t> pixels) {
    check_shape(width, height, bit_depth);
    if (pixels.size() != static_cast<std::size_t>(width) * height)
      fail(Errc::invalid_argument, "pixel buffer length != width*height");
    Image img;
    img.width_ = width;
    img.height_ = height;
    img.bit_depth_ = bit_depth;
    img.pixels_ = std::move(pixels);
    const std::uint16_t max = img.max_value();
    for (std::uint16_t v : img.pixels_)
      if (v > max) fail(Errc::invalid_argument, "pixel value exceeds bit depth");
    return img;
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int bit_depth() const { return bit_depth_; }
  bool empty() const { return pixels_.empty(); }
  std::uint16_t max_value() const { return bit_depth_ == 16 ? 65535 : 255; }

  std::uint16_t pixel(int i, int j) const {
    assert(i >= 0 && i < width_ && j >= 0 && j < height_);
    return pixels_[static_cast<std::size_t>(j) * width_ + i];
  }

  void set_pixel(int i, int j, std::uint16_t v) {
    assert(i >= 0 && i < width_ && j >= 0 && j < height_);
    assert(v <= max_value());
    pixels_[static_cast<std::size_t>(j) * width_ + i] = v;
  }

  std::span<const std::uint16_t> pixels() const { return pixels_; }
  std::span<std::uint16_t> pixels() { return pixels_; }

  bool same_shape(const Image& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  static void check_shape(int width, int height, int bit_depth) {
    if (width < 1 || height < 1)
      fail(Errc::invalid_argument, "image dimensions must be >= 1x1");
    if (bit_depth != 8 && bit_depth != 16)
      fail(Errc::invalid_argument,
           "bit depth must be 8 or 16, got " + std::to_string(bit_depth));
  }

  int width_ = 0;
  int height_ = 0;
  int bit_depth_ = 8;
  std::vector<std::uint16_t> pixels_;
};

}  // namespace roiaug
