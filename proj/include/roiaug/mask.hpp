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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "roiaug/box.hpp"
#include "roiaug/error.hpp"
#include "roiaug/image.hpp"

namespace roiaug {

// Per-pixel weight field over an image grid. Weights live in [0, 1]; masks
// produced by build_mask take exactly two values, 1 inside the box union
// and background_value outside. Materialized as a concrete W x H buffer so
// apply/blend stay single fused loops.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<double> weights;  // row-major, length width*height

  double weight(int i, int j) const {
    return weights[static_cast<std::size_t>(j) * width + i];
  }

  bool same_shape(const Image& img) const {
    return width == img.width() && height == img.height();
  }
};

// Round-to-nearest with ties to even. Spelled out rather than relying on the
// ambient FP rounding mode.
inline double round_half_even(double v) {
  const double f = std::floor(v);
  const double d = v - f;
  if (d > 0.5) return f + 1.0;
  if (d < 0.5) return f;
  return std::fmod(f, 2.0) == 0.0 ? f : f + 1.0;
}

namespace detail {

inline std::uint16_t quantize(double v, std::uint16_t max) {
  const double r = round_half_even(v);
  if (r <= 0.0) return 0;
  if (r >= static_cast<double>(max)) return max;
  return static_cast<std::uint16_t>(r);
}

}  // namespace detail

// Weight 1 wherever any box covers the pixel (inclusive bounds, union over
// boxes), background_value elsewhere. An empty box list yields a uniform
// background mask.
inline Mask build_mask(int width, int height,
                       std::span<const BoundingBox> boxes,
                       double background_value) {
  if (width < 1 || height < 1)
    fail(Errc::invalid_argument, "mask dimensions must be >= 1x1");
  if (!(background_value >= 0.0 && background_value <= 1.0))
    fail(Errc::invalid_argument, "background value must be in [0, 1]");
  for (const BoundingBox& b : boxes) {
    if (!b.within(width, height))
      fail(Errc::box_out_of_bounds,
           "box (" + std::to_string(b.x_min) + "," + std::to_string(b.y_min) +
               "," + std::to_string(b.x_max) + "," + std::to_string(b.y_max) +
               ") outside " + std::to_string(width) + "x" +
               std::to_string(height));
  }

  Mask m;
  m.width = width;
  m.height = height;
  m.weights.assign(static_cast<std::size_t>(width) * height, background_value);
  for (const BoundingBox& b : boxes) {
    for (int j = b.y_min; j <= b.y_max; ++j) {
      double* row = m.weights.data() + static_cast<std::size_t>(j) * width;
      std::fill(row + b.x_min, row + b.x_max + 1, 1.0);
    }
  }
  return m;
}

// out(i,j) = clamp(round_half_even(weight * x), 0, max). Weight-1 pixels
// come through bit-identical.
inline Image apply_mask(const Image& x, const Mask& m) {
  if (!m.same_shape(x))
    fail(Errc::dimension_mismatch, "mask and image dimensions differ");
  const std::uint16_t max = x.max_value();
  std::vector<std::uint16_t> out(x.pixels().size());
  auto src = x.pixels();
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double w = m.weights[k];
    out[k] = w == 1.0 ? src[k]
                      : detail::quantize(w * static_cast<double>(src[k]), max);
  }
  return Image::from_pixels(x.width(), x.height(), x.bit_depth(),
                            std::move(out));
}

// out(i,j) = clamp(round_half_even(w*a + (1-w)*b), 0, max). With a binary
// mask every output pixel equals one of the two inputs exactly.
inline Image blend(const Image& a, const Image& b, const Mask& m) {
  if (!a.same_shape(b) || !m.same_shape(a))
    fail(Errc::dimension_mismatch, "blend inputs must share dimensions");
  if (a.bit_depth() != b.bit_depth())
    fail(Errc::bit_depth_mismatch, "blend inputs must share bit depth");
  const std::uint16_t max = a.max_value();
  std::vector<std::uint16_t> out(a.pixels().size());
  auto pa = a.pixels();
  auto pb = b.pixels();
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double w = m.weights[k];
    if (w == 1.0) {
      out[k] = pa[k];
    } else if (w == 0.0) {
      out[k] = pb[k];
    } else {
      out[k] = detail::quantize(w * static_cast<double>(pa[k]) +
                                    (1.0 - w) * static_cast<double>(pb[k]),
                                max);
    }
  }
  return Image::from_pixels(a.width(), a.height(), a.bit_depth(),
                            std::move(out));
}

}  // namespace roiaug
