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
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "roiaug/box.hpp"
#include "roiaug/error.hpp"
#include "roiaug/image.hpp"
#include "roiaug/manifest.hpp"
#include "roiaug/mask.hpp"

namespace roiaug {

// Geometric normalization: crop to the tissue region, mirror right-side
// images so every scan shares one orientation, resample to a fixed frame.
// Every transform re-projects the lesion boxes so annotations stay valid
// through the whole chain.

struct CropResult {
  Image cropped;
  BoundingBox crop_box;  // in source coordinates
  std::vector<BoundingBox> transformed_lesions;  // in cropped coordinates
};

// Tight bounding box of the largest 8-connected component of pixels
// strictly brighter than threshold_fraction * max_value. Ties on component
// size go to the component encountered first in row-major order.
inline BoundingBox detect_foreground(const Image& x,
                                     double threshold_fraction = 0.05) {
  if (x.empty()) fail(Errc::invalid_argument, "empty image");
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
    fail(Errc::invalid_argument, "threshold fraction must be in (0, 1)");

  const int w = x.width();
  const int h = x.height();
  const double threshold = threshold_fraction * x.max_value();
  auto px = x.pixels();
  auto bright = [&](std::size_t k) {
    return static_cast<double>(px[k]) > threshold;
  };

  std::vector<std::uint8_t> seen(px.size(), 0);
  std::vector<std::size_t> stack;
  BoundingBox best{};
  long long best_area = -1;

  for (std::size_t seed = 0; seed < px.size(); ++seed) {
    if (seen[seed] || !bright(seed)) continue;
    // Flood fill one component, tracking its extent and size.
    long long area = 0;
    int lo_i = w, hi_i = -1, lo_j = h, hi_j = -1;
    seen[seed] = 1;
    stack.assign(1, seed);
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      const int i = static_cast<int>(k % w);
      const int j = static_cast<int>(k / w);
      ++area;
      lo_i = std::min(lo_i, i);
      hi_i = std::max(hi_i, i);
      lo_j = std::min(lo_j, j);
      hi_j = std::max(hi_j, j);
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const int ni = i + di;
          const int nj = j + dj;
          if (ni < 0 || ni >= w || nj < 0 || nj >= h) continue;
          const std::size_t nk = static_cast<std::size_t>(nj) * w + ni;
          if (!seen[nk] && bright(nk)) {
            seen[nk] = 1;
            stack.push_back(nk);
          }
        }
      }
    }
    if (area > best_area) {
      best_area = area;
      best = BoundingBox{lo_i, lo_j, hi_i, hi_j};
    }
  }

  if (best_area < 0)
    fail(Errc::no_foreground, "no pixel above threshold " +
                                  std::to_string(threshold));
  return best;
}

// Sub-image of region; lesion boxes are translated into crop coordinates
// and clipped to the crop. A lesion that does not touch the region at all
// means the crop would discard annotated pathology, which is an error.
inline CropResult crop(const Image& x, const BoundingBox& region,
                       std::span<const BoundingBox> lesions) {
  if (!region.within(x.width(), x.height()))
    fail(Errc::box_out_of_bounds, "crop region outside image bounds");

  CropResult result;
  result.crop_box = region;

  for (std::size_t k = 0; k < lesions.size(); ++k) {
    const auto clipped = intersection(lesions[k], region);
    if (!clipped)
      fail(Errc::lesion_outside_crop,
           "lesion " + std::to_string(k) + " entirely outside crop region");
    result.transformed_lesions.push_back(
        BoundingBox{clipped->x_min - region.x_min, clipped->y_min - region.y_min,
                    clipped->x_max - region.x_min,
                    clipped->y_max - region.y_min});
  }

  const int cw = region.width();
  const int ch = region.height();
  std::vector<std::uint16_t> out(static_cast<std::size_t>(cw) * ch);
  auto src = x.pixels();
  for (int j = 0; j < ch; ++j) {
    const std::size_t src_off =
        static_cast<std::size_t>(j + region.y_min) * x.width() + region.x_min;
    std::copy_n(src.data() + src_off, cw,
                out.data() + static_cast<std::size_t>(j) * cw);
  }
  result.cropped = Image::from_pixels(cw, ch, x.bit_depth(), std::move(out));
  return result;
}

// Mirror along the vertical axis: out(i,j) = x(W-1-i, j); a box maps to
// (W-1-x_max, y_min, W-1-x_min, y_max). Applying it twice is the identity.
inline std::pair<Image, std::vector<BoundingBox>> flip_horizontal(
    const Image& x, std::span<const BoundingBox> lesions) {
  const int w = x.width();
  const int h = x.height();
  std::vector<std::uint16_t> out(x.pixels().size());
  auto src = x.pixels();
  for (int j = 0; j < h; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * w;
    for (int i = 0; i < w; ++i) out[row + i] = src[row + (w - 1 - i)];
  }
  std::vector<BoundingBox> boxes;
  boxes.reserve(lesions.size());
  for (const BoundingBox& b : lesions)
    boxes.push_back(BoundingBox{w - 1 - b.x_max, b.y_min, w - 1 - b.x_min,
                                b.y_max});
  return {Image::from_pixels(w, h, x.bit_depth(), std::move(out)),
          std::move(boxes)};
}

enum class Laterality { left, right };

// Right when the right half of the frame carries more mean intensity than
// the left half; ties (including degenerate 1-px-wide images) break to
// left, which downstream leaves unflipped. The middle column of odd widths
// belongs to neither half.
inline Laterality laterality(const Image& x) {
  if (x.empty()) fail(Errc::invalid_argument, "empty image");
  const int w = x.width();
  const int h = x.height();
  const int half = w / 2;
  double left_sum = 0.0, right_sum = 0.0;
  auto px = x.pixels();
  for (int j = 0; j < h; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * w;
    for (int i = 0; i < half; ++i) left_sum += px[row + i];
    for (int i = w - half; i < w; ++i) right_sum += px[row + i];
  }
  return right_sum > left_sum ? Laterality::right : Laterality::left;
}

// Bilinear resample to target_w x target_h (centre-aligned sampling, double
// precision, round half even). Box coordinates scale by (target_w/W,
// target_h/H) with the same rounding, then clamp into the target frame.
inline std::pair<Image, std::vector<BoundingBox>> resize(
    const Image& x, std::span<const BoundingBox> lesions, int target_w,
    int target_h) {
  if (x.empty()) fail(Errc::invalid_argument, "empty image");
  if (target_w < 1 || target_h < 1)
    fail(Errc::invalid_argument, "resize target must be >= 1x1");

  const int w = x.width();
  const int h = x.height();
  const std::uint16_t max = x.max_value();
  auto src = x.pixels();
  auto at = [&](int i, int j) {
    return static_cast<double>(src[static_cast<std::size_t>(j) * w + i]);
  };

  std::vector<std::uint16_t> out(static_cast<std::size_t>(target_w) *
                                 target_h);
  const double sx = static_cast<double>(w) / target_w;
  const double sy = static_cast<double>(h) / target_h;
  for (int tj = 0; tj < target_h; ++tj) {
    // Centre-aligned sampling with edge replication: coordinates are
    // clamped into the frame before the fractional weights are taken.
    const double src_y =
        std::clamp((tj + 0.5) * sy - 0.5, 0.0, static_cast<double>(h - 1));
    const int y0 = static_cast<int>(std::floor(src_y));
    const double fy = src_y - y0;
    const int y1 = std::min(y0 + 1, h - 1);
    for (int ti = 0; ti < target_w; ++ti) {
      const double src_x =
          std::clamp((ti + 0.5) * sx - 0.5, 0.0, static_cast<double>(w - 1));
      const int x0 = static_cast<int>(std::floor(src_x));
      const double fx = src_x - x0;
      const int x1 = std::min(x0 + 1, w - 1);
      const double top = (1.0 - fx) * at(x0, y0) + fx * at(x1, y0);
      const double bottom = (1.0 - fx) * at(x0, y1) + fx * at(x1, y1);
      out[static_cast<std::size_t>(tj) * target_w + ti] =
          detail::quantize((1.0 - fy) * top + fy * bottom, max);
    }
  }

  const double bx = static_cast<double>(target_w) / w;
  const double by = static_cast<double>(target_h) / h;
  std::vector<BoundingBox> boxes;
  boxes.reserve(lesions.size());
  for (const BoundingBox& b : lesions) {
    auto scale = [](int v, double f, int limit) {
      const int r = static_cast<int>(round_half_even(v * f));
      return std::clamp(r, 0, limit - 1);
    };
    BoundingBox nb{scale(b.x_min, bx, target_w), scale(b.y_min, by, target_h),
                   scale(b.x_max, bx, target_w), scale(b.y_max, by, target_h)};
    nb.x_max = std::max(nb.x_max, nb.x_min);
    nb.y_max = std::max(nb.y_max, nb.y_min);
    boxes.push_back(nb);
  }
  return {Image::from_pixels(target_w, target_h, x.bit_depth(),
                             std::move(out)),
          std::move(boxes)};
}

// Optional user-supplied crop regions, one per line:
// sample_id,x_min,y_min,x_max,y_max
inline std::unordered_map<std::string, BoundingBox> parse_crop_boxes(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open crop-box file " + path.string());
  std::unordered_map<std::string, BoundingBox> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == "sample_id,x_min,y_min,x_max,y_max")
      continue;  // header is optional
    const auto fields = detail::split_csv_line(line, line_no);
    if (fields.size() != 5)
      fail(Errc::malformed_row, "crop-box line " + std::to_string(line_no) +
                                    ": expected 5 columns");
    BoundingBox b{detail::parse_int_strict(fields[1], line_no),
                  detail::parse_int_strict(fields[2], line_no),
                  detail::parse_int_strict(fields[3], line_no),
                  detail::parse_int_strict(fields[4], line_no)};
    if (!out.emplace(fields[0], b).second)
      fail(Errc::duplicate_id,
           "duplicate crop box for sample '" + fields[0] + "'");
  }
  return out;
}

}  // namespace roiaug
