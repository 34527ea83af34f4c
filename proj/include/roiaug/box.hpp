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
#include <optional>

namespace roiaug {

// Axis-aligned pixel rectangle, 0-based, inclusive on all four edges:
// i (= x, column) runs over [x_min, x_max] and j (= y, row) over
// [y_min, y_max].
struct BoundingBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  bool valid() const { return x_min <= x_max && y_min <= y_max; }
  int width() const { return x_max - x_min + 1; }
  int height() const { return y_max - y_min + 1; }
  long long area() const {
    return static_cast<long long>(width()) * height();
  }

  bool contains(int i, int j) const {
    return x_min <= i && i <= x_max && y_min <= j && j <= y_max;
  }

  // True when the box is valid and lies entirely inside an image of the
  // given dimensions.
  bool within(int image_width, int image_height) const {
    return valid() && x_min >= 0 && y_min >= 0 && x_max < image_width &&
           y_max < image_height;
  }

  bool intersects(const BoundingBox& o) const {
    return x_min <= o.x_max && o.x_min <= x_max && y_min <= o.y_max &&
           o.y_min <= y_max;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

inline std::optional<BoundingBox> intersection(const BoundingBox& a,
                                               const BoundingBox& b) {
  if (!a.intersects(b)) return std::nullopt;
  return BoundingBox{std::max(a.x_min, b.x_min), std::max(a.y_min, b.y_min),
                     std::min(a.x_max, b.x_max), std::min(a.y_max, b.y_max)};
}

}  // namespace roiaug
