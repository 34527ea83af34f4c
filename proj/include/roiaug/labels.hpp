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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roiaug/error.hpp"

namespace roiaug {

// Index into LabelScheme::class_names.
using Label = std::uint8_t;

enum class SchemeId { birads5, tri };

// Label taxonomy plus the class sets that drive augmentation eligibility:
// high_risk classes may act as augmentation sources, low_risk classes as
// cutmix backgrounds. The two sets never overlap.
struct LabelScheme {
  SchemeId id = SchemeId::birads5;
  std::vector<std::string> class_names;
  std::vector<Label> high_risk;
  std::vector<Label> low_risk;

  // Risk categories "1".."5"; categories 3-5 are augmentation sources,
  // 1-2 are backgrounds.
  static LabelScheme birads5() {
    return LabelScheme{SchemeId::birads5,
                       {"1", "2", "3", "4", "5"},
                       {2, 3, 4},
                       {0, 1}};
  }

  // normal / benign / malignant; the abnormal classes are sources, normal
  // is the background pool.
  static LabelScheme tri() {
    return LabelScheme{SchemeId::tri,
                       {"normal", "benign", "malignant"},
                       {1, 2},
                       {0}};
  }

  std::size_t num_classes() const { return class_names.size(); }

  bool is_high_risk(Label l) const {
    return std::find(high_risk.begin(), high_risk.end(), l) != high_risk.end();
  }

  bool is_low_risk(Label l) const {
    return std::find(low_risk.begin(), low_risk.end(), l) != low_risk.end();
  }

  std::optional<Label> parse_label(std::string_view token) const {
    for (std::size_t k = 0; k < class_names.size(); ++k)
      if (class_names[k] == token) return static_cast<Label>(k);
    return std::nullopt;
  }

  const std::string& label_name(Label l) const {
    if (l >= class_names.size())
      fail(Errc::unknown_label, "label index out of range");
    return class_names[l];
  }

  friend bool operator==(const LabelScheme&, const LabelScheme&) = default;
};

inline const char* scheme_name(SchemeId id) {
  return id == SchemeId::birads5 ? "birads5" : "tri";
}

}  // namespace roiaug
