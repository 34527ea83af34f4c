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
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "roiaug/error.hpp"
#include "roiaug/manifest.hpp"
#include "roiaug/rng.hpp"

namespace roiaug {

// Label-stratified partitioning. Per class: sort sample ids, shuffle with a
// generator derived from (seed, class), apportion counts by largest
// fractional remainder, assign in shuffled order. Sorting before the
// shuffle makes the assignment a function of the id set, not of manifest
// row order; the remainder rule keeps every per-class count within one
// sample of the exact proportion.

struct SplitSpec {
  double train = 0.8;
  double val = 0.0;
  double test = 0.2;
  std::uint64_t seed = 0;

  void check() const {
    if (train < 0.0 || val < 0.0 || test < 0.0)
      fail(Errc::invalid_argument, "split ratios must be non-negative");
    if (std::abs(train + val + test - 1.0) > 1e-9)
      fail(Errc::invalid_argument, "split ratios must sum to 1");
  }
};

namespace detail {

// Hamilton apportionment of n into three shares. Each count is
// floor(n*ratio) or floor(n*ratio)+1, so |count - n*ratio| < 1 always.
inline std::array<std::size_t, 3> apportion(std::size_t n,
                                            const SplitSpec& spec) {
  const std::array<double, 3> share = {n * spec.train, n * spec.val,
                                       n * spec.test};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    counts[k] = static_cast<std::size_t>(std::floor(share[k]));
    frac[k] = share[k] - static_cast<double>(counts[k]);
    assigned += counts[k];
  }
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return frac[a] > frac[b]; });
  for (std::size_t left = n - assigned, k = 0; left > 0; --left, ++k)
    ++counts[order[k % 3]];
  return counts;
}

}  // namespace detail

inline Manifest stratified_split(const Manifest& m, const SplitSpec& spec,
                                 bool force = false) {
  spec.check();
  if (m.samples.empty()) fail(Errc::empty_manifest, "no samples to split");
  if (!force)
    for (const auto& s : m.samples)
      if (s.split != SplitTag::unassigned)
        fail(Errc::already_assigned,
             "sample '" + s.sample_id +
                 "' already has a split (use force to reassign)");

  Manifest out = m;
  for (Label c = 0; c < out.scheme.num_classes(); ++c) {
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < out.samples.size(); ++k)
      if (out.samples[k].label == c) members.push_back(k);
    if (members.empty()) continue;

    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return out.samples[a].sample_id < out.samples[b].sample_id;
    });
    Rng rng = make_rng(derive_seed(spec.seed, out.scheme.label_name(c)));
    deterministic_shuffle(members, rng);

    const auto counts = detail::apportion(members.size(), spec);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < counts[0]; ++k)
      out.samples[members[pos++]].split = SplitTag::train;
    for (std::size_t k = 0; k < counts[1]; ++k)
      out.samples[members[pos++]].split = SplitTag::val;
    for (std::size_t k = 0; k < counts[2]; ++k)
      out.samples[members[pos++]].split = SplitTag::test;
  }
  return out;
}

// Per-class per-split occupancy, the shape of a dataset description table.
struct SplitReport {
  LabelScheme scheme;
  // Rows follow scheme class order; columns are train/val/test/unassigned.
  std::vector<std::array<std::size_t, 4>> counts;

  std::array<std::size_t, 4> totals() const {
    std::array<std::size_t, 4> t{};
    for (const auto& row : counts)
      for (int k = 0; k < 4; ++k) t[k] += row[k];
    return t;
  }

  std::size_t total() const {
    const auto t = totals();
    return t[0] + t[1] + t[2] + t[3];
  }
};

inline SplitReport split_report(const Manifest& m) {
  SplitReport r;
  r.scheme = m.scheme;
  r.counts.assign(m.scheme.num_classes(), {});
  for (const auto& s : m.samples) {
    int col = 3;
    switch (s.split) {
      case SplitTag::train: col = 0; break;
      case SplitTag::val: col = 1; break;
      case SplitTag::test: col = 2; break;
      case SplitTag::unassigned: col = 3; break;
    }
    ++r.counts[s.label][col];
  }
  return r;
}

// Machine-readable form: label,train,val,test rows plus a totals row.
inline std::string report_to_csv(const SplitReport& r) {
  std::string out = "label,train,val,test\n";
  for (std::size_t c = 0; c < r.counts.size(); ++c) {
    out += r.scheme.class_names[c];
    for (int k = 0; k < 3; ++k)
      out += "," + std::to_string(r.counts[c][k]);
    out.push_back('\n');
  }
  const auto t = r.totals();
  out += "total," + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
         std::to_string(t[2]) + "\n";
  return out;
}

inline std::string report_to_text(const SplitReport& r) {
  std::ostringstream os;
  const bool show_unassigned = r.totals()[3] > 0;
  os << std::left << std::setw(12) << "label" << std::right << std::setw(8)
     << "train" << std::setw(8) << "val" << std::setw(8) << "test";
  if (show_unassigned) os << std::setw(12) << "unassigned";
  os << '\n';
  for (std::size_t c = 0; c < r.counts.size(); ++c) {
    os << std::left << std::setw(12) << r.scheme.class_names[c] << std::right
       << std::setw(8) << r.counts[c][0] << std::setw(8) << r.counts[c][1]
       << std::setw(8) << r.counts[c][2];
    if (show_unassigned) os << std::setw(12) << r.counts[c][3];
    os << '\n';
  }
  const auto t = r.totals();
  os << std::left << std::setw(12) << "total" << std::right << std::setw(8)
     << t[0] << std::setw(8) << t[1] << std::setw(8) << t[2];
  if (show_unassigned) os << std::setw(12) << t[3];
  os << '\n';
  return os.str();
}

}  // namespace roiaug
