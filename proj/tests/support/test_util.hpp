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

// Helpers shared by the test suites: disposable directories, synthetic
// scans and datasets, and byte-level directory snapshots.

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "roiaug/roiaug.hpp"

namespace testutil {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = fs::temp_directory_path() /
            ("roiaug_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// Runs f and returns the code of the roiaug::Error it throws; fails the
// surrounding assertion context if nothing was thrown.
template <typename F>
std::optional<roiaug::Errc> error_code_of(F&& f) {
  try {
    f();
  } catch (const roiaug::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline roiaug::Image random_image(roiaug::Rng& rng, int w, int h, int depth) {
  const std::uint32_t span = depth == 16 ? 65536u : 256u;
  std::vector<std::uint16_t> px(static_cast<std::size_t>(w) * h);
  for (auto& v : px)
    v = static_cast<std::uint16_t>(roiaug::uniform_index(rng, span));
  return roiaug::Image::from_pixels(w, h, depth, std::move(px));
}

inline roiaug::BoundingBox random_box(roiaug::Rng& rng, int w, int h) {
  const int x0 = static_cast<int>(roiaug::uniform_index(rng, w));
  const int x1 = static_cast<int>(roiaug::uniform_index(rng, w));
  const int y0 = static_cast<int>(roiaug::uniform_index(rng, h));
  const int y1 = static_cast<int>(roiaug::uniform_index(rng, h));
  return {std::min(x0, x1), std::min(y0, y1), std::max(x0, x1),
          std::max(y0, y1)};
}

// relative path -> file bytes, for whole-tree determinism checks.
inline std::map<std::string, std::string> tree_snapshot(
    const fs::path& root, const std::set<std::string>& exclude = {}) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel =
        entry.path().lexically_relative(root).generic_string();
    if (exclude.count(entry.path().filename().string())) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    out.emplace(rel, buf.str());
  }
  return out;
}

// Mammography-like synthetic scan: near-black background, one bright tissue
// block, optional brighter lesion squares inside it. mirrored=true puts the
// tissue on the right edge instead of the left.
inline roiaug::Image synthetic_scan(
    int w, int h, int depth, const std::vector<roiaug::BoundingBox>& lesions,
    bool mirrored = false, std::uint16_t tissue = 0, std::uint16_t hot = 0) {
  using roiaug::Image;
  if (tissue == 0) tissue = depth == 16 ? 30000 : 150;
  if (hot == 0) hot = depth == 16 ? 52000 : 230;
  Image img(w, h, depth, 0);
  const int block_w = std::max(2, (2 * w) / 3);
  const int x0 = mirrored ? w - block_w : 0;
  const int x1 = mirrored ? w - 1 : block_w - 1;
  const int y0 = h / 8;
  const int y1 = h - 1 - h / 8;
  for (int j = y0; j <= y1; ++j)
    for (int i = x0; i <= x1; ++i)
      img.set_pixel(i, j, static_cast<std::uint16_t>(tissue + (i + j) % 17));
  for (const auto& b : lesions)
    for (int j = b.y_min; j <= b.y_max; ++j)
      for (int i = b.x_min; i <= b.x_max; ++i)
        img.set_pixel(i, j, static_cast<std::uint16_t>(hot + (i * 3 + j) % 11));
  return img;
}

struct Fixture {
  fs::path root;      // dataset root (images under root/img)
  fs::path manifest;  // root/manifest.csv
  roiaug::Manifest m;
};

// Small five-class dataset with lesion boxes on the high-risk classes and a
// couple of mirrored scans so the orientation path gets exercised. Frame
// sizes vary unless uniform_size is set (cutmix needs a common size).
inline Fixture make_fixture_dataset(const fs::path& root, int n = 12,
                                    int depth = 8,
                                    bool uniform_size = false) {
  using namespace roiaug;
  fs::create_directories(root / "img");
  Fixture f;
  f.root = root;
  f.manifest = root / "manifest.csv";
  f.m.scheme = LabelScheme::birads5();

  for (int k = 0; k < n; ++k) {
    const int w = uniform_size ? 96 : 96 + (k % 3) * 8;
    const int h = uniform_size ? 64 : 64 + (k % 2) * 8;
    AnnotatedSample s;
    s.sample_id = "s" + std::to_string(k);
    s.image_path = "img/" + s.sample_id + ".png";
    s.label = static_cast<Label>(k % 5);

    const bool mirrored = k % 4 == 3;
    std::vector<BoundingBox> lesions;
    if (f.m.scheme.is_high_risk(s.label)) {
      const int block_w = std::max(2, (2 * w) / 3);
      // keep the lesion inside the tissue block on either orientation
      const int base = mirrored ? w - block_w + 6 : 6;
      lesions.push_back(BoundingBox{base + k % 5, 12 + k % 7,
                                    base + k % 5 + 6, 12 + k % 7 + 5});
      s.lesions.push_back({lesions.back(), "discrete_mass"});
      if (k % 3 == 0) {
        lesions.push_back(BoundingBox{base + 14, 30, base + 19, 34});
        s.lesions.push_back({lesions.back(), "spiculated_mass"});
      }
    }
    save_png(synthetic_scan(w, h, depth, lesions, mirrored),
             root / s.image_path);
    f.m.samples.push_back(std::move(s));
  }
  serialize_manifest(f.m, f.manifest);
  return f;
}

// Three-class manifest shaped like the public 322-image screening set:
// 209 normal, 61 benign, 52 malignant, all unassigned. Image paths are
// dummies; splitting never touches pixels.
inline roiaug::Manifest mias_like_manifest() {
  using namespace roiaug;
  Manifest m;
  m.scheme = LabelScheme::tri();
  const std::vector<std::pair<Label, int>> plan = {{0, 209}, {1, 61}, {2, 52}};
  int k = 0;
  for (const auto& [label, count] : plan) {
    for (int i = 0; i < count; ++i, ++k) {
      AnnotatedSample s;
      char id[16];
      std::snprintf(id, sizeof id, "mdb%03d", k);
      s.sample_id = id;
      s.image_path = std::string("img/") + id + ".png";
      s.label = label;
      m.samples.push_back(std::move(s));
    }
  }
  return m;
}

}  // namespace testutil
