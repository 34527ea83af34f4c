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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "roiaug/augment.hpp"
#include "support/test_util.hpp"

using namespace roiaug;
using testutil::error_code_of;

namespace {

AnnotatedSample sample_with_boxes(const std::string& id, Label label,
                                  std::vector<BoundingBox> boxes,
                                  SplitTag split = SplitTag::train) {
  AnnotatedSample s;
  s.sample_id = id;
  s.image_path = "img/" + id + ".png";
  s.label = label;
  s.split = split;
  for (const auto& b : boxes) s.lesions.push_back({b, "discrete_mass"});
  return s;
}

}  // namespace

TEST_CASE("sample_alpha on a degenerate range is exact", "[augment]") {
  Rng rng = make_rng(42);
  for (int k = 0; k < 10; ++k)
    CHECK(sample_alpha(rng, AlphaRange{0.5, 0.5}) == 0.5);
}

TEST_CASE("sample_alpha is deterministic in the seed", "[augment]") {
  Rng a = make_rng(42);
  Rng b = make_rng(42);
  const AlphaRange range{};
  for (int k = 0; k < 100; ++k)
    CHECK(sample_alpha(a, range) == sample_alpha(b, range));
}

TEST_CASE("sample_alpha stays in range with mean near the midpoint",
          "[augment]") {
  Rng rng = make_rng(7);
  const AlphaRange range{};
  double sum = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const double a = sample_alpha(rng, range);
    REQUIRE(a >= 0.1);
    REQUIRE(a <= 0.9);
    sum += a;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("alpha range is validated", "[augment]") {
  CHECK(error_code_of([] { AlphaRange{0.9, 0.1}.check(); }) ==
        Errc::invalid_argument);
  CHECK(error_code_of([] { AlphaRange{-0.1, 0.5}.check(); }) ==
        Errc::invalid_argument);
  CHECK(error_code_of([] { AlphaRange{0.5, 1.2}.check(); }) ==
        Errc::invalid_argument);
}

TEST_CASE("transparency with alpha 1 is the identity", "[augment]") {
  Rng rng = make_rng(9);
  const Image img = testutil::random_image(rng, 12, 10, 8);
  const auto s = sample_with_boxes("a", 3, {{2, 2, 5, 5}});
  const auto [out, label] = transparency(s, img, 1.0);
  CHECK(out == img);
  CHECK(label == s.label);
}

TEST_CASE("transparency dims only the background", "[augment]") {
  const Image img = Image::from_pixels(2, 2, 8, {10, 20, 30, 40});
  const auto s = sample_with_boxes("a", 4, {{0, 0, 0, 0}});
  const auto [out, label] = transparency(s, img, 0.5);
  CHECK(out.pixel(0, 0) == 10);  // inside the box, untouched
  CHECK(out.pixel(1, 0) == 10);
  CHECK(out.pixel(0, 1) == 15);
  CHECK(out.pixel(1, 1) == 20);
  CHECK(label == s.label);
}

TEST_CASE("transparency preserves the label for any alpha", "[augment]") {
  Rng rng = make_rng(10);
  const Image img = testutil::random_image(rng, 8, 8, 8);
  const auto s = sample_with_boxes("a", 3, {{1, 1, 4, 4}});  // class "4"
  for (double alpha : {0.0, 0.1, 0.33, 0.9, 1.0}) {
    const auto [out, label] = transparency(s, img, alpha);
    CHECK(label == s.label);
  }
}

TEST_CASE("transparency requires lesions and a sane alpha", "[augment]") {
  const Image img(4, 4, 8, 5);
  const auto bare = sample_with_boxes("a", 3, {});
  CHECK(error_code_of([&] { transparency(bare, img, 0.5); }) ==
        Errc::no_lesion_boxes);
  const auto s = sample_with_boxes("a", 3, {{0, 0, 1, 1}});
  CHECK(error_code_of([&] { transparency(s, img, 1.5); }) ==
        Errc::invalid_argument);
  const auto outside = sample_with_boxes("a", 3, {{0, 0, 9, 9}});
  CHECK(error_code_of([&] { transparency(outside, img, 0.5); }) ==
        Errc::box_out_of_bounds);
}

TEST_CASE("transparency keeps lesion pixels bit-identical", "[augment]") {
  Rng rng = make_rng(11);
  for (int round = 0; round < 30; ++round) {
    const int depth = round % 2 ? 16 : 8;
    const int w = 4 + static_cast<int>(uniform_index(rng, 28));
    const int h = 4 + static_cast<int>(uniform_index(rng, 28));
    const Image img = testutil::random_image(rng, w, h, depth);
    std::vector<BoundingBox> boxes;
    const int nb = 1 + static_cast<int>(uniform_index(rng, 3));
    for (int k = 0; k < nb; ++k) boxes.push_back(testutil::random_box(rng, w, h));
    const double alpha = 0.1 + uniform_unit(rng) * 0.8;
    const auto s = sample_with_boxes("a", 4, boxes);
    const auto [out, label] = transparency(s, img, alpha);

    for (int j = 0; j < h; ++j)
      for (int i = 0; i < w; ++i) {
        bool inside = false;
        for (const auto& b : boxes) inside = inside || b.contains(i, j);
        if (inside) {
          REQUIRE(out.pixel(i, j) == img.pixel(i, j));
        } else {
          REQUIRE(out.pixel(i, j) ==
                  static_cast<std::uint16_t>(
                      round_half_even(alpha * img.pixel(i, j))));
        }
      }
  }
}

TEST_CASE("cutmix with a whole-image box copies the source", "[augment]") {
  Rng rng = make_rng(12);
  const auto scheme = LabelScheme::birads5();
  const Image src_img = testutil::random_image(rng, 10, 8, 8);
  const Image bg_img = testutil::random_image(rng, 10, 8, 8);
  const auto src = sample_with_boxes("hi", 4, {{0, 0, 9, 7}});
  const auto bg = sample_with_boxes("lo", 0, {});
  const auto [out, label] = cutmix(scheme, src, src_img, bg, bg_img);
  CHECK(out == src_img);
  CHECK(label == src.label);
}

TEST_CASE("cutmix pastes the lesion region onto the background", "[augment]") {
  const auto scheme = LabelScheme::birads5();
  const Image src_img(2, 2, 8, 100);
  const Image bg_img(2, 2, 8, 50);
  const auto src = sample_with_boxes("hi", 4, {{0, 0, 0, 0}});
  const auto bg = sample_with_boxes("lo", 0, {});
  const auto [out, label] = cutmix(scheme, src, src_img, bg, bg_img);
  CHECK(out.pixel(0, 0) == 100);
  CHECK(out.pixel(1, 0) == 50);
  CHECK(out.pixel(0, 1) == 50);
  CHECK(out.pixel(1, 1) == 50);
  CHECK(label == src.label);
}

TEST_CASE("cutmix output carries the high-risk label", "[augment]") {
  const auto scheme = LabelScheme::birads5();
  const Image a(4, 4, 8, 9), b(4, 4, 8, 1);
  const auto src = sample_with_boxes("hi", 4, {{1, 1, 2, 2}});  // class "5"
  const auto bg = sample_with_boxes("lo", 0, {});               // class "1"
  const auto [out, label] = cutmix(scheme, src, a, bg, b);
  CHECK(scheme.label_name(label) == "5");
}

TEST_CASE("cutmix validates labels, boxes, and shapes", "[augment]") {
  const auto scheme = LabelScheme::birads5();
  const Image img(4, 4, 8, 7);
  const auto high = sample_with_boxes("hi", 4, {{0, 0, 1, 1}});
  const auto low = sample_with_boxes("lo", 0, {});

  const auto no_boxes = sample_with_boxes("hi2", 4, {});
  CHECK(error_code_of([&] { cutmix(scheme, no_boxes, img, low, img); }) ==
        Errc::no_lesion_boxes);

  // a lesioned low-risk sample still cannot be a source
  const auto low_boxed = sample_with_boxes("lo2", 1, {{0, 0, 1, 1}});
  try {
    cutmix(scheme, low_boxed, img, low, img);
    FAIL("expected LabelNotEligible");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::label_not_eligible);
    CHECK(std::string(e.what()).find("source") != std::string::npos);
  }

  try {
    cutmix(scheme, high, img, high, img);  // high-risk cannot be a background
    FAIL("expected LabelNotEligible");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::label_not_eligible);
    CHECK(std::string(e.what()).find("background") != std::string::npos);
  }

  const Image other(5, 4, 8, 7);
  CHECK(error_code_of([&] { cutmix(scheme, high, img, low, other); }) ==
        Errc::dimension_mismatch);
  const Image deep(4, 4, 16, 7);
  CHECK(error_code_of([&] { cutmix(scheme, high, img, low, deep); }) ==
        Errc::bit_depth_mismatch);
}

TEST_CASE("cutmix output pixels partition between the two inputs",
          "[augment]") {
  Rng rng = make_rng(13);
  const auto scheme = LabelScheme::birads5();
  for (int round = 0; round < 25; ++round) {
    const int w = 4 + static_cast<int>(uniform_index(rng, 20));
    const int h = 4 + static_cast<int>(uniform_index(rng, 20));
    const Image a = testutil::random_image(rng, w, h, 16);
    const Image b = testutil::random_image(rng, w, h, 16);
    std::vector<BoundingBox> boxes = {testutil::random_box(rng, w, h),
                                      testutil::random_box(rng, w, h)};
    const auto src = sample_with_boxes("hi", 3, boxes);
    const auto bg = sample_with_boxes("lo", 1, {});
    const auto [out, label] = cutmix(scheme, src, a, bg, b);
    for (int j = 0; j < h; ++j)
      for (int i = 0; i < w; ++i) {
        bool inside = false;
        for (const auto& bx : boxes) inside = inside || bx.contains(i, j);
        REQUIRE(out.pixel(i, j) == (inside ? a.pixel(i, j) : b.pixel(i, j)));
      }
  }
}

TEST_CASE("build_plan with count 0 is empty", "[augment]") {
  Manifest m;
  m.scheme = LabelScheme::birads5();
  const AugmentPlan plan = build_plan(m, Strategy::transparency, 0, 1);
  CHECK(plan.records.empty());
}

TEST_CASE("build_plan emits count records per eligible source", "[augment]") {
  Manifest m;
  m.scheme = LabelScheme::birads5();
  m.samples.push_back(sample_with_boxes("h1", 2, {{0, 0, 3, 3}}));
  m.samples.push_back(sample_with_boxes("h2", 3, {{1, 1, 2, 2}}));
  m.samples.push_back(sample_with_boxes("h3", 4, {{0, 0, 1, 1}}));
  m.samples.push_back(sample_with_boxes("l1", 0, {}));
  m.samples.push_back(sample_with_boxes("nolesion", 4, {}));  // not eligible
  m.samples.push_back(
      sample_with_boxes("testonly", 4, {{0, 0, 1, 1}}, SplitTag::test));

  const AugmentPlan plan = build_plan(m, Strategy::transparency, 2, 5);
  REQUIRE(plan.records.size() == 6);
  for (const auto& r : plan.records) {
    REQUIRE(r.alpha.has_value());
    CHECK(*r.alpha >= 0.1);
    CHECK(*r.alpha <= 0.9);
    CHECK_FALSE(r.background_id.has_value());
  }
  CHECK(plan.records[0].output_id == "h1__transparency__0");
  CHECK(plan.records[1].output_id == "h1__transparency__1");
  CHECK(plan.records[5].output_id == "h3__transparency__1");
}

TEST_CASE("plan alphas follow the per-record derivation", "[augment]") {
  Manifest m;
  m.scheme = LabelScheme::birads5();
  m.samples.push_back(sample_with_boxes("src", 4, {{0, 0, 1, 1}}));
  const std::uint64_t seed = 99;
  const AugmentPlan plan = build_plan(m, Strategy::transparency, 3, seed);
  REQUIRE(plan.records.size() == 3);
  for (int r = 0; r < 3; ++r) {
    Rng rng = make_rng(derive_seed(seed, "src", static_cast<std::uint64_t>(r)));
    CHECK(*plan.records[r].alpha == sample_alpha(rng, AlphaRange{}));
  }
}

TEST_CASE("cutmix plans draw low-risk train backgrounds", "[augment]") {
  Manifest m;
  m.scheme = LabelScheme::birads5();
  m.samples.push_back(sample_with_boxes("h1", 4, {{0, 0, 1, 1}}));
  m.samples.push_back(sample_with_boxes("l1", 0, {}));
  m.samples.push_back(sample_with_boxes("l2", 1, {}));
  m.samples.push_back(sample_with_boxes("l3", 1, {}, SplitTag::test));

  const AugmentPlan plan = build_plan(m, Strategy::cutmix, 20, 3);
  REQUIRE(plan.records.size() == 20);
  for (const auto& r : plan.records) {
    REQUIRE(r.background_id.has_value());
    CHECK((*r.background_id == "l1" || *r.background_id == "l2"));
    CHECK_FALSE(r.alpha.has_value());
  }
}

TEST_CASE("build_plan is deterministic", "[augment]") {
  Manifest m;
  m.scheme = LabelScheme::birads5();
  m.samples.push_back(sample_with_boxes("h1", 3, {{0, 0, 2, 2}}));
  m.samples.push_back(sample_with_boxes("h2", 4, {{1, 0, 2, 1}}));
  m.samples.push_back(sample_with_boxes("l1", 0, {}));
  for (Strategy strategy : {Strategy::transparency, Strategy::cutmix}) {
    const AugmentPlan a = build_plan(m, strategy, 4, 77);
    const AugmentPlan b = build_plan(m, strategy, 4, 77);
    CHECK(a == b);
    CHECK(plan_to_json(a) == plan_to_json(b));
  }
}

TEST_CASE("build_plan eligibility errors", "[augment]") {
  Manifest m;
  m.scheme = LabelScheme::birads5();
  m.samples.push_back(sample_with_boxes("l1", 0, {}));
  CHECK(error_code_of([&] {
          build_plan(m, Strategy::transparency, 1, 0);
        }) == Errc::no_eligible_sources);

  Manifest m2;
  m2.scheme = LabelScheme::birads5();
  m2.samples.push_back(sample_with_boxes("h1", 4, {{0, 0, 1, 1}}));
  CHECK(error_code_of([&] { build_plan(m2, Strategy::cutmix, 1, 0); }) ==
        Errc::no_eligible_backgrounds);
  CHECK(error_code_of([&] { build_plan(m2, Strategy::cutmix, -1, 0); }) ==
        Errc::invalid_argument);
}

TEST_CASE("plan JSON round-trips", "[augment]") {
  Manifest m;
  m.scheme = LabelScheme::birads5();
  m.samples.push_back(sample_with_boxes("h1", 3, {{0, 0, 2, 2}}));
  m.samples.push_back(sample_with_boxes("l1", 1, {}));
  for (Strategy strategy : {Strategy::transparency, Strategy::cutmix}) {
    const AugmentPlan plan = build_plan(m, strategy, 3, 12345);
    CHECK(plan_from_json(plan_to_json(plan)) == plan);
  }
}

TEST_CASE("execute_plan materializes records and extends the manifest",
          "[augment]") {
  testutil::TempDir dir("exec");
  const auto f = testutil::make_fixture_dataset(dir.path() / "ds", 10);

  // assign everything to train so sources exist
  Manifest m = f.m;
  for (auto& s : m.samples) s.split = SplitTag::train;

  const AugmentPlan plan = build_plan(m, Strategy::transparency, 1, 21);
  const auto out_root = dir.path() / "aug";
  const Manifest out = execute_plan(plan, m, f.root, out_root);

  REQUIRE(out.samples.size() == m.samples.size() + plan.records.size());
  auto id_to_sample = m.index_by_id();
  for (std::size_t k = 0; k < plan.records.size(); ++k) {
    const auto& rec = plan.records[k];
    const auto& aug = out.samples[m.samples.size() + k];
    const auto& src = m.samples[id_to_sample.at(rec.source_id)];
    CHECK(aug.sample_id == rec.output_id);
    CHECK(aug.label == src.label);
    CHECK(aug.split == SplitTag::train);
    CHECK(aug.lesions == src.lesions);
    CHECK(std::filesystem::exists(out_root / (rec.output_id + ".png")));

    // pixels obey the transform
    const Image src_img = load_png(f.root / src.image_path);
    const Image aug_img = load_png(out_root / (rec.output_id + ".png"));
    CHECK(aug_img == transparency(src, src_img, *rec.alpha).first);
  }

  // the augmented manifest resolves against the original image root
  for (const auto& s : out.samples)
    CHECK(std::filesystem::exists(f.root / s.image_path));
}

TEST_CASE("empty plan returns the manifest unchanged", "[augment]") {
  testutil::TempDir dir("exec_empty");
  const auto f = testutil::make_fixture_dataset(dir.path() / "ds", 4);
  const AugmentPlan plan = build_plan(f.m, Strategy::transparency, 0, 1);
  const Manifest out = execute_plan(plan, f.m, f.root, dir.path() / "aug");
  CHECK(out == f.m);
}

TEST_CASE("execute_plan is idempotent and worker-count invariant",
          "[augment]") {
  testutil::TempDir dir("exec_det");
  // cutmix blends pairs, so the fixture must share one frame size
  const auto f = testutil::make_fixture_dataset(dir.path() / "ds", 10, 8, true);
  Manifest m = f.m;
  for (auto& s : m.samples) s.split = SplitTag::train;
  const AugmentPlan plan = build_plan(m, Strategy::cutmix, 2, 4);

  const auto out1 = dir.path() / "aug1";
  const auto out2 = dir.path() / "aug2";
  execute_plan(plan, m, f.root, out1, 1);
  execute_plan(plan, m, f.root, out1, 1);  // overwrite in place
  execute_plan(plan, m, f.root, out2, 4);

  const auto snap1 = testutil::tree_snapshot(out1);
  const auto snap2 = testutil::tree_snapshot(out2);
  CHECK(snap1 == snap2);
  CHECK_FALSE(snap1.empty());
}

TEST_CASE("execute_plan reports the failing record deterministically",
          "[augment]") {
  testutil::TempDir dir("exec_err");
  const auto f = testutil::make_fixture_dataset(dir.path() / "ds", 8);
  Manifest m = f.m;
  for (auto& s : m.samples) s.split = SplitTag::train;
  const AugmentPlan plan = build_plan(m, Strategy::transparency, 1, 2);
  REQUIRE(plan.records.size() >= 2);

  // break the second record's source image
  const auto& bad_id = plan.records[1].source_id;
  for (const auto& s : m.samples)
    if (s.sample_id == bad_id)
      std::filesystem::remove(f.root / s.image_path);

  for (int workers : {1, 4}) {
    try {
      execute_plan(plan, m, f.root, dir.path() / "aug", workers);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::io_error);
      CHECK(std::string(e.what()).find("record 1") != std::string::npos);
    }
  }
}

TEST_CASE("transparency raises each eligible class count by k per source",
          "[augment]") {
  testutil::TempDir dir("exec_dist");
  const auto f = testutil::make_fixture_dataset(dir.path() / "ds", 12);
  Manifest m = f.m;
  for (auto& s : m.samples) s.split = SplitTag::train;

  const int k = 3;
  const AugmentPlan plan = build_plan(m, Strategy::transparency, k, 6);
  const Manifest out = execute_plan(plan, m, f.root, dir.path() / "aug");

  std::vector<std::size_t> lesioned(m.scheme.num_classes(), 0);
  for (const auto& s : m.samples)
    if (m.scheme.is_high_risk(s.label) && !s.lesions.empty()) ++lesioned[s.label];

  const auto before = m.class_histogram();
  const auto after = out.class_histogram();
  for (std::size_t c = 0; c < before.size(); ++c)
    CHECK(after[c] == before[c] + k * lesioned[c]);
}
