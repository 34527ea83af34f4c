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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"

#include "roiaug/error.hpp"
#include "roiaug/image.hpp"
#include "roiaug/manifest.hpp"
#include "roiaug/mask.hpp"
#include "roiaug/png_io.hpp"
#include "roiaug/rng.hpp"

namespace roiaug {

// The two ROI-aware augmentation strategies.
//
// Transparency keeps lesion pixels at full intensity and attenuates
// everything else by a random alpha, preserving the label: the sample still
// shows the same pathology, just with the background dimmed.
//
// CutMix composites the lesion region of a high-risk image onto a low-risk
// background through a binary mask; the output inherits the high-risk
// label.
//
// Augmentation happens offline: a plan is generated first (a pure function
// of manifest, strategy, count, and seed), then executed to disk. Each plan
// record owns an independent generator derived from (seed, source_id,
// replica_index), so outputs never depend on execution order or worker
// count.

struct AlphaRange {
  double low = 0.1;
  double high = 0.9;

  void check() const {
    if (!(0.0 <= low && low <= high && high <= 1.0))
      fail(Errc::invalid_argument, "alpha range must satisfy 0<=low<=high<=1");
  }

  friend bool operator==(const AlphaRange&, const AlphaRange&) = default;
};

enum class Strategy { transparency, cutmix };

inline const char* strategy_name(Strategy s) {
  return s == Strategy::transparency ? "transparency" : "cutmix";
}

inline std::optional<Strategy> parse_strategy(std::string_view token) {
  if (token == "transparency") return Strategy::transparency;
  if (token == "cutmix") return Strategy::cutmix;
  return std::nullopt;
}

// Uniform draw from [low, high]. Consuming the same generator state twice
// yields the same value.
inline double sample_alpha(Rng& rng, const AlphaRange& range) {
  range.check();
  return range.low + uniform_unit(rng) * (range.high - range.low);
}

// Attenuate everything outside the lesion union by alpha; label unchanged.
// Pixels inside the union come through bit-identical.
inline std::pair<Image, Label> transparency(const AnnotatedSample& sample,
                                            const Image& image, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    fail(Errc::invalid_argument, "alpha must be in [0, 1]");
  if (sample.lesions.empty())
    fail(Errc::no_lesion_boxes,
         "sample '" + sample.sample_id + "' has no lesion boxes");
  const auto boxes = sample.lesion_boxes();
  const Mask m = build_mask(image.width(), image.height(), boxes, alpha);
  return {apply_mask(image, m), sample.label};
}

// Paste the source's lesion region onto the background through a binary
// mask; the result carries the source's label. Both images must already be
// at the common size — this operation never resizes.
inline std::pair<Image, Label> cutmix(const LabelScheme& scheme,
                                      const AnnotatedSample& source,
                                      const Image& source_image,
                                      const AnnotatedSample& background,
                                      const Image& background_image) {
  if (source.lesions.empty())
    fail(Errc::no_lesion_boxes,
         "source '" + source.sample_id + "' has no lesion boxes");
  if (!scheme.is_high_risk(source.label))
    fail(Errc::label_not_eligible,
         "source '" + source.sample_id + "' label '" +
             scheme.label_name(source.label) + "' is not in the high-risk set");
  if (!scheme.is_low_risk(background.label))
    fail(Errc::label_not_eligible,
         "background '" + background.sample_id + "' label '" +
             scheme.label_name(background.label) +
             "' is not in the low-risk set");
  if (!source_image.same_shape(background_image))
    fail(Errc::dimension_mismatch,
         "source and background dimensions differ (preprocess both to the "
         "common size first)");
  const auto boxes = source.lesion_boxes();
  const Mask m =
      build_mask(source_image.width(), source_image.height(), boxes, 0.0);
  return {blend(source_image, background_image, m), source.label};
}

struct PlanRecord {
  std::string source_id;
  std::optional<std::string> background_id;  // cutmix only
  std::optional<double> alpha;               // transparency only
  std::string output_id;

  friend bool operator==(const PlanRecord&, const PlanRecord&) = default;
};

struct AugmentPlan {
  std::uint64_t seed = 0;
  int per_sample_count = 0;
  Strategy strategy = Strategy::transparency;
  AlphaRange alpha_range{};
  std::vector<PlanRecord> records;

  friend bool operator==(const AugmentPlan&, const AugmentPlan&) = default;
};

// Deterministic in (manifest, strategy, count, seed): every train-split
// sample with lesions and a high-risk label becomes a source of
// per_sample_count records. Transparency draws one alpha per record;
// cutmix draws one background uniformly from the train-split low-risk pool.
inline AugmentPlan build_plan(const Manifest& m, Strategy strategy,
                              int per_sample_count, std::uint64_t seed,
                              AlphaRange alpha_range = {}) {
  alpha_range.check();
  if (per_sample_count < 0)
    fail(Errc::invalid_argument, "per-sample count must be >= 0");

  AugmentPlan plan;
  plan.seed = seed;
  plan.per_sample_count = per_sample_count;
  plan.strategy = strategy;
  plan.alpha_range = alpha_range;
  if (per_sample_count == 0) return plan;

  std::vector<const AnnotatedSample*> sources;
  std::vector<const AnnotatedSample*> backgrounds;
  for (const auto& s : m.samples) {
    if (s.split != SplitTag::train) continue;
    if (m.scheme.is_high_risk(s.label) && !s.lesions.empty())
      sources.push_back(&s);
    if (m.scheme.is_low_risk(s.label)) backgrounds.push_back(&s);
  }
  if (sources.empty())
    fail(Errc::no_eligible_sources,
         "no train-split sample has lesions and a high-risk label");
  if (strategy == Strategy::cutmix && backgrounds.empty())
    fail(Errc::no_eligible_backgrounds,
         "no train-split sample has a low-risk label");

  for (const AnnotatedSample* src : sources) {
    for (int r = 0; r < per_sample_count; ++r) {
      Rng rng = make_rng(derive_seed(seed, src->sample_id,
                                     static_cast<std::uint64_t>(r)));
      PlanRecord rec;
      rec.source_id = src->sample_id;
      rec.output_id = src->sample_id + "__" + strategy_name(strategy) + "__" +
                      std::to_string(r);
      if (strategy == Strategy::transparency) {
        rec.alpha = sample_alpha(rng, alpha_range);
      } else {
        rec.background_id =
            backgrounds[uniform_index(rng, backgrounds.size())]->sample_id;
      }
      plan.records.push_back(std::move(rec));
    }
  }
  return plan;
}

inline std::string plan_to_json(const AugmentPlan& plan) {
  nlohmann::json j;
  j["strategy"] = strategy_name(plan.strategy);
  j["seed"] = plan.seed;
  j["per_sample_count"] = plan.per_sample_count;
  j["alpha_range"] = {{"low", plan.alpha_range.low},
                      {"high", plan.alpha_range.high}};
  j["records"] = nlohmann::json::array();
  for (const PlanRecord& r : plan.records) {
    nlohmann::json jr;
    jr["source_id"] = r.source_id;
    jr["background_id"] =
        r.background_id ? nlohmann::json(*r.background_id) : nullptr;
    jr["alpha"] = r.alpha ? nlohmann::json(*r.alpha) : nullptr;
    jr["output_id"] = r.output_id;
    j["records"].push_back(std::move(jr));
  }
  return j.dump(2) + "\n";
}

inline AugmentPlan plan_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  AugmentPlan plan;
  const auto strategy = parse_strategy(j.at("strategy").get<std::string>());
  if (!strategy) fail(Errc::invalid_argument, "unknown strategy in plan");
  plan.strategy = *strategy;
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.per_sample_count = j.at("per_sample_count").get<int>();
  plan.alpha_range.low = j.at("alpha_range").at("low").get<double>();
  plan.alpha_range.high = j.at("alpha_range").at("high").get<double>();
  for (const auto& jr : j.at("records")) {
    PlanRecord r;
    r.source_id = jr.at("source_id").get<std::string>();
    if (!jr.at("background_id").is_null())
      r.background_id = jr.at("background_id").get<std::string>();
    if (!jr.at("alpha").is_null()) r.alpha = jr.at("alpha").get<double>();
    r.output_id = jr.at("output_id").get<std::string>();
    plan.records.push_back(std::move(r));
  }
  return plan;
}

namespace detail {

// image_path entries stay resolvable against the caller's image_root even
// when outputs land in a different directory.
inline std::string output_rel_path(const std::filesystem::path& image_root,
                                   const std::filesystem::path& out_root,
                                   const std::string& filename) {
  namespace fs = std::filesystem;
  const auto rel = fs::weakly_canonical(out_root)
                       .lexically_relative(fs::weakly_canonical(image_root));
  if (rel.empty())
    return (fs::weakly_canonical(out_root) / filename).generic_string();
  return (rel / filename).lexically_normal().generic_string();
}

}  // namespace detail

// Materializes one PNG per record under out_root and returns the input
// manifest extended with the augmented samples (source's label and lesion
// boxes, split=train). Outputs are a pure function of (record, inputs):
// any worker count or schedule produces identical files, and re-running
// overwrites byte-identically.
inline Manifest execute_plan(const AugmentPlan& plan, const Manifest& m,
                             const std::filesystem::path& image_root,
                             const std::filesystem::path& out_root,
                             int workers = 1) {
  namespace fs = std::filesystem;
  if (workers < 1) fail(Errc::invalid_argument, "workers must be >= 1");
  plan.alpha_range.check();

  const auto index = m.index_by_id();
  auto sample_of = [&](const std::string& id) -> const AnnotatedSample& {
    const auto it = index.find(id);
    if (it == index.end())
      fail(Errc::invalid_argument,
           "plan references unknown sample '" + id + "'");
    return m.samples[it->second];
  };

  // Validate plan/manifest consistency up front so workers only see
  // well-formed records.
  std::unordered_set<std::string> output_ids;
  for (const PlanRecord& rec : plan.records) {
    sample_of(rec.source_id);
    if (rec.background_id) sample_of(*rec.background_id);
    if (plan.strategy == Strategy::transparency && !rec.alpha)
      fail(Errc::invalid_argument,
           "transparency record '" + rec.output_id + "' missing alpha");
    if (plan.strategy == Strategy::cutmix && !rec.background_id)
      fail(Errc::invalid_argument,
           "cutmix record '" + rec.output_id + "' missing background");
    if (index.count(rec.output_id) || !output_ids.insert(rec.output_id).second)
      fail(Errc::duplicate_id,
           "output id '" + rec.output_id + "' collides with an existing id");
  }

  std::error_code ec;
  fs::create_directories(out_root, ec);
  if (ec) fail(Errc::io_error, "cannot create " + out_root.string());

  auto run_record = [&](const PlanRecord& rec) {
    const AnnotatedSample& src = sample_of(rec.source_id);
    const Image src_img = load_png(image_root / src.image_path);
    Image out_img;
    if (plan.strategy == Strategy::transparency) {
      out_img = transparency(src, src_img, *rec.alpha).first;
    } else {
      const AnnotatedSample& bg = sample_of(*rec.background_id);
      const Image bg_img = load_png(image_root / bg.image_path);
      out_img = cutmix(m.scheme, src, src_img, bg, bg_img).first;
    }
    save_png(out_img, out_root / (rec.output_id + ".png"));
  };

  if (workers == 1 || plan.records.size() <= 1) {
    for (std::size_t k = 0; k < plan.records.size(); ++k) {
      try {
        run_record(plan.records[k]);
      } catch (const Error& e) {
        throw Error(e.code(), "record " + std::to_string(k) + " ('" +
                                  plan.records[k].output_id +
                                  "'): " + e.what());
      }
    }
  } else {
    // Fan out over records; every record is independent, so the schedule
    // cannot affect outputs. The lowest-index failure wins to keep error
    // reporting deterministic too.
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t first_bad = plan.records.size();
    std::optional<Error> first_error;

    auto worker = [&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= plan.records.size()) return;
        try {
          run_record(plan.records[k]);
        } catch (const Error& e) {
          std::lock_guard<std::mutex> lock(mu);
          if (k < first_bad) {
            first_bad = k;
            first_error = Error(e.code(), "record " + std::to_string(k) +
                                              " ('" +
                                              plan.records[k].output_id +
                                              "'): " + e.what());
          }
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(mu);
          if (k < first_bad) {
            first_bad = k;
            first_error = Error(Errc::io_error,
                                "record " + std::to_string(k) + ": " +
                                    e.what());
          }
        }
      }
    };

    std::vector<std::thread> pool;
    const int n = std::min<int>(workers, static_cast<int>(plan.records.size()));
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) throw *first_error;
  }

  Manifest out = m;
  for (const PlanRecord& rec : plan.records) {
    const AnnotatedSample& src = sample_of(rec.source_id);
    AnnotatedSample aug;
    aug.sample_id = rec.output_id;
    aug.image_path =
        detail::output_rel_path(image_root, out_root, rec.output_id + ".png");
    aug.label = src.label;
    aug.lesions = src.lesions;
    aug.split = SplitTag::train;
    out.samples.push_back(std::move(aug));
  }
  return out;
}

}  // namespace roiaug
