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
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "roiaug/augment.hpp"
#include "roiaug/error.hpp"
#include "roiaug/manifest.hpp"
#include "roiaug/metrics.hpp"
#include "roiaug/preprocess.hpp"
#include "roiaug/split.hpp"

namespace roiaug::cli {

// Batch frontend: composable stages over manifest files. Every stage that
// has an output directory drops a run.json with the resolved configuration
// so the run can be audited and replayed. Worker counts change wall-clock
// only, never bytes.

enum class Command { validate, preprocess, split, augment, evaluate, report };

inline const char* command_name(Command c) {
  switch (c) {
    case Command::validate: return "validate";
    case Command::preprocess: return "preprocess";
    case Command::split: return "split";
    case Command::augment: return "augment";
    case Command::evaluate: return "evaluate";
    case Command::report: return "report";
  }
  return "?";
}

struct RunConfig {
  Command command = Command::report;
  std::filesystem::path manifest;
  std::filesystem::path image_root;
  std::filesystem::path out_root;     // empty = report-style command, stdout only
  std::filesystem::path predictions;  // evaluate
  std::filesystem::path crop_boxes;   // preprocess sidecar, optional
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::transparency;
  int per_sample_count = 1;
  AlphaRange alpha_range{};
  int target_w = 1024;
  int target_h = 768;
  double threshold_fraction = 0.05;
  double ratio_train = 0.8;
  double ratio_val = 0.0;
  double ratio_test = 0.2;
  int workers = 1;
  std::string split_filter = "all";  // evaluate: all|train|val|test|unassigned
  bool force = false;
};

// Exit codes: 0 ok, 1 validation failures, 2 usage, 3 I/O, 4 bad data.
inline int exit_code_for(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return 2;
    case Errc::io_error:
    case Errc::decode_error: return 3;
    default: return 4;
  }
}

namespace detail {

inline std::string canon(const std::filesystem::path& p) {
  return p.empty() ? std::string()
                   : std::filesystem::weakly_canonical(p).generic_string();
}

inline nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = command_name(c.command);
  j["manifest"] = canon(c.manifest);
  j["image_root"] = canon(c.image_root);
  j["out_root"] = canon(c.out_root);
  j["predictions"] = canon(c.predictions);
  j["crop_boxes"] = canon(c.crop_boxes);
  j["seed"] = c.seed;
  j["strategy"] = strategy_name(c.strategy);
  j["per_sample_count"] = c.per_sample_count;
  j["alpha_low"] = c.alpha_range.low;
  j["alpha_high"] = c.alpha_range.high;
  j["target_w"] = c.target_w;
  j["target_h"] = c.target_h;
  j["threshold_fraction"] = c.threshold_fraction;
  j["ratio_train"] = c.ratio_train;
  j["ratio_val"] = c.ratio_val;
  j["ratio_test"] = c.ratio_test;
  j["workers"] = c.workers;
  j["split_filter"] = c.split_filter;
  j["force"] = c.force;
  return j;
}

inline void write_text(const std::filesystem::path& path,
                       const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(Errc::io_error, "short write to " + path.string());
}

inline void ensure_out_dir(const std::filesystem::path& out_root) {
  std::error_code ec;
  std::filesystem::create_directories(out_root, ec);
  if (ec) fail(Errc::io_error, "cannot create " + out_root.string());
}

inline void write_run_json(const RunConfig& c) {
  if (c.out_root.empty()) return;
  ensure_out_dir(c.out_root);
  write_text(c.out_root / "run.json", config_json(c).dump(2) + "\n");
}

// Per-sample geometric normalization: crop -> orient -> resize.
inline AnnotatedSample preprocess_one(
    const RunConfig& cfg, const AnnotatedSample& s,
    const std::unordered_map<std::string, BoundingBox>& crop_boxes) {
  const Image img = load_png(cfg.image_root / s.image_path);

  BoundingBox region;
  if (const auto it = crop_boxes.find(s.sample_id); it != crop_boxes.end())
    region = it->second;
  else
    region = detect_foreground(img, cfg.threshold_fraction);

  CropResult cr = crop(img, region, s.lesion_boxes());

  Image oriented = std::move(cr.cropped);
  std::vector<BoundingBox> boxes = std::move(cr.transformed_lesions);
  if (laterality(oriented) == Laterality::right) {
    auto flipped = flip_horizontal(oriented, boxes);
    oriented = std::move(flipped.first);
    boxes = std::move(flipped.second);
  }

  auto resized = resize(oriented, boxes, cfg.target_w, cfg.target_h);

  AnnotatedSample out = s;
  out.image_path = s.sample_id + ".png";
  out.lesions.clear();
  for (std::size_t k = 0; k < resized.second.size(); ++k)
    out.lesions.push_back({resized.second[k], s.lesions[k].type});
  save_png(resized.first, cfg.out_root / out.image_path);
  return out;
}

inline int run_validate(const RunConfig& cfg) {
  const Manifest m = parse_manifest(cfg.manifest);
  const auto violations = validate_manifest(m, cfg.image_root);
  std::string csv = "kind,sample_id,lesion_index,detail\n";
  for (const Violation& v : violations) {
    std::cout << violation_name(v.kind) << " sample=" << v.sample_id;
    if (v.lesion_index >= 0) std::cout << " lesion=" << v.lesion_index;
    std::cout << ' ' << v.detail << '\n';
    csv += std::string(violation_name(v.kind)) + "," + v.sample_id + "," +
           (v.lesion_index >= 0 ? std::to_string(v.lesion_index) : "") + ",\"" +
           v.detail + "\"\n";
  }
  std::cout << violations.size() << " violation(s), " << m.samples.size()
            << " sample(s)\n";
  if (!cfg.out_root.empty()) {
    ensure_out_dir(cfg.out_root);
    write_text(cfg.out_root / "violations.csv", csv);
    write_run_json(cfg);
  }
  return violations.empty() ? 0 : 1;
}

inline int run_preprocess(const RunConfig& cfg) {
  const Manifest m = parse_manifest(cfg.manifest);
  std::unordered_map<std::string, BoundingBox> crop_boxes;
  if (!cfg.crop_boxes.empty()) crop_boxes = parse_crop_boxes(cfg.crop_boxes);
  ensure_out_dir(cfg.out_root);

  Manifest out = m;
  const std::size_t n = m.samples.size();
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t first_bad = n;
  std::optional<Error> first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= n) return;
      try {
        out.samples[k] = preprocess_one(cfg, m.samples[k], crop_boxes);
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(mu);
        if (k < first_bad) {
          first_bad = k;
          first_error = Error(e.code(), "sample '" + m.samples[k].sample_id +
                                            "': " + e.what());
        }
      }
    }
  };

  const int threads =
      std::max(1, std::min<int>(cfg.workers, static_cast<int>(n ? n : 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) throw *first_error;

  serialize_manifest(out, cfg.out_root / "manifest.preprocessed.csv");
  write_run_json(cfg);
  std::cout << "preprocessed " << n << " sample(s) to " << cfg.target_w << "x"
            << cfg.target_h << '\n';
  return 0;
}

inline int run_split(const RunConfig& cfg) {
  const Manifest m = parse_manifest(cfg.manifest);
  const SplitSpec spec{cfg.ratio_train, cfg.ratio_val, cfg.ratio_test,
                       cfg.seed};
  const Manifest assigned = stratified_split(m, spec, cfg.force);
  ensure_out_dir(cfg.out_root);
  serialize_manifest(assigned, cfg.out_root / "manifest.split.csv");
  write_run_json(cfg);
  std::cout << report_to_text(split_report(assigned));
  return 0;
}

inline int run_augment(const RunConfig& cfg) {
  const Manifest m = parse_manifest(cfg.manifest);
  const AugmentPlan plan = build_plan(m, cfg.strategy, cfg.per_sample_count,
                                      cfg.seed, cfg.alpha_range);
  const Manifest out =
      execute_plan(plan, m, cfg.image_root, cfg.out_root, cfg.workers);
  serialize_manifest(out, cfg.out_root / "manifest.augmented.csv");
  write_text(cfg.out_root / "plan.json", plan_to_json(plan));
  write_run_json(cfg);
  std::cout << "augmented: " << plan.records.size() << " record(s), manifest "
            << out.samples.size() << " sample(s)\n";
  return 0;
}

inline int run_evaluate(const RunConfig& cfg) {
  Manifest m = parse_manifest(cfg.manifest);
  if (cfg.split_filter != "all") {
    const auto tag = parse_split(cfg.split_filter);
    if (!tag)
      fail(Errc::invalid_argument,
           "unknown split filter '" + cfg.split_filter + "'");
    std::erase_if(m.samples,
                  [&](const AnnotatedSample& s) { return s.split != *tag; });
  }
  const ConfusionMatrix cm = confusion(m, cfg.predictions);
  std::cout << metrics_to_text(cm);
  if (!cfg.out_root.empty()) {
    ensure_out_dir(cfg.out_root);
    write_text(cfg.out_root / "metrics.csv", metrics_to_csv(cm));
    write_run_json(cfg);
  }
  return 0;
}

inline int run_report(const RunConfig& cfg) {
  const Manifest m = parse_manifest(cfg.manifest);
  const SplitReport r = split_report(m);
  std::cout << report_to_text(r);
  if (!cfg.out_root.empty()) {
    ensure_out_dir(cfg.out_root);
    write_text(cfg.out_root / "report.csv", report_to_csv(r));
    write_run_json(cfg);
  }
  return 0;
}

}  // namespace detail

// Runs one command; throws roiaug::Error on failure. Returns the process
// exit code (0, or 1 when validate found violations).
inline int run(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::validate: return detail::run_validate(cfg);
    case Command::preprocess: return detail::run_preprocess(cfg);
    case Command::split: return detail::run_split(cfg);
    case Command::augment: return detail::run_augment(cfg);
    case Command::evaluate: return detail::run_evaluate(cfg);
    case Command::report: return detail::run_report(cfg);
  }
  fail(Errc::invalid_argument, "unknown command");
}

// Same as run() but converts failures into the exit-code contract and a
// single machine-parsable stderr line: `error: <Code> <message>`.
inline int run_with_diagnostics(const RunConfig& cfg,
                                std::ostream& err = std::cerr) {
  try {
    return run(cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: Internal " << e.what() << '\n';
    return 4;
  }
}

// Rebuilds a RunConfig from a run.json written by a previous run, for
// replaying a recorded configuration.
inline RunConfig run_config_from_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  nlohmann::json j;
  in >> j;

  RunConfig c;
  const std::string cmd = j.at("command").get<std::string>();
  bool found = false;
  for (Command k : {Command::validate, Command::preprocess, Command::split,
                    Command::augment, Command::evaluate, Command::report}) {
    if (cmd == command_name(k)) {
      c.command = k;
      found = true;
      break;
    }
  }
  if (!found) fail(Errc::invalid_argument, "unknown command '" + cmd + "'");
  c.manifest = j.at("manifest").get<std::string>();
  c.image_root = j.at("image_root").get<std::string>();
  c.out_root = j.at("out_root").get<std::string>();
  c.predictions = j.at("predictions").get<std::string>();
  c.crop_boxes = j.at("crop_boxes").get<std::string>();
  c.seed = j.at("seed").get<std::uint64_t>();
  const auto strategy = parse_strategy(j.at("strategy").get<std::string>());
  if (!strategy) fail(Errc::invalid_argument, "unknown strategy");
  c.strategy = *strategy;
  c.per_sample_count = j.at("per_sample_count").get<int>();
  c.alpha_range.low = j.at("alpha_low").get<double>();
  c.alpha_range.high = j.at("alpha_high").get<double>();
  c.target_w = j.at("target_w").get<int>();
  c.target_h = j.at("target_h").get<int>();
  c.threshold_fraction = j.at("threshold_fraction").get<double>();
  c.ratio_train = j.at("ratio_train").get<double>();
  c.ratio_val = j.at("ratio_val").get<double>();
  c.ratio_test = j.at("ratio_test").get<double>();
  c.workers = j.at("workers").get<int>();
  c.split_filter = j.at("split_filter").get<std::string>();
  c.force = j.at("force").get<bool>();
  return c;
}

}  // namespace roiaug::cli
