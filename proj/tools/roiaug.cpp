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

// Command-line frontend. Subcommands mirror the pipeline stages:
//
//   roiaug validate   --manifest m.csv --images dir [--out dir]
//   roiaug preprocess --manifest m.csv --images dir --out dir [--size WxH]
//   roiaug split      --manifest m.csv --out dir --ratios 0.8,0,0.2 --seed N
//   roiaug augment    --manifest m.csv --images dir --out dir
//                     --strategy transparency|cutmix --count K --seed N
//   roiaug evaluate   --manifest m.csv --predictions p.csv [--out dir]
//   roiaug report     --manifest m.csv [--out dir]
//
// Exit codes: 0 success, 1 validation failures, 2 usage error, 3 I/O error,
// 4 data error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "roiaug/cli.hpp"

namespace {

using roiaug::cli::Command;
using roiaug::cli::RunConfig;

bool parse_size(const std::string& text, RunConfig& cfg) {
  const auto x = text.find('x');
  if (x == std::string::npos) return false;
  try {
    cfg.target_w = std::stoi(text.substr(0, x));
    cfg.target_h = std::stoi(text.substr(x + 1));
  } catch (...) {
    return false;
  }
  return cfg.target_w >= 1 && cfg.target_h >= 1;
}

bool parse_ratios(const std::string& text, RunConfig& cfg) {
  double r[3];
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf", &r[0], &r[1], &r[2]) != 3)
    return false;
  cfg.ratio_train = r[0];
  cfg.ratio_val = r[1];
  cfg.ratio_test = r[2];
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ROI-aware augmentation pipeline for lesion-annotated "
               "grayscale images"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string size_text;
  std::string ratios_text;
  std::string strategy_text = "transparency";

  auto add_manifest = [&](CLI::App* sub) {
    sub->add_option("--manifest", cfg.manifest, "manifest CSV")->required();
  };
  auto add_images = [&](CLI::App* sub) {
    sub->add_option("--images", cfg.image_root, "image root directory")
        ->required();
  };
  auto add_out = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--out", cfg.out_root, "output directory");
    if (required) opt->required();
  };
  auto add_workers = [&](CLI::App* sub) {
    sub->add_option("--workers", cfg.workers, "worker threads (default 1)")
        ->check(CLI::PositiveNumber);
  };

  auto* validate = app.add_subcommand("validate", "check dataset consistency");
  add_manifest(validate);
  add_images(validate);
  add_out(validate, false);

  auto* preprocess =
      app.add_subcommand("preprocess", "crop, orient and resize every sample");
  add_manifest(preprocess);
  add_images(preprocess);
  add_out(preprocess, true);
  preprocess->add_option("--size", size_text,
                         "target size WxH (default 1024x768)");
  preprocess->add_option("--threshold", cfg.threshold_fraction,
                         "foreground threshold fraction (default 0.05)");
  preprocess->add_option("--crop-boxes", cfg.crop_boxes,
                         "sidecar CSV of user-supplied crop regions");
  add_workers(preprocess);

  auto* split = app.add_subcommand("split", "assign stratified splits");
  add_manifest(split);
  add_out(split, true);
  split->add_option("--ratios", ratios_text,
                    "train,val,test ratios (default 0.8,0,0.2)");
  split->add_option("--seed", cfg.seed, "split seed (default 0)");
  split->add_flag("--force", cfg.force, "reassign already-assigned samples");

  auto* augment = app.add_subcommand("augment", "generate augmented samples");
  add_manifest(augment);
  add_images(augment);
  add_out(augment, true);
  augment->add_option("--strategy", strategy_text,
                      "transparency or cutmix (default transparency)");
  augment->add_option("--count", cfg.per_sample_count,
                      "replicas per eligible source (default 1)");
  augment->add_option("--seed", cfg.seed, "plan seed (default 0)");
  augment->add_option("--alpha-low", cfg.alpha_range.low,
                      "alpha lower bound (default 0.1)");
  augment->add_option("--alpha-high", cfg.alpha_range.high,
                      "alpha upper bound (default 0.9)");
  add_workers(augment);

  auto* evaluate = app.add_subcommand("evaluate", "score a prediction file");
  add_manifest(evaluate);
  evaluate->add_option("--predictions", cfg.predictions, "prediction CSV")
      ->required();
  evaluate->add_option("--split", cfg.split_filter,
                       "score only this split (default all)");
  add_out(evaluate, false);

  auto* report = app.add_subcommand("report", "per-class split counts");
  add_manifest(report);
  add_out(report, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  if (validate->parsed()) cfg.command = Command::validate;
  if (preprocess->parsed()) cfg.command = Command::preprocess;
  if (split->parsed()) cfg.command = Command::split;
  if (augment->parsed()) cfg.command = Command::augment;
  if (evaluate->parsed()) cfg.command = Command::evaluate;
  if (report->parsed()) cfg.command = Command::report;

  if (!size_text.empty() && !parse_size(size_text, cfg)) {
    std::cerr << "error: InvalidArgument bad --size '" << size_text
              << "', expected WxH\n";
    return 2;
  }
  if (!ratios_text.empty() && !parse_ratios(ratios_text, cfg)) {
    std::cerr << "error: InvalidArgument bad --ratios '" << ratios_text
              << "', expected train,val,test\n";
    return 2;
  }
  if (augment->parsed()) {
    const auto strategy = roiaug::parse_strategy(strategy_text);
    if (!strategy) {
      std::cerr << "error: InvalidArgument unknown strategy '" << strategy_text
                << "'\n";
      return 2;
    }
    cfg.strategy = *strategy;
  }

  return roiaug::cli::run_with_diagnostics(cfg);
}
