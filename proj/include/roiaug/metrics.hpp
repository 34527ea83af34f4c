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

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "roiaug/error.hpp"
#include "roiaug/manifest.hpp"

namespace roiaug {

// Image-level scoring of prediction files. F1 per class is the harmonic
// mean of precision and recall; the macro score is the unweighted mean over
// all classes of the scheme. Zero-support terms (0/0) are defined as 0 and
// empty classes still count in the macro mean.

struct ConfusionMatrix {
  std::vector<std::string> classes;  // ordered label names
  std::vector<std::vector<std::uint64_t>> counts;  // rows = true, cols = pred

  static ConfusionMatrix zero(std::vector<std::string> class_names) {
    ConfusionMatrix cm;
    cm.counts.assign(class_names.size(),
                     std::vector<std::uint64_t>(class_names.size(), 0));
    cm.classes = std::move(class_names);
    return cm;
  }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts)
      for (auto v : row) t += v;
    return t;
  }
};

struct Prediction {
  std::string sample_id;
  std::string label_token;
};

// Prediction CSV: header `sample_id,predicted_label`, one row per sample.
inline std::vector<Prediction> parse_predictions(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open predictions " + path.string());
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "sample_id,predicted_label")
        fail(Errc::malformed_row,
             "line 1: bad header, expected 'sample_id,predicted_label'");
      continue;
    }
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line, line_no);
    if (fields.size() != 2)
      fail(Errc::malformed_row, "line " + std::to_string(line_no) +
                                    ": expected 2 columns, got " +
                                    std::to_string(fields.size()));
    out.push_back({fields[0], fields[1]});
  }
  return out;
}

// counts[t][p] = number of samples with true label t predicted as p. Every
// truth sample must be predicted exactly once and every prediction must
// refer to a truth sample.
inline ConfusionMatrix confusion(const Manifest& truth,
                                 std::span<const Prediction> predictions) {
  auto cm = ConfusionMatrix::zero(truth.scheme.class_names);
  const auto index = truth.index_by_id();

  std::unordered_set<std::string> predicted;
  predicted.reserve(predictions.size());
  for (const Prediction& p : predictions) {
    const auto it = index.find(p.sample_id);
    if (it == index.end())
      fail(Errc::unknown_sample,
           "prediction for unknown sample '" + p.sample_id + "'");
    if (!predicted.insert(p.sample_id).second)
      fail(Errc::duplicate_id,
           "duplicate prediction for sample '" + p.sample_id + "'");
    const auto label = truth.scheme.parse_label(p.label_token);
    if (!label)
      fail(Errc::unknown_label, "predicted label '" + p.label_token +
                                    "' not in scheme " +
                                    scheme_name(truth.scheme.id));
    ++cm.counts[truth.samples[it->second].label][*label];
  }

  for (const auto& s : truth.samples)
    if (!predicted.count(s.sample_id))
      fail(Errc::missing_prediction,
           "no prediction for sample '" + s.sample_id + "'");
  return cm;
}

inline ConfusionMatrix confusion(const Manifest& truth,
                                 const std::filesystem::path& predictions) {
  const auto preds = parse_predictions(predictions);
  return confusion(truth, std::span<const Prediction>(preds));
}

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline std::vector<ClassScore> scores_per_class(const ConfusionMatrix& cm) {
  const std::size_t k = cm.classes.size();
  std::vector<ClassScore> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::uint64_t tp = cm.counts[c][c], fp = 0, fn = 0;
    for (std::size_t o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += cm.counts[o][c];
      fn += cm.counts[c][o];
    }
    ClassScore& s = out[c];
    s.precision = tp + fp == 0 ? 0.0
                               : static_cast<double>(tp) /
                                     static_cast<double>(tp + fp);
    s.recall = tp + fn == 0
                   ? 0.0
                   : static_cast<double>(tp) / static_cast<double>(tp + fn);
    s.f1 = s.precision + s.recall == 0.0
               ? 0.0
               : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return out;
}

inline std::vector<double> f1_per_class(const ConfusionMatrix& cm) {
  std::vector<double> out;
  for (const ClassScore& s : scores_per_class(cm)) out.push_back(s.f1);
  return out;
}

inline double macro_f1(const ConfusionMatrix& cm) {
  if (cm.classes.empty()) return 0.0;
  double sum = 0.0;
  for (double f : f1_per_class(cm)) sum += f;
  return sum / static_cast<double>(cm.classes.size());
}

inline std::string metrics_to_csv(const ConfusionMatrix& cm) {
  const auto scores = scores_per_class(cm);
  char buf[64];
  std::string out = "class,precision,recall,f1\n";
  for (std::size_t c = 0; c < cm.classes.size(); ++c) {
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f", scores[c].precision,
                  scores[c].recall, scores[c].f1);
    out += cm.classes[c];
    out += buf;
    out.push_back('\n');
  }
  std::snprintf(buf, sizeof buf, "macro_f1,,,%.6f", macro_f1(cm));
  out += buf;
  out.push_back('\n');
  return out;
}

inline std::string metrics_to_text(const ConfusionMatrix& cm) {
  const auto scores = scores_per_class(cm);
  std::ostringstream os;
  os << std::left << std::setw(12) << "class" << std::right << std::setw(12)
     << "precision" << std::setw(12) << "recall" << std::setw(12) << "f1"
     << '\n';
  os << std::fixed << std::setprecision(4);
  for (std::size_t c = 0; c < cm.classes.size(); ++c) {
    os << std::left << std::setw(12) << cm.classes[c] << std::right
       << std::setw(12) << scores[c].precision << std::setw(12)
       << scores[c].recall << std::setw(12) << scores[c].f1 << '\n';
  }
  os << std::left << std::setw(12) << "macro_f1" << std::right << std::setw(36)
     << macro_f1(cm) << '\n';
  return os.str();
}

}  // namespace roiaug
