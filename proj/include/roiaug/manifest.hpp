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

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "roiaug/box.hpp"
#include "roiaug/error.hpp"
#include "roiaug/labels.hpp"
#include "roiaug/png_io.hpp"

namespace roiaug {

// The dataset index. One CSV row per sample:
//
//   sample_id,image_path,label,split,lesions
//
// label is "1".."5" or normal|benign|malignant; the scheme is detected from
// the first data row and must be uniform. lesions is empty or a
// double-quoted semicolon-separated list of x_min,y_min,x_max,y_max,type
// entries. Parse and serialize round-trip field-for-field, and serialized
// output is a fixpoint (one rewrite cycle is byte-identical).

enum class SplitTag { train, val, test, unassigned };

inline const char* split_name(SplitTag s) {
  switch (s) {
    case SplitTag::train: return "train";
    case SplitTag::val: return "val";
    case SplitTag::test: return "test";
    case SplitTag::unassigned: return "unassigned";
  }
  return "unassigned";
}

inline std::optional<SplitTag> parse_split(std::string_view token) {
  if (token == "train") return SplitTag::train;
  if (token == "val") return SplitTag::val;
  if (token == "test") return SplitTag::test;
  if (token == "unassigned") return SplitTag::unassigned;
  return std::nullopt;
}

struct Lesion {
  BoundingBox box;
  std::string type;  // e.g. "discrete_mass"

  friend bool operator==(const Lesion&, const Lesion&) = default;
};

struct AnnotatedSample {
  std::string sample_id;
  std::string image_path;  // relative to the dataset image root
  Label label = 0;
  std::vector<Lesion> lesions;
  SplitTag split = SplitTag::unassigned;

  std::vector<BoundingBox> lesion_boxes() const {
    std::vector<BoundingBox> out;
    out.reserve(lesions.size());
    for (const Lesion& l : lesions) out.push_back(l.box);
    return out;
  }

  friend bool operator==(const AnnotatedSample&,
                         const AnnotatedSample&) = default;
};

struct Manifest {
  LabelScheme scheme = LabelScheme::birads5();
  std::vector<AnnotatedSample> samples;

  std::vector<std::size_t> class_histogram() const {
    std::vector<std::size_t> h(scheme.num_classes(), 0);
    for (const auto& s : samples) ++h[s.label];
    return h;
  }

  std::unordered_map<std::string, std::size_t> index_by_id() const {
    std::unordered_map<std::string, std::size_t> idx;
    idx.reserve(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k)
      idx.emplace(samples[k].sample_id, k);
    return idx;
  }

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

namespace detail {

inline constexpr std::string_view kManifestHeader =
    "sample_id,image_path,label,split,lesions";

inline bool plain_field_ok(std::string_view s) {
  for (char c : s)
    if (c == ',' || c == '"' || c == '\n' || c == '\r') return false;
  return true;
}

// Splits one CSV line. Only whole-field quoting is supported; embedded
// quotes have no meaning in this format.
inline std::vector<std::string> split_csv_line(std::string_view line,
                                               std::size_t line_no) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::string field;
    if (pos < line.size() && line[pos] == '"') {
      const std::size_t close = line.find('"', pos + 1);
      if (close == std::string_view::npos)
        fail(Errc::malformed_row,
             "line " + std::to_string(line_no) + ": unterminated quote");
      field.assign(line, pos + 1, close - pos - 1);
      pos = close + 1;
      if (pos < line.size() && line[pos] != ',')
        fail(Errc::malformed_row,
             "line " + std::to_string(line_no) + ": garbage after quote");
    } else {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string_view::npos) comma = line.size();
      field.assign(line, pos, comma - pos);
      if (field.find('"') != std::string::npos)
        fail(Errc::malformed_row,
             "line " + std::to_string(line_no) + ": stray quote");
      pos = comma;
    }
    fields.push_back(std::move(field));
    if (pos >= line.size()) break;
    ++pos;  // skip comma
  }
  return fields;
}

inline int parse_int_strict(std::string_view s, std::size_t line_no) {
  int value = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    fail(Errc::malformed_row, "line " + std::to_string(line_no) +
                                  ": expected integer, got '" +
                                  std::string(s) + "'");
  return value;
}

inline std::vector<Lesion> parse_lesion_field(std::string_view field,
                                              std::size_t line_no) {
  std::vector<Lesion> lesions;
  if (field.empty()) return lesions;
  std::size_t pos = 0;
  while (pos <= field.size()) {
    std::size_t semi = field.find(';', pos);
    if (semi == std::string_view::npos) semi = field.size();
    const std::string_view entry = field.substr(pos, semi - pos);

    std::vector<std::string_view> parts;
    std::size_t p = 0;
    while (p <= entry.size()) {
      std::size_t comma = entry.find(',', p);
      if (comma == std::string_view::npos) comma = entry.size();
      parts.push_back(entry.substr(p, comma - p));
      p = comma + 1;
    }
    if (parts.size() != 5)
      fail(Errc::malformed_row, "line " + std::to_string(line_no) +
                                    ": lesion entry needs 5 fields, got " +
                                    std::to_string(parts.size()));
    Lesion l;
    l.box.x_min = parse_int_strict(parts[0], line_no);
    l.box.y_min = parse_int_strict(parts[1], line_no);
    l.box.x_max = parse_int_strict(parts[2], line_no);
    l.box.y_max = parse_int_strict(parts[3], line_no);
    l.type = std::string(parts[4]);
    if (l.type.empty())
      fail(Errc::malformed_row,
           "line " + std::to_string(line_no) + ": empty lesion type");
    lesions.push_back(std::move(l));
    pos = semi + 1;
    if (semi == field.size()) break;
  }
  return lesions;
}

inline void append_lesion_field(std::string& out,
                                const std::vector<Lesion>& lesions) {
  if (lesions.empty()) return;
  out.push_back('"');
  for (std::size_t k = 0; k < lesions.size(); ++k) {
    if (k) out.push_back(';');
    const Lesion& l = lesions[k];
    out += std::to_string(l.box.x_min);
    out.push_back(',');
    out += std::to_string(l.box.y_min);
    out.push_back(',');
    out += std::to_string(l.box.x_max);
    out.push_back(',');
    out += std::to_string(l.box.y_max);
    out.push_back(',');
    out += l.type;
  }
  out.push_back('"');
}

}  // namespace detail

inline Manifest manifest_from_csv(std::string_view text) {
  Manifest m;
  std::optional<LabelScheme> scheme;
  std::unordered_set<std::string> seen_ids;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const bool last = nl == text.size();
    pos = nl + 1;
    ++line_no;

    if (line_no == 1) {
      if (line != detail::kManifestHeader)
        fail(Errc::malformed_row, "line 1: bad header, expected '" +
                                      std::string(detail::kManifestHeader) +
                                      "'");
      if (last) break;
      continue;
    }
    if (line.empty() && last) break;  // trailing newline

    auto fields = detail::split_csv_line(line, line_no);
    if (fields.size() != 5)
      fail(Errc::malformed_row, "line " + std::to_string(line_no) +
                                    ": expected 5 columns, got " +
                                    std::to_string(fields.size()));

    AnnotatedSample s;
    s.sample_id = std::move(fields[0]);
    s.image_path = std::move(fields[1]);
    if (s.sample_id.empty())
      fail(Errc::malformed_row,
           "line " + std::to_string(line_no) + ": empty sample_id");
    if (!seen_ids.insert(s.sample_id).second)
      fail(Errc::duplicate_id, "duplicate sample_id '" + s.sample_id +
                                   "' at line " + std::to_string(line_no));

    if (!scheme) {
      // First data row decides the label scheme for the whole file.
      if (LabelScheme::birads5().parse_label(fields[2]))
        scheme = LabelScheme::birads5();
      else if (LabelScheme::tri().parse_label(fields[2]))
        scheme = LabelScheme::tri();
      else
        fail(Errc::unknown_label, "line " + std::to_string(line_no) +
                                      ": unknown label '" + fields[2] + "'");
    }
    const auto label = scheme->parse_label(fields[2]);
    if (!label)
      fail(Errc::unknown_label, "line " + std::to_string(line_no) +
                                    ": label '" + fields[2] +
                                    "' not in scheme " +
                                    scheme_name(scheme->id));
    s.label = *label;

    const auto split = parse_split(fields[3]);
    if (!split)
      fail(Errc::malformed_row, "line " + std::to_string(line_no) +
                                    ": unknown split '" + fields[3] + "'");
    s.split = *split;

    s.lesions = detail::parse_lesion_field(fields[4], line_no);
    m.samples.push_back(std::move(s));
    if (last) break;
  }

  if (scheme) m.scheme = *scheme;
  return m;
}

inline std::string manifest_to_csv(const Manifest& m) {
  std::string out(detail::kManifestHeader);
  out.push_back('\n');
  for (const AnnotatedSample& s : m.samples) {
    if (s.sample_id.empty() || !detail::plain_field_ok(s.sample_id))
      fail(Errc::invalid_argument,
           "sample_id not representable in CSV: '" + s.sample_id + "'");
    if (s.image_path.empty() || !detail::plain_field_ok(s.image_path))
      fail(Errc::invalid_argument,
           "image_path not representable in CSV: '" + s.image_path + "'");
    for (const Lesion& l : s.lesions)
      if (l.type.empty() || !detail::plain_field_ok(l.type) ||
          l.type.find(';') != std::string::npos)
        fail(Errc::invalid_argument,
             "lesion type not representable in CSV: '" + l.type + "'");

    out += s.sample_id;
    out.push_back(',');
    out += s.image_path;
    out.push_back(',');
    out += m.scheme.label_name(s.label);
    out.push_back(',');
    out += split_name(s.split);
    out.push_back(',');
    detail::append_lesion_field(out, s.lesions);
    out.push_back('\n');
  }
  return out;
}

inline Manifest parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open manifest " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return manifest_from_csv(buf.str());
}

inline void serialize_manifest(const Manifest& m,
                               const std::filesystem::path& path) {
  const std::string text = manifest_to_csv(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write manifest " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(Errc::io_error, "short write to " + path.string());
}

// ---------------------------------------------------------------------------
// Consistency checks. Violations are data, not failures: the caller decides
// what to do with them.

enum class ViolationKind {
  missing_file,
  unreadable_image,
  box_out_of_bounds,
  box_inverted,
};

inline const char* violation_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::missing_file: return "MissingFile";
    case ViolationKind::unreadable_image: return "UnreadableImage";
    case ViolationKind::box_out_of_bounds: return "OutOfBounds";
    case ViolationKind::box_inverted: return "InvertedBox";
  }
  return "Unknown";
}

struct Violation {
  ViolationKind kind;
  std::string sample_id;
  int lesion_index = -1;  // -1 when the violation is not box-specific
  std::string detail;
};

inline std::vector<Violation> validate_manifest(
    const Manifest& m, const std::filesystem::path& image_root) {
  std::vector<Violation> out;
  for (const AnnotatedSample& s : m.samples) {
    const auto path = image_root / s.image_path;
    std::optional<PngInfo> info;
    if (!std::filesystem::exists(path)) {
      out.push_back({ViolationKind::missing_file, s.sample_id, -1,
                     "missing image file " + path.string()});
    } else {
      try {
        info = read_png_info(path);
        if (!info->grayscale ||
            (info->bit_depth != 8 && info->bit_depth != 16)) {
          out.push_back({ViolationKind::unreadable_image, s.sample_id, -1,
                         "unsupported format (need 8/16-bit grayscale PNG): " +
                             path.string()});
          info.reset();
        }
      } catch (const Error& e) {
        out.push_back({ViolationKind::unreadable_image, s.sample_id, -1,
                       std::string(e.what()) + ": " + path.string()});
      }
    }

    for (std::size_t k = 0; k < s.lesions.size(); ++k) {
      const BoundingBox& b = s.lesions[k].box;
      if (!b.valid()) {
        out.push_back({ViolationKind::box_inverted, s.sample_id,
                       static_cast<int>(k),
                       "inverted box (" + std::to_string(b.x_min) + "," +
                           std::to_string(b.y_min) + "," +
                           std::to_string(b.x_max) + "," +
                           std::to_string(b.y_max) + ")"});
      } else if (info && !b.within(info->width, info->height)) {
        out.push_back({ViolationKind::box_out_of_bounds, s.sample_id,
                       static_cast<int>(k),
                       "box (" + std::to_string(b.x_min) + "," +
                           std::to_string(b.y_min) + "," +
                           std::to_string(b.x_max) + "," +
                           std::to_string(b.y_max) + ") outside " +
                           std::to_string(info->width) + "x" +
                           std::to_string(info->height)});
      }
    }
  }
  return out;
}

}  // namespace roiaug
