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

#include <stdexcept>
#include <string>

namespace roiaug {

// Failure conditions raised by library operations. The CLI maps these onto
// process exit codes (invalid_argument -> 2, io/decode -> 3, the rest -> 4).
enum class Errc {
  invalid_argument,
  io_error,
  decode_error,
  malformed_row,
  unknown_label,
  duplicate_id,
  box_out_of_bounds,
  dimension_mismatch,
  bit_depth_mismatch,
  no_lesion_boxes,
  label_not_eligible,
  no_eligible_sources,
  no_eligible_backgrounds,
  no_foreground,
  lesion_outside_crop,
  already_assigned,
  empty_manifest,
  unknown_sample,
  missing_prediction,
};

inline const char* errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::io_error: return "IoError";
    case Errc::decode_error: return "DecodeError";
    case Errc::malformed_row: return "MalformedRow";
    case Errc::unknown_label: return "UnknownLabel";
    case Errc::duplicate_id: return "DuplicateId";
    case Errc::box_out_of_bounds: return "BoxOutOfBounds";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::bit_depth_mismatch: return "BitDepthMismatch";
    case Errc::no_lesion_boxes: return "NoLesionBoxes";
    case Errc::label_not_eligible: return "LabelNotEligible";
    case Errc::no_eligible_sources: return "NoEligibleSources";
    case Errc::no_eligible_backgrounds: return "NoEligibleBackgrounds";
    case Errc::no_foreground: return "NoForeground";
    case Errc::lesion_outside_crop: return "LesionOutsideCrop";
    case Errc::already_assigned: return "AlreadyAssigned";
    case Errc::empty_manifest: return "EmptyManifest";
    case Errc::unknown_sample: return "UnknownSample";
    case Errc::missing_prediction: return "MissingPrediction";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace roiaug
