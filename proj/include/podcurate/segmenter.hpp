// Copyright 2026 The podcurate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PODCURATE_SEGMENTER_HPP_
#define PODCURATE_SEGMENTER_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "podcurate/audio.hpp"

namespace podcurate {

struct SegmentProposal {
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<std::string> text;

  bool operator==(const SegmentProposal&) const = default;
};

struct SegmenterConfig {
  double silence_threshold_s = 0.5;
  double extension_s = 0.25;
  double max_merge_duration_s = 10.0;
  int target_sample_rate_hz = 16000;

  // Throws Error unless all values are positive and
  // extension_s <= silence_threshold_s / 2.
  void validate() const;
};

// Repairs ASR segment boundaries using the silence between neighbours.
//
// Walking left to right, a gap of at most silence_threshold_s merges the two
// segments (texts joined by one space) unless the merged span would exceed
// max_merge_duration_s. Longer gaps, and merges refused by the cap, widen
// both neighbours toward each other by min(extension_s, gap / 2). The first
// start and last end are pushed outward by extension_s, clamped to the file.
std::vector<SegmentProposal> adjust_boundaries(std::span<const SegmentProposal> proposals,
                                               double source_duration_s,
                                               const SegmenterConfig& config = {});

// Downmix to mono and resample to config.target_sample_rate_hz. Upsampling
// is rejected.
std::vector<float> normalize_audio(const Waveform& w, const SegmenterConfig& config = {});

// Samples [round(start*rate), round(end*rate)).
std::vector<float> slice_audio(std::span<const float> x, const SegmentProposal& segment,
                               int rate_hz);

}  // namespace podcurate

#endif  // PODCURATE_SEGMENTER_HPP_
