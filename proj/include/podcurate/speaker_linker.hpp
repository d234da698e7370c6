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

#ifndef PODCURATE_SPEAKER_LINKER_HPP_
#define PODCURATE_SPEAKER_LINKER_HPP_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace podcurate {

using Embedding = std::vector<double>;

// A diarization cluster inside one source file.
struct LocalCluster {
  std::string source_id;
  std::int64_t local_id = 0;
  std::vector<std::string> segment_ids;
  Embedding centroid;  // unit norm
};

// A human-assigned global identity for one segment of a file.
struct AnchorLabel {
  std::string source_id;
  std::string segment_id;
  std::string global_speaker;
};

struct SpeakerKey {
  std::string source_id;
  std::int64_t local_id = 0;

  auto operator<=>(const SpeakerKey&) const = default;
  bool operator==(const SpeakerKey&) const = default;
};

using SpeakerAssignment = std::map<SpeakerKey, std::string>;

inline constexpr double kDefaultLinkThreshold = 0.7;

// a.b / (|a||b|). Throws on zero vectors or mismatched dimensions.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Mean of the members, re-normalized to unit length.
Embedding update_global_centroid(std::span<const Embedding> members);

std::string unlinked_speaker_label(const std::string& source_id, std::int64_t local_id);

// Anchored clusters take their anchor's label. Every other cluster, visited
// in (source_id, local_id) order, joins the most similar anchored global
// speaker when that similarity reaches `threshold` (the speaker's centroid
// then grows to include it); otherwise it becomes unk_<source>_<local>.
SpeakerAssignment assign_global_speakers(std::span<const LocalCluster> clusters,
                                         std::span<const AnchorLabel> anchors,
                                         double threshold = kDefaultLinkThreshold);

// Anchor file: JSON lines {"source_id", "segment_id", "global_speaker"}.
std::vector<AnchorLabel> read_anchor_file(const std::filesystem::path& path);
void write_anchor_file(const std::filesystem::path& path, std::span<const AnchorLabel> anchors);

}  // namespace podcurate

#endif  // PODCURATE_SPEAKER_LINKER_HPP_
