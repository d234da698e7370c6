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

#ifndef PODCURATE_MANIFEST_HPP_
#define PODCURATE_MANIFEST_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace podcurate {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class Gender { kFemale, kMale, kUnknown };
enum class EmotionCategory { kNeutral, kAngry, kHappy, kSad };
enum class AnnotationStatus { kPending, kDone, kFailed };

std::string_view to_string(Gender g);
std::string_view to_string(EmotionCategory e);
std::string_view to_string(AnnotationStatus s);
std::optional<Gender> parse_gender(std::string_view s);
std::optional<EmotionCategory> parse_emotion(std::string_view s);
std::optional<AnnotationStatus> parse_status(std::string_view s);

inline constexpr double kEmotionAttributeMin = 1.0;
inline constexpr double kEmotionAttributeMax = 7.0;

struct SoundEvent {
  std::string label;
  double score = 0.0;

  bool operator==(const SoundEvent&) const = default;
};

struct AudioSource {
  std::string source_id;
  std::string uri;
  int sample_rate_hz = 16000;
  double duration_s = 0.0;
  int channel_count = 1;
  Json extra = Json::object();

  bool operator==(const AudioSource&) const = default;
};

// One annotated utterance. Every annotation field is optional: absent means
// "not annotated yet", which is distinct from a zero value.
struct SegmentRecord {
  std::string segment_id;
  std::string source_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<std::string> transcript;
  std::optional<bool> is_speech;
  std::optional<std::int64_t> local_speaker;
  std::optional<std::string> global_speaker;
  std::optional<Gender> gender;
  std::optional<double> age_years;
  std::optional<EmotionCategory> emotion_category;
  std::optional<double> arousal;
  std::optional<double> dominance;
  std::optional<double> valence;
  std::optional<double> snr_db;
  std::optional<std::vector<SoundEvent>> sound_events;
  std::map<std::string, AnnotationStatus> annotation_status;
  // Fields this schema version does not know about, kept verbatim.
  Json extra = Json::object();

  double duration_s() const { return end_s - start_s; }

  bool operator==(const SegmentRecord&) const = default;
};

struct Manifest {
  int schema_version = kSchemaVersion;
  std::vector<AudioSource> sources;
  std::vector<SegmentRecord> records;
  Json run_metadata = Json::object();
  // Unknown header keys, kept verbatim.
  Json extra = Json::object();

  const AudioSource* find_source(std::string_view source_id) const;
  SegmentRecord* find_record(std::string_view segment_id);
  const SegmentRecord* find_record(std::string_view segment_id) const;

  // Stable sort by (source_id, start_s, segment_id).
  void sort_records();

  bool operator==(const Manifest&) const = default;
};

// Deterministic id: source id plus the zero-padded rank of the segment by
// start time within its source.
std::string make_segment_id(std::string_view source_id, std::size_t index);

// JSON conversion of single records / sources (one manifest line each).
Json record_to_json(const SegmentRecord& r);
SegmentRecord record_from_json(const Json& j);
Json source_to_json(const AudioSource& s);
AudioSource source_from_json(const Json& j);

// Throws Error describing the first violated invariant. `source` may be null
// when the owning source is unknown (bounds against duration are skipped).
void validate_record(const SegmentRecord& r, const AudioSource* source);
// Checks every manifest invariant: unique ids, resolvable sources, sorted
// records, per-record invariants.
void validate_manifest(const Manifest& m);

// Serialized form: one header line then one line per record. Sorted output;
// identical manifests give identical bytes.
std::string serialize_manifest(const Manifest& m);
Manifest parse_manifest(std::string_view text);

void write_manifest(const Manifest& m, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

// 64-bit FNV-1a of the serialized manifest, hex encoded. Used as provenance
// when deriving subsets.
std::string manifest_hash(const Manifest& m);
std::string fnv1a_hex(std::string_view bytes);

// Writes `fields` (field name -> JSON value) into the matching records and
// marks annotation_status[annotator] = done. Validates everything before
// mutating anything.
using PartialFields = std::map<std::string, Json>;
void merge_annotations(Manifest& m, const std::string& annotator,
                       const std::map<std::string, PartialFields>& outputs);
Manifest merged(Manifest m, const std::string& annotator,
                const std::map<std::string, PartialFields>& outputs);

struct CorpusSummary {
  double total_hours = 0.0;
  std::size_t utterance_count = 0;
  double mean_duration_s = 0.0;
  // Labelled global speakers only (synthetic unk_ labels excluded).
  std::size_t global_speaker_count = 0;
  // Distinct unk_ labels: local clusters that were never linked to a label.
  std::size_t unlinked_cluster_count = 0;
  std::map<std::string, std::size_t> gender_counts;
  std::map<std::string, std::size_t> speaker_gender_counts;
  std::map<std::string, std::size_t> emotion_counts;

  bool operator==(const CorpusSummary&) const = default;
};

CorpusSummary corpus_summary(const Manifest& m);
Json summary_to_json(const CorpusSummary& s);

}  // namespace podcurate

#endif  // PODCURATE_MANIFEST_HPP_
