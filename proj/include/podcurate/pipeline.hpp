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

#ifndef PODCURATE_PIPELINE_HPP_
#define PODCURATE_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "podcurate/annotator.hpp"
#include "podcurate/manifest.hpp"
#include "podcurate/segmenter.hpp"
#include "podcurate/snr_wada.hpp"
#include "podcurate/speaker_linker.hpp"

namespace podcurate {

// Status key used for the cross-file speaker linking stage, which owns
// global_speaker.
inline constexpr const char* kSpeakerLinkerName = "speaker_linker";

struct PipelineOptions {
  SegmenterConfig segmenter;
  std::vector<AnchorLabel> anchors;
  double link_threshold = kDefaultLinkThreshold;
  int workers = 1;
  Json run_metadata = Json::object();
};

struct RunReport {
  std::size_t sources_total = 0;
  std::size_t sources_segmented = 0;
  std::vector<std::pair<std::string, std::string>> skipped_sources;  // uri, reason
  std::vector<AnnotatorReport> stages;  // annotators in order, then the linker
  std::vector<std::string> warnings;
  // stage -> status -> record count, over the final manifest.
  std::map<std::string, std::map<std::string, std::size_t>> status_counts;

  std::size_t failed_segments() const;
  // No skipped sources and no failed segments.
  bool complete() const;
};

Json run_report_to_json(const RunReport& r);
std::string format_run_report(const RunReport& r);

// decode -> normalize -> asr proposals -> boundary adjustment -> records ->
// remaining annotators -> speaker linking. Sources already present in
// `resume` are not re-segmented; only their unfinished work is redone.
// Unreadable sources are skipped and listed in the report. The asr adapter
// must also implement SegmentProposer when new sources need segmenting.
Manifest run_pipeline(std::span<const AudioSource> sources, const AnnotatorRegistry& registry,
                      const PipelineOptions& options, RunReport* report = nullptr,
                      const Manifest* resume = nullptr);

// Assigns global_speaker to every record whose speaker_linker status is not
// done, from per-(source, local_speaker) centroids of embedder outputs.
AnnotatorReport link_speakers(Manifest& manifest, SpeakerEmbedder* embedder, AudioAccess& audio,
                              std::span<const AnchorLabel> anchors, double threshold,
                              std::vector<std::string>* warnings = nullptr);

// *.wav files directly inside `dir`, sorted by name; source_id is the file
// stem. Rate, duration and channels are filled in at decode time.
std::vector<AudioSource> discover_sources(const std::filesystem::path& dir);

struct AnnotatorConfig {
  std::string name;
  std::string impl = "stub";  // stub | wada | subprocess
  std::uint64_t seed = 0;
  int batch_size = 16;
  std::string version;
  std::vector<std::string> command;        // subprocess only
  std::vector<std::string> output_fields;  // empty = slot default
};

// Declarative run configuration. Relative paths resolve against the config
// file's directory.
struct PipelineConfig {
  std::uint64_t seed = 0;
  std::vector<AnnotatorConfig> annotators;
  SegmenterConfig segmenter;
  std::optional<std::filesystem::path> snr_table_path;
  std::optional<SnrTableConfig> snr_table_build;
  std::optional<std::filesystem::path> anchors_path;
  double link_threshold = kDefaultLinkThreshold;
  std::filesystem::path output = "manifest.jsonl";
  int workers = 0;  // 0 = hardware concurrency
  std::optional<std::string> created_at;
};

// Throws Error on unknown keys, bad values, or referenced files that do not
// exist (a table path with build parameters is a cache and may be absent).
PipelineConfig pipeline_config_from_json(const Json& j, const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Loads or builds the configured table. Without a path the table is cached
// under $PODCURATE_CACHE_DIR when set.
std::shared_ptr<const SnrTable> resolve_snr_table(const PipelineConfig& config);

AnnotatorRegistry build_registry(const PipelineConfig& config,
                                 std::shared_ptr<const SnrTable> table);

// Seeds, versions and settings recorded in the manifest header.
Json config_run_metadata(const PipelineConfig& config, const AnnotatorRegistry& registry,
                         const SnrTable* table);

// Full run from a loaded config over the *.wav files in `audio_dir`. Does not
// write the manifest. Workers = 0 means hardware concurrency.
Manifest run_configured(const PipelineConfig& config, const std::filesystem::path& audio_dir,
                        RunReport* report = nullptr, const Manifest* resume = nullptr);

}  // namespace podcurate

#endif  // PODCURATE_PIPELINE_HPP_
