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

#ifndef PODCURATE_ANNOTATOR_HPP_
#define PODCURATE_ANNOTATOR_HPP_

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "podcurate/manifest.hpp"
#include "podcurate/segmenter.hpp"
#include "podcurate/speaker_linker.hpp"

namespace podcurate {

// Known annotator slots, in pipeline execution order.
std::span<const std::string_view> annotator_names();
bool is_annotator_name(std::string_view name);

struct AnnotatorSpec {
  std::string name;
  std::string version;
  std::vector<std::string> output_fields;
  int batch_size = 16;
};

// What an adapter receives for one segment.
struct SegmentInput {
  const SegmentRecord* record = nullptr;
  const AudioSource* source = nullptr;
  std::span<const float> samples;  // normalized mono slice
  int sample_rate_hz = 16000;
};

struct SegmentResult {
  std::string segment_id;
  bool ok = true;
  PartialFields fields;
  std::string reason;  // set when !ok
};

using AnnotationBatchResult = std::vector<SegmentResult>;

// Per-segment annotator. annotate() may throw; the whole batch is then
// recorded as failed. Implementations must be deterministic and must not
// carry state between batches except what derives from their seed.
class Annotator {
 public:
  virtual ~Annotator() = default;
  virtual AnnotationBatchResult annotate(std::span<const SegmentInput> batch) = 0;
};

// Whole-file segmentation, implemented by ASR adapters.
class SegmentProposer {
 public:
  virtual ~SegmentProposer() = default;
  virtual std::vector<SegmentProposal> propose(const AudioSource& source,
                                               std::span<const float> samples,
                                               int sample_rate_hz) = 0;
};

// Speaker embedding for one segment (unit norm not required).
class SpeakerEmbedder {
 public:
  virtual ~SpeakerEmbedder() = default;
  virtual Embedding embed(std::span<const float> samples, int sample_rate_hz) = 0;
};

class AnnotatorRegistry {
 public:
  struct Entry {
    AnnotatorSpec spec;
    std::shared_ptr<Annotator> impl;
  };

  // Throws on unknown or duplicate names, empty or non-schema output fields,
  // and fields already claimed by another adapter.
  void register_adapter(AnnotatorSpec spec, std::shared_ptr<Annotator> impl);
  const Entry* find(std::string_view name) const;
  // Registered names in pipeline order.
  std::vector<std::string> names() const;

  void set_embedder(std::shared_ptr<SpeakerEmbedder> e) { embedder_ = std::move(e); }
  SpeakerEmbedder* embedder() const { return embedder_.get(); }

 private:
  std::map<std::string, Entry, std::less<>> entries_;
  std::shared_ptr<SpeakerEmbedder> embedder_;
};

// Normalized (mono, target-rate) audio per source. Implementations must be
// safe to call from several threads once a source has been loaded.
class AudioAccess {
 public:
  virtual ~AudioAccess() = default;
  virtual const std::vector<float>& samples(const AudioSource& source) = 0;
  virtual int sample_rate_hz() const = 0;
};

// Decodes source.uri from disk on first use and caches the result.
class FileAudioAccess : public AudioAccess {
 public:
  explicit FileAudioAccess(SegmenterConfig config = {}) : config_(config) {}
  const std::vector<float>& samples(const AudioSource& source) override;
  int sample_rate_hz() const override { return config_.target_sample_rate_hz; }

 private:
  SegmenterConfig config_;
  std::mutex mu_;
  std::map<std::string, std::vector<float>> cache_;
};

// In-memory audio keyed by source_id.
class MemoryAudioAccess : public AudioAccess {
 public:
  explicit MemoryAudioAccess(int rate_hz = 16000) : rate_(rate_hz) {}
  void add(const std::string& source_id, std::vector<float> samples) {
    audio_[source_id] = std::move(samples);
  }
  const std::vector<float>& samples(const AudioSource& source) override;
  int sample_rate_hz() const override { return rate_; }

 private:
  int rate_;
  std::map<std::string, std::vector<float>> audio_;
};

struct AnnotatorReport {
  std::string name;
  std::size_t done = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;  // already done before this run
  std::vector<std::pair<std::string, std::string>> failures;  // segment_id, reason
};

// Runs one registered annotator over every segment whose status for it is
// pending, failed, or missing. Batches may run on up to `workers` threads;
// results are merged in record order. A throwing batch marks each of its
// segments failed and the run continues.
AnnotatorReport run_annotator(const AnnotatorRegistry& registry, const std::string& name,
                              Manifest& manifest, AudioAccess& audio, int workers = 1);

}  // namespace podcurate

#endif  // PODCURATE_ANNOTATOR_HPP_
