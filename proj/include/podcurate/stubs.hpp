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

#ifndef PODCURATE_STUBS_HPP_
#define PODCURATE_STUBS_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "podcurate/annotator.hpp"
#include "podcurate/snr_wada.hpp"

namespace podcurate {

// Deterministic stand-ins for the model-backed annotators. Each one reads a
// simple audio cue (energy, envelope shape, pitch, modulation rate) and fills
// its fields with schema-valid values; anything not recoverable from the cue
// is drawn from a stream seeded by (seed, segment_id).

// Default spec for a slot: its output fields, version "stub-1", batch 16.
AnnotatorSpec default_spec(std::string_view name);

// Speech transcription stub. Also proposes segments with an energy detector
// (threshold 8 dB over the 5th-percentile frame level, gaps under 0.2 s
// bridged, runs under 0.3 s dropped) and seeded placeholder words.
class StubAsr : public Annotator, public SegmentProposer {
 public:
  explicit StubAsr(std::uint64_t seed) : seed_(seed) {}
  AnnotationBatchResult annotate(std::span<const SegmentInput> batch) override;
  std::vector<SegmentProposal> propose(const AudioSource& source, std::span<const float> samples,
                                       int sample_rate_hz) override;

 private:
  std::uint64_t seed_;
};

// SNR from the WADA statistic. Not a stub; lives here for registration.
class WadaSnrAnnotator : public Annotator {
 public:
  explicit WadaSnrAnnotator(std::shared_ptr<const SnrTable> table);
  AnnotationBatchResult annotate(std::span<const SegmentInput> batch) override;

 private:
  std::shared_ptr<const SnrTable> table_;
};

// Stub for any slot except snr. Throws for unknown names.
std::shared_ptr<Annotator> make_stub_annotator(std::string_view name, std::uint64_t seed);

// 16-dim embedding: a Gaussian bump over log-f0. Unvoiced input maps to a
// flat vector.
std::shared_ptr<SpeakerEmbedder> make_stub_embedder();

// Registers stubs for all slots (snr uses WadaSnrAnnotator) and the stub
// embedder. Per-slot seeds derive from `seed` and the slot name.
void register_stub_annotators(AnnotatorRegistry& registry, std::uint64_t seed,
                              std::shared_ptr<const SnrTable> table);

// Labels the sound-event stub draws its extra tags from.
std::span<const std::string_view> sound_event_taxonomy();

// Category from envelope modulation rate: below 2.75 Hz (or none) sad,
// below 4.25 neutral, below 6 happy, otherwise angry.
std::string_view emotion_from_rate(std::optional<double> rate_hz);

// floor(3 * log2(f0 / 60)), or 0 when unvoiced.
std::int64_t pitch_band(std::optional<double> f0_hz);

}  // namespace podcurate

#endif  // PODCURATE_STUBS_HPP_
