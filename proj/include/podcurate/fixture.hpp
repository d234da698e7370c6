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

#ifndef PODCURATE_FIXTURE_HPP_
#define PODCURATE_FIXTURE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "podcurate/audio.hpp"
#include "podcurate/manifest.hpp"

namespace podcurate {

// A synthetic 60 s podcast-like recording with known content: two speakers
// (110 Hz and 210 Hz pitch), four emotions encoded as syllable rates, two
// low-SNR utterances and one music span, over a constant noise floor.

struct FixtureUtterance {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string kind;     // "speech" or "music"
  std::string speaker;  // "spk0", "spk1", or empty for music
  std::string emotion;  // speech only
  bool low_snr = false;
};

inline constexpr double kFixtureDurationS = 60.0;
inline constexpr std::uint64_t kFixtureSeed = 20240917;

const std::vector<FixtureUtterance>& fixture_layout();

// 16 kHz stereo; the channels differ only in gain.
Waveform synthesize_fixture(std::uint64_t seed = kFixtureSeed);

// Index of the utterance containing time t, if any.
std::optional<std::size_t> fixture_utterance_at(double t);

Json fixture_ground_truth_json();

// Writes fixture.wav, anchors.jsonl, config.json and ground_truth.json into
// `dir` (created if needed). The config runs every stub with a fixed seed.
void write_fixture(const std::filesystem::path& dir, std::uint64_t seed = kFixtureSeed);

}  // namespace podcurate

#endif  // PODCURATE_FIXTURE_HPP_
