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

#ifndef PODCURATE_AUDIO_HPP_
#define PODCURATE_AUDIO_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace podcurate {

// Interleaved float samples in [-1, 1] (integer PCM is scaled on decode).
struct Waveform {
  int sample_rate_hz = 16000;
  int channels = 1;
  std::vector<float> samples;

  std::size_t frames() const { return channels > 0 ? samples.size() / channels : 0; }
  double duration_s() const {
    return sample_rate_hz > 0 ? static_cast<double>(frames()) / sample_rate_hz : 0.0;
  }
};

// RIFF/WAVE decoding: PCM 8/16/24/32-bit integer and 32/64-bit IEEE float,
// including WAVE_FORMAT_EXTENSIBLE wrappers of those.
Waveform read_wav(const std::filesystem::path& path);

enum class WavEncoding { kPcm16, kFloat32 };
void write_wav(const std::filesystem::path& path, const Waveform& w,
               WavEncoding encoding = WavEncoding::kPcm16);

// Channel average.
std::vector<float> downmix(const Waveform& w);

// Rational-ratio polyphase resampler with a Kaiser-windowed sinc kernel.
// Output length is ceil(n * to / from).
std::vector<float> resample(std::span<const float> x, int from_hz, int to_hz);

}  // namespace podcurate

#endif  // PODCURATE_AUDIO_HPP_
