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

#ifndef PODCURATE_FEATURES_HPP_
#define PODCURATE_FEATURES_HPP_

#include <optional>
#include <span>
#include <vector>

namespace podcurate {

// Lightweight signal descriptors used by the stub annotators. None of these
// are meant to compete with learned models.

// RMS of frames of `frame_s` seconds taken every `hop_s` seconds. Input
// shorter than one frame yields a single frame over all of it.
std::vector<double> frame_rms(std::span<const float> x, int rate_hz, double hop_s = 0.005,
                              double frame_s = 0.02);

// Contiguous stretch from the first to the last frame within `range_db` of
// the loudest frame.
std::span<const double> active_span(std::span<const double> rms, double range_db = 20.0);

// Coefficient of variation of the active envelope. Syllabic speech sits well
// above steady tones.
double envelope_variation(std::span<const float> x, int rate_hz);

// Dominant amplitude-modulation rate (Hz) of the active envelope, from its
// autocorrelation over 1.6-10 Hz; nullopt when no clear periodicity exists.
std::optional<double> modulation_rate(std::span<const float> x, int rate_hz);

// Fundamental frequency over [60, 400] Hz from the normalized
// autocorrelation of the loudest 200 ms; nullopt for unvoiced input.
std::optional<double> estimate_f0(std::span<const float> x, int rate_hz);

}  // namespace podcurate

#endif  // PODCURATE_FEATURES_HPP_
