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

#include "podcurate/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "podcurate/error.hpp"

namespace podcurate {

void SegmenterConfig::validate() const {
  if (!(silence_threshold_s > 0.0) || !(extension_s > 0.0) || !(max_merge_duration_s > 0.0) ||
      target_sample_rate_hz <= 0) {
    throw Error("segmenter config values must be positive");
  }
  if (extension_s > silence_threshold_s / 2.0) {
    throw Error("segmenter config: extension_s must be <= silence_threshold_s / 2");
  }
}

std::vector<SegmentProposal> adjust_boundaries(std::span<const SegmentProposal> proposals,
                                               double source_duration_s,
                                               const SegmenterConfig& config) {
  config.validate();
  if (!(source_duration_s > 0.0)) throw Error("source duration must be positive");
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const auto& p = proposals[i];
    if (!(p.start_s < p.end_s)) {
      std::ostringstream os;
      os << "proposal " << i << " has start_s >= end_s";
      throw Error(os.str());
    }
    if (p.start_s < 0.0 || p.end_s > source_duration_s) {
      std::ostringstream os;
      os << "proposal " << i << " lies outside [0, " << source_duration_s << "]";
      throw Error(os.str());
    }
    if (i > 0 && p.start_s < proposals[i - 1].end_s) {
      std::ostringstream os;
      os << "proposals unsorted or overlapping at index " << i;
      throw Error(os.str());
    }
  }
  if (proposals.empty()) return {};

  std::vector<SegmentProposal> out;
  SegmentProposal cur = proposals[0];
  for (std::size_t i = 1; i < proposals.size(); ++i) {
    const auto& next = proposals[i];
    const double gap = next.start_s - cur.end_s;
    const bool short_gap = gap <= config.silence_threshold_s;
    if (short_gap && next.end_s - cur.start_s <= config.max_merge_duration_s) {
      cur.end_s = next.end_s;
      if (next.text) {
        cur.text = cur.text ? *cur.text + " " + *next.text : *next.text;
      }
      continue;
    }
    out.push_back(std::move(cur));
    cur = next;
  }
  out.push_back(std::move(cur));

  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    auto& left = out[i];
    auto& right = out[i + 1];
    const double gap = right.start_s - left.end_s;
    if (2.0 * config.extension_s >= gap) {
      // Clamped to g/2 each: both sides meet at the midpoint.
      const double mid = left.end_s + gap / 2.0;
      left.end_s = mid;
      right.start_s = mid;
    } else {
      left.end_s += config.extension_s;
      right.start_s -= config.extension_s;
    }
  }
  out.front().start_s = std::max(0.0, out.front().start_s - config.extension_s);
  out.back().end_s = std::min(source_duration_s, out.back().end_s + config.extension_s);
  return out;
}

std::vector<float> normalize_audio(const Waveform& w, const SegmenterConfig& config) {
  if (w.sample_rate_hz < config.target_sample_rate_hz) {
    throw Error("upsampling not supported: source rate " + std::to_string(w.sample_rate_hz) +
                " Hz is below target " + std::to_string(config.target_sample_rate_hz) + " Hz");
  }
  std::vector<float> mono = downmix(w);
  if (w.sample_rate_hz == config.target_sample_rate_hz) return mono;
  return resample(mono, w.sample_rate_hz, config.target_sample_rate_hz);
}

std::vector<float> slice_audio(std::span<const float> x, const SegmentProposal& segment,
                               int rate_hz) {
  if (rate_hz <= 0) throw Error("sample rate must be positive");
  const double b = std::round(segment.start_s * rate_hz);
  const double e = std::round(segment.end_s * rate_hz);
  if (b < 0.0 || e > static_cast<double>(x.size()) || b > e) {
    std::ostringstream os;
    os << "segment [" << segment.start_s << ", " << segment.end_s
       << "] s lies outside the waveform (" << x.size() << " samples at " << rate_hz << " Hz)";
    throw Error(os.str());
  }
  return {x.begin() + static_cast<std::ptrdiff_t>(b), x.begin() + static_cast<std::ptrdiff_t>(e)};
}

}  // namespace podcurate
