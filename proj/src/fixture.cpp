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

#include "podcurate/fixture.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>

#include "podcurate/error.hpp"
#include "podcurate/random.hpp"
#include "podcurate/speaker_linker.hpp"

namespace podcurate {

namespace {

constexpr int kBaseRate = 16000;
constexpr double kNoiseRms = 0.003;
constexpr double kLoudRms = 0.15;
constexpr double kQuietRms = 0.009;  // about 9.5 dB over the noise floor
constexpr double kMusicRms = 0.12;
constexpr double kFadeS = 0.02;

double syllable_rate(const std::string& emotion) {
  if (emotion == "sad") return 2.0;
  if (emotion == "neutral") return 3.5;
  if (emotion == "happy") return 5.0;
  if (emotion == "angry") return 7.0;
  throw Error("fixture: no rate for emotion '" + emotion + "'");
}

int pitch_period(const std::string& speaker) {
  // 16 kHz periods for about 110 Hz and 210 Hz.
  return speaker == "spk0" ? 145 : 76;
}

double fade(double t, double dur) {
  const double edge = std::min({t, dur - t, kFadeS});
  if (edge >= kFadeS) return 1.0;
  return 0.5 - 0.5 * std::cos(std::numbers::pi * std::max(edge, 0.0) / kFadeS);
}

// Adds `src` into `out` at `offset`, scaled to `rms`.
void add_scaled(std::vector<double>& out, std::size_t offset, const std::vector<double>& src,
                double rms) {
  double e = 0.0;
  for (double v : src) e += v * v;
  const double cur = std::sqrt(e / static_cast<double>(src.size()));
  const double k = cur > 0.0 ? rms / cur : 0.0;
  for (std::size_t i = 0; i < src.size() && offset + i < out.size(); ++i) out[offset + i] += k * src[i];
}

}  // namespace

const std::vector<FixtureUtterance>& fixture_layout() {
  static const std::vector<FixtureUtterance> layout = {
      {0.6, 4.6, "speech", "spk0", "neutral", false},
      {5.4, 10.2, "speech", "spk1", "happy", false},
      {10.5, 13.0, "speech", "spk1", "happy", false},
      {14.0, 18.5, "speech", "spk0", "neutral", true},
      {19.2, 25.0, "music", "", "", false},
      {26.2, 31.0, "speech", "spk1", "sad", false},
      {31.9, 36.5, "speech", "spk0", "angry", true},
      {37.1, 42.0, "speech", "spk1", "neutral", false},
      {42.4, 45.5, "speech", "spk1", "neutral", false},
      {47.0, 52.5, "speech", "spk0", "neutral", false},
      {52.8, 58.8, "speech", "spk0", "neutral", false},
  };
  return layout;
}

std::optional<std::size_t> fixture_utterance_at(double t) {
  const auto& layout = fixture_layout();
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (t >= layout[i].start_s && t < layout[i].end_s) return i;
  }
  return std::nullopt;
}

Waveform synthesize_fixture(std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(kFixtureDurationS * kBaseRate);
  std::vector<double> mix(n, 0.0);

  std::mt19937_64 noise_rng(derive_seed(seed, "noise"));
  std::normal_distribution<double> gauss(0.0, kNoiseRms);
  for (auto& v : mix) v = gauss(noise_rng);

  // One pitch period per speaker with gamma-distributed magnitudes, reused
  // for all of that speaker's utterances.
  std::map<std::string, std::vector<double>> periods;
  for (const char* spk : {"spk0", "spk1"}) {
    std::mt19937_64 rng(derive_seed(seed, spk));
    std::gamma_distribution<double> gamma(0.4, 1.0);
    std::bernoulli_distribution sign(0.5);
    std::vector<double> p(static_cast<std::size_t>(pitch_period(spk)));
    for (auto& v : p) v = sign(rng) ? gamma(rng) : -gamma(rng);
    periods[spk] = std::move(p);
  }

  const auto& layout = fixture_layout();
  for (std::size_t u = 0; u < layout.size(); ++u) {
    const auto& utt = layout[u];
    const auto begin = static_cast<std::size_t>(std::lround(utt.start_s * kBaseRate));
    const auto end = static_cast<std::size_t>(std::lround(utt.end_s * kBaseRate));
    const double dur = utt.end_s - utt.start_s;
    std::vector<double> sig(end - begin);
    if (utt.kind == "music") {
      // Steady 4:5:6 chord; these phases give a flat, sine-like amplitude
      // distribution.
      constexpr std::pair<double, double> kChord[] = {{220.0, 0.0}, {275.0, 1.25}, {330.0, 5.5}};
      for (std::size_t i = 0; i < sig.size(); ++i) {
        const double t = static_cast<double>(i) / kBaseRate;
        double v = 0.0;
        for (auto [f, ph] : kChord) v += std::sin(2.0 * std::numbers::pi * f * t + ph);
        sig[i] = v * fade(t, dur);
      }
      add_scaled(mix, begin, sig, kMusicRms);
      continue;
    }
    const auto& period = periods[utt.speaker];
    const double rate = syllable_rate(utt.emotion);
    const double phase = 2.0 * std::numbers::pi * unit_interval(derive_seed(seed, u));
    for (std::size_t i = 0; i < sig.size(); ++i) {
      const double t = static_cast<double>(i) / kBaseRate;
      const double env = 0.6 + 0.4 * std::sin(2.0 * std::numbers::pi * rate * t + phase);
      sig[i] = period[(begin + i) % period.size()] * env * fade(t, dur);
    }
    add_scaled(mix, begin, sig, utt.low_snr ? kQuietRms : kLoudRms);
  }

  Waveform w;
  w.sample_rate_hz = kBaseRate;
  w.channels = 2;
  w.samples.reserve(mix.size() * 2);
  for (double v : mix) {
    w.samples.push_back(static_cast<float>(1.1 * v));
    w.samples.push_back(static_cast<float>(0.9 * v));
  }
  return w;
}

Json fixture_ground_truth_json() {
  Json utts = Json::array();
  for (const auto& u : fixture_layout()) {
    Json j = {{"start_s", u.start_s}, {"end_s", u.end_s}, {"kind", u.kind}, {"low_snr", u.low_snr}};
    if (u.kind == "speech") {
      j["speaker"] = u.speaker;
      j["emotion"] = u.emotion;
      j["gender"] = u.speaker == "spk0" ? "male" : "female";
    }
    utts.push_back(std::move(j));
  }
  return {{"source_id", "fixture"},
          {"duration_s", kFixtureDurationS},
          {"utterances", std::move(utts)},
          {"low_snr_band_db", {0.0, 20.0}}};
}

void write_fixture(const std::filesystem::path& dir, std::uint64_t seed) {
  std::filesystem::create_directories(dir / "audio");
  write_wav(dir / "audio" / "fixture.wav", synthesize_fixture(seed));

  const std::vector<AnchorLabel> anchors = {{"fixture", "fixture_00000", "spk_A"}};
  write_anchor_file(dir / "anchors.jsonl", anchors);

  Json annotators = Json::array();
  for (const char* name : {"asr", "speech_music", "diarization", "gender_age", "emotion_category",
                           "emotion_attributes", "sound_events"}) {
    annotators.push_back({{"name", name}, {"impl", "stub"}, {"batch_size", 4}});
  }
  annotators.push_back({{"name", "snr"}, {"impl", "wada"}, {"batch_size", 4}});
  const Json config = {{"seed", seed},
                       {"workers", 0},
                       {"annotators", annotators},
                       {"segmenter",
                        {{"silence_threshold_s", 0.5},
                         {"extension_s", 0.25},
                         {"max_merge_duration_s", 10.0},
                         {"target_sample_rate_hz", 16000}}},
                       {"snr_table", {{"path", "snr_table.json"}, {"build", Json::object()}}},
                       {"anchors", "anchors.jsonl"},
                       {"link_threshold", 0.7},
                       {"output", "manifest.jsonl"}};
  std::ofstream(dir / "config.json") << config.dump(2) << "\n";
  std::ofstream(dir / "ground_truth.json") << fixture_ground_truth_json().dump(2) << "\n";
}

}  // namespace podcurate
