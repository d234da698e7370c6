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

#include "podcurate/stubs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "podcurate/error.hpp"
#include "podcurate/features.hpp"
#include "podcurate/random.hpp"

namespace podcurate {

namespace {

constexpr std::array<std::string_view, 48> kVocabulary = {
    "the",   "a",     "and",    "of",     "to",    "in",    "is",    "it",    "that",  "we",
    "you",   "this",  "was",    "for",    "on",    "with",  "they",  "but",   "have",  "not",
    "about", "what",  "think",  "people", "know",  "just",  "really", "time", "going", "so",
    "like",  "there", "because", "would", "right", "well",  "show",  "today", "story", "talk",
    "year",  "good",  "little", "thing",  "way",   "mean",  "yeah",  "okay"};

constexpr std::array<std::string_view, 40> kTaxonomy = {
    "Animal",           "Applause",        "Bark",          "Bell",
    "Bird",             "Breathing",       "Car",           "Cheering",
    "Chewing",          "Clapping",        "Cough",         "Crowd",
    "Dog",              "Door",            "Drum",          "Engine",
    "Footsteps",        "Guitar",          "Hubbub",        "Inside, small room",
    "Keyboard (musical)", "Laughter",      "Mechanical fan", "Music",
    "Narration, monologue", "Piano",       "Rain",          "Silence",
    "Singing",          "Sniff",           "Speech",        "Speech synthesizer",
    "Telephone",        "Tick",            "Traffic noise",  "Typing",
    "Vehicle",          "Water",           "White noise",   "Wind"};

constexpr double kSpeechVariationThreshold = 0.2;

std::uint64_t segment_seed(std::uint64_t seed, const SegmentInput& in) {
  return derive_seed(seed, in.record->segment_id);
}

double clamp_attr(double v) { return std::clamp(v, 1.0, 7.0); }

// Per-segment helper: applies `fn`, turning exceptions into failures.
AnnotationBatchResult each_segment(std::span<const SegmentInput> batch,
                                   const std::function<PartialFields(const SegmentInput&)>& fn) {
  AnnotationBatchResult out;
  out.reserve(batch.size());
  for (const auto& in : batch) {
    SegmentResult r;
    r.segment_id = in.record->segment_id;
    try {
      r.fields = fn(in);
    } catch (const std::exception& e) {
      r.ok = false;
      r.reason = e.what();
      r.fields.clear();
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string seeded_words(std::uint64_t seed, double duration_s) {
  std::mt19937_64 rng(seed);
  const auto count = std::max<long>(1, std::lround(duration_s * 2.5));
  std::string text;
  for (long i = 0; i < count; ++i) {
    if (i) text += ' ';
    text += kVocabulary[rng() % kVocabulary.size()];
  }
  return text;
}

class StubSpeechMusic : public Annotator {
 public:
  AnnotationBatchResult annotate(std::span<const SegmentInput> batch) override {
    return each_segment(batch, [](const SegmentInput& in) -> PartialFields {
      return {{"is_speech", envelope_variation(in.samples, in.sample_rate_hz) >
                                kSpeechVariationThreshold}};
    });
  }
};

class StubDiarization : public Annotator {
 public:
  AnnotationBatchResult annotate(std::span<const SegmentInput> batch) override {
    return each_segment(batch, [](const SegmentInput& in) -> PartialFields {
      return {{"local_speaker", pitch_band(estimate_f0(in.samples, in.sample_rate_hz))}};
    });
  }
};

class StubGenderAge : public Annotator {
 public:
  explicit StubGenderAge(std::uint64_t seed) : seed_(seed) {}
  AnnotationBatchResult annotate(std::span<const SegmentInput> batch) override {
    return each_segment(batch, [this](const SegmentInput& in) -> PartialFields {
      const auto f0 = estimate_f0(in.samples, in.sample_rate_hz);
      std::string gender = !f0 ? "unknown" : (*f0 < 165.0 ? "male" : "female");
      // Same pitch band, same age: a speaker keeps one age across segments.
      const auto band = static_cast<std::uint64_t>(pitch_band(f0));
      const double age = 20.0 + 50.0 * unit_interval(derive_seed(seed_, band));
      return {{"gender", gender}, {"age_years", std::round(age * 10.0) / 10.0}};
    });
  }

 private:
  std::uint64_t seed_;
};

class StubEmotionCategory : public Annotator {
 public:
  AnnotationBatchResult annotate(std::span<const SegmentInput> batch) override {
    return each_segment(batch, [](const SegmentInput& in) -> PartialFields {
      return {{"emotion_category",
               std::string(emotion_from_rate(modulation_rate(in.samples, in.sample_rate_hz)))}};
    });
  }
};

class StubEmotionAttributes : public Annotator {
 public:
  explicit StubEmotionAttributes(std::uint64_t seed) : seed_(seed) {}
  AnnotationBatchResult annotate(std::span<const SegmentInput> batch) override {
    return each_segment(batch, [this](const SegmentInput& in) -> PartialFields {
      const auto rate = modulation_rate(in.samples, in.sample_rate_hz);
      const auto category = emotion_from_rate(rate);
      double valence = 4.0, dominance = 4.0;
      if (category == "happy") {
        valence = 5.5;
        dominance = 4.5;
      } else if (category == "sad") {
        valence = 2.5;
        dominance = 3.0;
      } else if (category == "angry") {
        valence = 2.5;
        dominance = 5.5;
      }
      std::mt19937_64 rng(segment_seed(seed_, in));
      std::uniform_real_distribution<double> jitter(-0.5, 0.5);
      auto q = [](double v) { return std::round(clamp_attr(v) * 100.0) / 100.0; };
      const double arousal = rate ? 1.0 + 0.8 * *rate : 1.5;
      const double a = q(arousal + jitter(rng));
      const double d = q(dominance + jitter(rng));
      const double v = q(valence + jitter(rng));
      return {{"arousal", a}, {"dominance", d}, {"valence", v}};
    });
  }

 private:
  std::uint64_t seed_;
};

class StubSoundEvents : public Annotator {
 public:
  explicit StubSoundEvents(std::uint64_t seed) : seed_(seed) {}
  AnnotationBatchResult annotate(std::span<const SegmentInput> batch) override {
    return each_segment(batch, [this](const SegmentInput& in) -> PartialFields {
      const double cv = envelope_variation(in.samples, in.sample_rate_hz);
      const double speech = 1.0 / (1.0 + std::exp(-12.0 * (cv - kSpeechVariationThreshold)));
      auto q = [](double v) { return std::round(v * 1000.0) / 1000.0; };
      std::mt19937_64 rng(segment_seed(seed_, in));
      std::string extra;
      do {
        extra = std::string(kTaxonomy[rng() % kTaxonomy.size()]);
      } while (extra == "Speech" || extra == "Music");
      const double extra_score = 0.05 + 0.25 * unit_interval(rng());
      Json events = Json::array();
      events.push_back(Json::array({"Speech", q(speech)}));
      events.push_back(Json::array({"Music", q(1.0 - speech)}));
      events.push_back(Json::array({extra, q(extra_score)}));
      return {{"sound_events", std::move(events)}};
    });
  }

 private:
  std::uint64_t seed_;
};

class StubEmbedder : public SpeakerEmbedder {
 public:
  Embedding embed(std::span<const float> samples, int sample_rate_hz) override {
    constexpr int kDim = 16;
    constexpr double kWidth = 1.5;
    Embedding e(kDim, 1.0);
    const auto f0 = estimate_f0(samples, sample_rate_hz);
    if (!f0) return e;
    const double pos = std::log2(*f0 / 60.0) / std::log2(400.0 / 60.0) * (kDim - 1);
    for (int i = 0; i < kDim; ++i) {
      const double d = (i - pos) / kWidth;
      e[static_cast<std::size_t>(i)] = std::exp(-0.5 * d * d) + 1e-6;
    }
    return e;
  }
};

}  // namespace

std::string_view emotion_from_rate(std::optional<double> rate_hz) {
  if (!rate_hz || *rate_hz < 2.75) return "sad";
  if (*rate_hz < 4.25) return "neutral";
  if (*rate_hz < 6.0) return "happy";
  return "angry";
}

std::int64_t pitch_band(std::optional<double> f0_hz) {
  if (!f0_hz || !(*f0_hz > 0.0)) return 0;
  return static_cast<std::int64_t>(std::floor(3.0 * std::log2(*f0_hz / 60.0)));
}

std::span<const std::string_view> sound_event_taxonomy() { return kTaxonomy; }

AnnotatorSpec default_spec(std::string_view name) {
  AnnotatorSpec s;
  s.name = std::string(name);
  s.version = "stub-1";
  if (name == "asr") {
    s.output_fields = {"transcript"};
  } else if (name == "speech_music") {
    s.output_fields = {"is_speech"};
  } else if (name == "diarization") {
    s.output_fields = {"local_speaker"};
  } else if (name == "gender_age") {
    s.output_fields = {"gender", "age_years"};
  } else if (name == "emotion_category") {
    s.output_fields = {"emotion_category"};
  } else if (name == "emotion_attributes") {
    s.output_fields = {"arousal", "dominance", "valence"};
  } else if (name == "sound_events") {
    s.output_fields = {"sound_events"};
  } else if (name == "snr") {
    s.version = "wada-1";
    s.output_fields = {"snr_db"};
  } else {
    throw Error("unknown annotator '" + std::string(name) + "'");
  }
  return s;
}

AnnotationBatchResult StubAsr::annotate(std::span<const SegmentInput> batch) {
  return each_segment(batch, [this](const SegmentInput& in) -> PartialFields {
    return {{"transcript", seeded_words(segment_seed(seed_, in), in.record->duration_s())}};
  });
}

std::vector<SegmentProposal> StubAsr::propose(const AudioSource& source,
                                              std::span<const float> samples, int rate) {
  constexpr double kHop = 0.01, kFrame = 0.02;
  const auto rms = frame_rms(samples, rate, kHop, kFrame);
  std::vector<SegmentProposal> out;
  if (rms.empty()) return out;
  std::vector<double> sorted = rms;
  const auto k = sorted.size() / 20;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
  const double floor = sorted[k];
  const double peak = *std::max_element(rms.begin(), rms.end());
  if (!(peak > 0.0)) return out;
  const double threshold = std::max(floor * std::pow(10.0, 8.0 / 20.0), peak * 1e-3);

  std::vector<std::pair<std::size_t, std::size_t>> runs;  // [first, last] frames
  for (std::size_t i = 0; i < rms.size(); ++i) {
    if (rms[i] <= threshold) continue;
    if (!runs.empty() && (i - runs.back().second - 1) * kHop < 0.2) {
      runs.back().second = i;
    } else {
      runs.emplace_back(i, i);
    }
  }
  const double duration = static_cast<double>(samples.size()) / rate;
  const std::uint64_t src_seed = derive_seed(seed_, source.source_id);
  for (auto [a, b] : runs) {
    const double start = static_cast<double>(a) * kHop;
    const double end = std::min(static_cast<double>(b) * kHop + kFrame, duration);
    if (end - start < 0.3) continue;
    const auto at_ms = static_cast<std::uint64_t>(std::llround(start * 1000.0));
    out.push_back({start, end, seeded_words(derive_seed(src_seed, at_ms), end - start)});
  }
  return out;
}

WadaSnrAnnotator::WadaSnrAnnotator(std::shared_ptr<const SnrTable> table)
    : table_(std::move(table)) {
  if (!table_) throw Error("snr annotator needs a table");
  table_->validate();
}

AnnotationBatchResult WadaSnrAnnotator::annotate(std::span<const SegmentInput> batch) {
  return each_segment(batch, [this](const SegmentInput& in) -> PartialFields {
    return {{"snr_db", std::round(estimate_snr(in.samples, *table_) * 1000.0) / 1000.0}};
  });
}

std::shared_ptr<Annotator> make_stub_annotator(std::string_view name, std::uint64_t seed) {
  if (name == "asr") return std::make_shared<StubAsr>(seed);
  if (name == "speech_music") return std::make_shared<StubSpeechMusic>();
  if (name == "diarization") return std::make_shared<StubDiarization>();
  if (name == "gender_age") return std::make_shared<StubGenderAge>(seed);
  if (name == "emotion_category") return std::make_shared<StubEmotionCategory>();
  if (name == "emotion_attributes") return std::make_shared<StubEmotionAttributes>(seed);
  if (name == "sound_events") return std::make_shared<StubSoundEvents>(seed);
  throw Error("no stub for annotator '" + std::string(name) + "'");
}

std::shared_ptr<SpeakerEmbedder> make_stub_embedder() { return std::make_shared<StubEmbedder>(); }

void register_stub_annotators(AnnotatorRegistry& registry, std::uint64_t seed,
                              std::shared_ptr<const SnrTable> table) {
  for (auto name : annotator_names()) {
    if (name == "snr") {
      registry.register_adapter(default_spec(name), std::make_shared<WadaSnrAnnotator>(table));
    } else {
      registry.register_adapter(default_spec(name),
                                make_stub_annotator(name, derive_seed(seed, name)));
    }
  }
  registry.set_embedder(make_stub_embedder());
}

}  // namespace podcurate
