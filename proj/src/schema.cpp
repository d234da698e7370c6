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

#include "podcurate/schema.hpp"

#include <array>

namespace podcurate {
namespace {

constexpr std::array<std::string_view, 4> kEmotionLabels = {"neutral", "angry", "happy",
                                                            "sad"};
constexpr std::array<std::string_view, 3> kGenderLabels = {"female", "male", "unknown"};

const std::array<FieldInfo, 17> kFields = {{
    {"segment_id", FieldKind::kString, {}, false},
    {"source_id", FieldKind::kString, {}, false},
    {"start_s", FieldKind::kNumber, {}, false},
    {"end_s", FieldKind::kNumber, {}, false},
    {"transcript", FieldKind::kString, {}, true},
    {"is_speech", FieldKind::kBool, {}, true},
    {"local_speaker", FieldKind::kNumber, {}, true},
    {"global_speaker", FieldKind::kString, {}, true},
    {"gender", FieldKind::kEnum, kGenderLabels, true},
    {"age_years", FieldKind::kNumber, {}, true},
    {"emotion_category", FieldKind::kEnum, kEmotionLabels, true},
    {"arousal", FieldKind::kNumber, {}, true},
    {"dominance", FieldKind::kNumber, {}, true},
    {"valence", FieldKind::kNumber, {}, true},
    {"snr_db", FieldKind::kNumber, {}, true},
    {"sound_events", FieldKind::kEvents, {}, true},
    {"annotation_status", FieldKind::kStatus, {}, false},
}};

}  // namespace

std::span<const FieldInfo> record_fields() {
  return kFields;
}

const FieldInfo* find_field(std::string_view name) {
  for (const auto& f : record_fields()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::span<const std::string_view> emotion_labels() { return kEmotionLabels; }
std::span<const std::string_view> gender_labels() { return kGenderLabels; }

std::optional<FieldValue> field_value(const SegmentRecord& r, std::string_view name) {
  auto num = [](const std::optional<double>& v) -> std::optional<FieldValue> {
    if (!v) return std::nullopt;
    return FieldValue(*v);
  };
  auto str = [](const std::optional<std::string>& v) -> std::optional<FieldValue> {
    if (!v) return std::nullopt;
    return FieldValue(*v);
  };
  if (name == "segment_id") return FieldValue(r.segment_id);
  if (name == "source_id") return FieldValue(r.source_id);
  if (name == "start_s") return FieldValue(r.start_s);
  if (name == "end_s") return FieldValue(r.end_s);
  if (name == "transcript") return str(r.transcript);
  if (name == "is_speech") {
    if (!r.is_speech) return std::nullopt;
    return FieldValue(*r.is_speech);
  }
  if (name == "local_speaker") {
    if (!r.local_speaker) return std::nullopt;
    return FieldValue(static_cast<double>(*r.local_speaker));
  }
  if (name == "global_speaker") return str(r.global_speaker);
  if (name == "gender") {
    if (!r.gender) return std::nullopt;
    return FieldValue(std::string(to_string(*r.gender)));
  }
  if (name == "age_years") return num(r.age_years);
  if (name == "emotion_category") {
    if (!r.emotion_category) return std::nullopt;
    return FieldValue(std::string(to_string(*r.emotion_category)));
  }
  if (name == "arousal") return num(r.arousal);
  if (name == "dominance") return num(r.dominance);
  if (name == "valence") return num(r.valence);
  if (name == "snr_db") return num(r.snr_db);
  return std::nullopt;
}

}  // namespace podcurate
