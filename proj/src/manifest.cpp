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

#include "podcurate/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "podcurate/error.hpp"
#include "podcurate/schema.hpp"

namespace podcurate {

namespace {

constexpr const char* kFormatTag = "podcurate-manifest";

const std::set<std::string, std::less<>> kRecordKeys = {
    "segment_id", "source_id",  "start_s",  "end_s",   "transcript",
    "is_speech",  "local_speaker", "global_speaker", "gender", "age_years",
    "emotion_category", "arousal", "dominance", "valence", "snr_db",
    "sound_events", "annotation_status"};

const std::set<std::string, std::less<>> kSourceKeys = {
    "source_id", "uri", "sample_rate_hz", "duration_s", "channel_count"};

const std::set<std::string, std::less<>> kHeaderKeys = {
    "format", "schema_version", "run_metadata", "sources"};

template <typename T>
T require(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(std::string("missing required field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw Error(std::string("field '") + key + "' has the wrong type");
  }
}

double require_number(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(std::string("missing required field '") + key + "'");
  if (!it->is_number()) throw Error(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

void check_finite(double v, std::string_view what) {
  if (!std::isfinite(v)) throw Error(std::string(what) + " must be finite");
}

void check_attribute(const std::optional<double>& v, std::string_view name) {
  if (!v) return;
  check_finite(*v, name);
  if (*v < kEmotionAttributeMin || *v > kEmotionAttributeMax) {
    std::ostringstream os;
    os << name << " " << *v << " outside [" << kEmotionAttributeMin << ", "
       << kEmotionAttributeMax << "]";
    throw Error(os.str());
  }
}

// Applies one annotatable field from JSON to the record. Used both by the
// reader and by merge_annotations so the two stay in lockstep.
void apply_field(SegmentRecord& r, const std::string& name, const Json& v) {
  auto as_number = [&]() {
    if (!v.is_number()) throw Error("field '" + name + "' must be a number");
    return v.get<double>();
  };
  auto as_string = [&]() {
    if (!v.is_string()) throw Error("field '" + name + "' must be a string");
    return v.get<std::string>();
  };
  if (name == "transcript") {
    r.transcript = as_string();
  } else if (name == "is_speech") {
    if (!v.is_boolean()) throw Error("field 'is_speech' must be a boolean");
    r.is_speech = v.get<bool>();
  } else if (name == "local_speaker") {
    if (!v.is_number_integer()) throw Error("field 'local_speaker' must be an integer");
    r.local_speaker = v.get<std::int64_t>();
  } else if (name == "global_speaker") {
    r.global_speaker = as_string();
  } else if (name == "gender") {
    auto g = parse_gender(as_string());
    if (!g) throw Error("unknown gender '" + v.get<std::string>() + "'");
    r.gender = *g;
  } else if (name == "age_years") {
    r.age_years = as_number();
  } else if (name == "emotion_category") {
    auto e = parse_emotion(as_string());
    if (!e) throw Error("unknown emotion_category '" + v.get<std::string>() + "'");
    r.emotion_category = *e;
  } else if (name == "arousal") {
    r.arousal = as_number();
  } else if (name == "dominance") {
    r.dominance = as_number();
  } else if (name == "valence") {
    r.valence = as_number();
  } else if (name == "snr_db") {
    r.snr_db = as_number();
  } else if (name == "sound_events") {
    if (!v.is_array()) throw Error("field 'sound_events' must be an array");
    std::vector<SoundEvent> events;
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_number()) {
        throw Error("sound_events entries must be [label, score] pairs");
      }
      events.push_back({e[0].get<std::string>(), e[1].get<double>()});
    }
    r.sound_events = std::move(events);
  } else {
    throw Error("field '" + name + "' is not an annotatable schema field");
  }
}

}  // namespace

std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::kFemale: return "female";
    case Gender::kMale: return "male";
    case Gender::kUnknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(EmotionCategory e) {
  switch (e) {
    case EmotionCategory::kNeutral: return "neutral";
    case EmotionCategory::kAngry: return "angry";
    case EmotionCategory::kHappy: return "happy";
    case EmotionCategory::kSad: return "sad";
  }
  return "neutral";
}

std::string_view to_string(AnnotationStatus s) {
  switch (s) {
    case AnnotationStatus::kPending: return "pending";
    case AnnotationStatus::kDone: return "done";
    case AnnotationStatus::kFailed: return "failed";
  }
  return "pending";
}

std::optional<Gender> parse_gender(std::string_view s) {
  if (s == "female") return Gender::kFemale;
  if (s == "male") return Gender::kMale;
  if (s == "unknown") return Gender::kUnknown;
  return std::nullopt;
}

std::optional<EmotionCategory> parse_emotion(std::string_view s) {
  if (s == "neutral") return EmotionCategory::kNeutral;
  if (s == "angry") return EmotionCategory::kAngry;
  if (s == "happy") return EmotionCategory::kHappy;
  if (s == "sad") return EmotionCategory::kSad;
  return std::nullopt;
}

std::optional<AnnotationStatus> parse_status(std::string_view s) {
  if (s == "pending") return AnnotationStatus::kPending;
  if (s == "done") return AnnotationStatus::kDone;
  if (s == "failed") return AnnotationStatus::kFailed;
  return std::nullopt;
}

const AudioSource* Manifest::find_source(std::string_view source_id) const {
  for (const auto& s : sources) {
    if (s.source_id == source_id) return &s;
  }
  return nullptr;
}

SegmentRecord* Manifest::find_record(std::string_view segment_id) {
  for (auto& r : records) {
    if (r.segment_id == segment_id) return &r;
  }
  return nullptr;
}

const SegmentRecord* Manifest::find_record(std::string_view segment_id) const {
  return const_cast<Manifest*>(this)->find_record(segment_id);
}

void Manifest::sort_records() {
  std::stable_sort(records.begin(), records.end(),
                   [](const SegmentRecord& a, const SegmentRecord& b) {
                     if (a.source_id != b.source_id) return a.source_id < b.source_id;
                     if (a.start_s != b.start_s) return a.start_s < b.start_s;
                     return a.segment_id < b.segment_id;
                   });
}

std::string make_segment_id(std::string_view source_id, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_%05zu", index);
  return std::string(source_id) + buf;
}

Json record_to_json(const SegmentRecord& r) {
  Json j = r.extra.is_object() ? r.extra : Json::object();
  j["segment_id"] = r.segment_id;
  j["source_id"] = r.source_id;
  j["start_s"] = r.start_s;
  j["end_s"] = r.end_s;
  if (r.transcript) j["transcript"] = *r.transcript;
  if (r.is_speech) j["is_speech"] = *r.is_speech;
  if (r.local_speaker) j["local_speaker"] = *r.local_speaker;
  if (r.global_speaker) j["global_speaker"] = *r.global_speaker;
  if (r.gender) j["gender"] = to_string(*r.gender);
  if (r.age_years) j["age_years"] = *r.age_years;
  if (r.emotion_category) j["emotion_category"] = to_string(*r.emotion_category);
  if (r.arousal) j["arousal"] = *r.arousal;
  if (r.dominance) j["dominance"] = *r.dominance;
  if (r.valence) j["valence"] = *r.valence;
  if (r.snr_db) j["snr_db"] = *r.snr_db;
  if (r.sound_events) {
    Json events = Json::array();
    for (const auto& e : *r.sound_events) events.push_back(Json::array({e.label, e.score}));
    j["sound_events"] = std::move(events);
  }
  Json status = Json::object();
  for (const auto& [name, s] : r.annotation_status) status[name] = to_string(s);
  j["annotation_status"] = std::move(status);
  return j;
}

SegmentRecord record_from_json(const Json& j) {
  if (!j.is_object()) throw Error("record must be a JSON object");
  SegmentRecord r;
  r.segment_id = require<std::string>(j, "segment_id");
  r.source_id = require<std::string>(j, "source_id");
  r.start_s = require_number(j, "start_s");
  r.end_s = require_number(j, "end_s");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (!kRecordKeys.contains(key)) {
      r.extra[key] = it.value();
      continue;
    }
    if (key == "segment_id" || key == "source_id" || key == "start_s" || key == "end_s") {
      continue;
    }
    if (key == "annotation_status") {
      if (!it->is_object()) throw Error("annotation_status must be an object");
      for (auto s = it->begin(); s != it->end(); ++s) {
        auto st = s->is_string() ? parse_status(s->get<std::string>()) : std::nullopt;
        if (!st) throw Error("invalid annotation status for '" + s.key() + "'");
        r.annotation_status[s.key()] = *st;
      }
      continue;
    }
    apply_field(r, key, it.value());
  }
  return r;
}

Json source_to_json(const AudioSource& s) {
  Json j = s.extra.is_object() ? s.extra : Json::object();
  j["source_id"] = s.source_id;
  j["uri"] = s.uri;
  j["sample_rate_hz"] = s.sample_rate_hz;
  j["duration_s"] = s.duration_s;
  j["channel_count"] = s.channel_count;
  return j;
}

AudioSource source_from_json(const Json& j) {
  if (!j.is_object()) throw Error("source must be a JSON object");
  AudioSource s;
  s.source_id = require<std::string>(j, "source_id");
  s.uri = require<std::string>(j, "uri");
  s.sample_rate_hz = require<int>(j, "sample_rate_hz");
  s.duration_s = require_number(j, "duration_s");
  s.channel_count = require<int>(j, "channel_count");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kSourceKeys.contains(it.key())) s.extra[it.key()] = it.value();
  }
  return s;
}

void validate_record(const SegmentRecord& r, const AudioSource* source) {
  const std::string where = "record '" + r.segment_id + "': ";
  try {
    if (r.segment_id.empty()) throw Error("empty segment_id");
    check_finite(r.start_s, "start_s");
    check_finite(r.end_s, "end_s");
    if (r.start_s < 0.0) throw Error("start_s is negative");
    if (!(r.start_s < r.end_s)) throw Error("start_s must be < end_s");
    if (source && r.end_s > source->duration_s) {
      throw Error("end_s exceeds source duration");
    }
    check_attribute(r.arousal, "arousal");
    check_attribute(r.dominance, "dominance");
    check_attribute(r.valence, "valence");
    if (r.age_years) {
      check_finite(*r.age_years, "age_years");
      if (*r.age_years < 0.0) throw Error("age_years is negative");
    }
    if (r.snr_db) check_finite(*r.snr_db, "snr_db");
    if (r.sound_events) {
      for (const auto& e : *r.sound_events) {
        if (!(e.score >= 0.0 && e.score <= 1.0)) {
          throw Error("sound event '" + e.label + "' score outside [0, 1]");
        }
      }
    }
  } catch (const Error& e) {
    throw Error(where + e.what());
  }
}

void validate_manifest(const Manifest& m) {
  std::unordered_map<std::string, const AudioSource*> sources;
  for (const auto& s : m.sources) {
    if (s.source_id.empty()) throw Error("source with empty source_id");
    if (!(s.duration_s > 0.0) || !std::isfinite(s.duration_s)) {
      throw Error("source '" + s.source_id + "': duration_s must be > 0");
    }
    if (s.sample_rate_hz <= 0 || s.channel_count <= 0) {
      throw Error("source '" + s.source_id + "': sample rate and channel count must be positive");
    }
    if (!sources.emplace(s.source_id, &s).second) {
      throw Error("duplicate source_id '" + s.source_id + "'");
    }
  }
  std::unordered_set<std::string> ids;
  const SegmentRecord* prev = nullptr;
  for (const auto& r : m.records) {
    auto it = sources.find(r.source_id);
    if (it == sources.end()) {
      throw Error("record '" + r.segment_id + "' references unknown source '" + r.source_id + "'");
    }
    validate_record(r, it->second);
    if (!ids.insert(r.segment_id).second) {
      throw Error("duplicate segment_id '" + r.segment_id + "'");
    }
    if (prev && (prev->source_id > r.source_id ||
                 (prev->source_id == r.source_id && prev->start_s > r.start_s))) {
      throw Error("records not sorted by (source_id, start_s) at '" + r.segment_id + "'");
    }
    prev = &r;
  }
}

std::string serialize_manifest(const Manifest& m) {
  Manifest sorted = m;
  sorted.sort_records();
  validate_manifest(sorted);

  Json header = m.extra.is_object() ? m.extra : Json::object();
  header["format"] = kFormatTag;
  header["schema_version"] = m.schema_version;
  header["run_metadata"] = m.run_metadata.is_object() ? m.run_metadata : Json::object();
  Json sources = Json::array();
  for (const auto& s : m.sources) sources.push_back(source_to_json(s));
  header["sources"] = std::move(sources);

  std::string out = header.dump(-1, ' ', false, Json::error_handler_t::strict);
  out += '\n';
  for (const auto& r : sorted.records) {
    out += record_to_json(r).dump(-1, ' ', false, Json::error_handler_t::strict);
    out += '\n';
  }
  return out;
}

Manifest parse_manifest(std::string_view text) {
  Manifest m;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    const bool terminated = nl != std::string_view::npos;
    std::string_view line = text.substr(pos, terminated ? nl - pos : std::string_view::npos);
    pos = terminated ? nl + 1 : text.size();
    ++line_no;
    if (line.empty() && terminated) continue;

    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error&) {
      if (!header_seen) throw ParseError("malformed header at line 1", line_no);
      throw ParseError("malformed record at line " + std::to_string(line_no), line_no);
    }

    if (!header_seen) {
      header_seen = true;
      if (!j.is_object() || !j.contains("schema_version")) {
        throw ParseError("malformed header at line 1: missing schema_version", line_no);
      }
      const Json& v = j["schema_version"];
      if (!v.is_number_integer()) {
        throw ParseError("malformed header at line 1: schema_version must be an integer", line_no);
      }
      m.schema_version = v.get<int>();
      if (m.schema_version > kSchemaVersion) {
        throw ParseError("manifest schema_version " + std::to_string(m.schema_version) +
                             " is newer than supported version " + std::to_string(kSchemaVersion) +
                             "; upgrade podcurate to read it",
                         line_no);
      }
      try {
        if (j.contains("run_metadata")) m.run_metadata = j["run_metadata"];
        if (j.contains("sources")) {
          for (const auto& s : j["sources"]) m.sources.push_back(source_from_json(s));
        }
      } catch (const Error& e) {
        throw ParseError(std::string("malformed header at line 1: ") + e.what(), line_no);
      }
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!kHeaderKeys.contains(it.key())) m.extra[it.key()] = it.value();
      }
      continue;
    }
    try {
      m.records.push_back(record_from_json(j));
    } catch (const Error& e) {
      throw ParseError("malformed record at line " + std::to_string(line_no) + ": " + e.what(),
                       line_no);
    }
  }
  if (!header_seen) throw ParseError("empty manifest: header line missing", 0);
  return m;
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  // Validation happens inside serialize_manifest, before any byte hits disk.
  const std::string bytes = serialize_manifest(m);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move manifest into place at '" + path.string() + "'");
  }
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open manifest '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_manifest(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string manifest_hash(const Manifest& m) { return fnv1a_hex(serialize_manifest(m)); }

void merge_annotations(Manifest& m, const std::string& annotator,
                       const std::map<std::string, PartialFields>& outputs) {
  std::vector<std::string> unknown;
  for (const auto& [id, fields] : outputs) {
    if (!m.find_record(id)) unknown.push_back(id);
    for (const auto& [name, _] : fields) {
      const FieldInfo* f = find_field(name);
      if (!f || !f->annotatable) {
        throw Error("annotator '" + annotator + "' wrote unknown field '" + name + "'");
      }
    }
  }
  if (!unknown.empty()) {
    std::string msg = "unknown segment_id(s) from annotator '" + annotator + "':";
    for (const auto& id : unknown) msg += " " + id;
    throw Error(msg);
  }

  // Stage on copies so a bad value leaves the manifest untouched.
  std::vector<std::pair<SegmentRecord*, SegmentRecord>> staged;
  for (const auto& [id, fields] : outputs) {
    SegmentRecord* target = m.find_record(id);
    SegmentRecord updated = *target;
    for (const auto& [name, value] : fields) apply_field(updated, name, value);
    updated.annotation_status[annotator] = AnnotationStatus::kDone;
    validate_record(updated, m.find_source(updated.source_id));
    staged.emplace_back(target, std::move(updated));
  }
  for (auto& [target, updated] : staged) *target = std::move(updated);
}

Manifest merged(Manifest m, const std::string& annotator,
                const std::map<std::string, PartialFields>& outputs) {
  merge_annotations(m, annotator, outputs);
  return m;
}

CorpusSummary corpus_summary(const Manifest& m) {
  CorpusSummary s;
  for (auto g : gender_labels()) s.gender_counts[std::string(g)] = 0;
  s.gender_counts["absent"] = 0;
  for (auto e : emotion_labels()) s.emotion_counts[std::string(e)] = 0;
  s.emotion_counts["absent"] = 0;

  double total_s = 0.0;
  std::set<std::string> labelled, unlinked;
  std::map<std::string, std::map<std::string, std::size_t>> speaker_gender_votes;
  for (const auto& r : m.records) {
    total_s += r.duration_s();
    ++s.gender_counts[r.gender ? std::string(to_string(*r.gender)) : "absent"];
    ++s.emotion_counts[r.emotion_category ? std::string(to_string(*r.emotion_category))
                                          : "absent"];
    if (r.global_speaker) {
      if (r.global_speaker->rfind("unk_", 0) == 0) {
        unlinked.insert(*r.global_speaker);
      } else {
        labelled.insert(*r.global_speaker);
        if (r.gender) ++speaker_gender_votes[*r.global_speaker][std::string(to_string(*r.gender))];
      }
    }
  }
  s.utterance_count = m.records.size();
  s.total_hours = total_s / 3600.0;
  s.mean_duration_s = m.records.empty() ? 0.0 : total_s / static_cast<double>(m.records.size());
  s.global_speaker_count = labelled.size();
  s.unlinked_cluster_count = unlinked.size();
  for (auto g : gender_labels()) s.speaker_gender_counts[std::string(g)] = 0;
  for (const auto& [speaker, votes] : speaker_gender_votes) {
    // Majority vote; ties resolve to the alphabetically first label.
    auto best = std::max_element(votes.begin(), votes.end(), [](const auto& a, const auto& b) {
      return a.second < b.second;
    });
    ++s.speaker_gender_counts[best->first];
  }
  return s;
}

Json summary_to_json(const CorpusSummary& s) {
  Json j;
  j["total_hours"] = s.total_hours;
  j["utterance_count"] = s.utterance_count;
  j["mean_duration_s"] = s.mean_duration_s;
  j["global_speaker_count"] = s.global_speaker_count;
  j["unlinked_cluster_count"] = s.unlinked_cluster_count;
  j["gender_counts"] = s.gender_counts;
  j["speaker_gender_counts"] = s.speaker_gender_counts;
  j["emotion_counts"] = s.emotion_counts;
  return j;
}

}  // namespace podcurate
