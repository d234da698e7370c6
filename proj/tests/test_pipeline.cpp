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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "fixture_run.hpp"
#include "podcurate/error.hpp"
#include "podcurate/query.hpp"
#include "podcurate/schema.hpp"
#include "podcurate/stubs.hpp"
#include "test_support.hpp"

using namespace podcurate;
using namespace podcurate::testing;

namespace {

// Shared clean run of the fixture; built once per binary.
struct Shared {
  TempDir dir{"pipeline"};
  FixtureRun run = run_fixture(dir.path(), 1);
};

Shared& shared() {
  static Shared s;
  return s;
}

const std::vector<std::string> kAnnotationFields = {
    "transcript", "is_speech", "local_speaker", "global_speaker", "gender", "age_years",
    "emotion_category", "arousal", "dominance", "valence", "snr_db", "sound_events"};

bool has_field(const SegmentRecord& r, const std::string& f) {
  if (f == "sound_events") return r.sound_events.has_value();
  if (f == "is_speech") return r.is_speech.has_value();
  return field_value(r, f).has_value();
}

class Crashing : public Annotator {
 public:
  AnnotationBatchResult annotate(std::span<const SegmentInput>) override {
    throw std::runtime_error("injected crash");
  }
};

}  // namespace

TEST_CASE("fixture run completes with every field populated") {
  const auto& run = shared().run;
  CHECK(run.report.complete());
  CHECK(run.report.sources_total == 1);
  CHECK(run.report.sources_segmented == 1);
  REQUIRE(run.manifest.records.size() >= 5);
  for (const auto& r : run.manifest.records) {
    for (const auto& f : kAnnotationFields) CHECK_MESSAGE(has_field(r, f), (r.segment_id + " lacks " + std::string(f)));
    CHECK(r.annotation_status.size() == 9);
    for (const auto& [stage, status] : r.annotation_status) CHECK_MESSAGE(status == AnnotationStatus::kDone, stage);
  }
  validate_manifest(run.manifest);
  const auto& src = run.manifest.sources.at(0);
  CHECK(src.sample_rate_hz == 16000);
  CHECK(src.channel_count == 2);
  CHECK(src.duration_s == doctest::Approx(kFixtureDurationS));
  CHECK(run.manifest.run_metadata["created_at"] == "2026-01-01T00:00:00Z");
  CHECK(run.manifest.run_metadata["annotators"].size() == 8);
  CHECK(run.manifest.run_metadata.contains("snr_table"));
}

TEST_CASE("segments follow the boundary rules and cover the utterances") {
  const auto& m = shared().run.manifest;
  for (std::size_t i = 1; i < m.records.size(); ++i) CHECK(m.records[i - 1].end_s <= m.records[i].start_s);
  for (const auto& u : fixture_layout()) {
    bool covered = false;
    for (const auto& r : m.records) covered |= r.start_s <= u.start_s + 0.2 && r.end_s >= u.end_s - 0.2;
    CHECK_MESSAGE(covered, u.start_s);
  }
  for (const auto& r : m.records) CHECK(r.duration_s() <= 10.0 + 2 * 0.25 + 1e-9);
}

TEST_CASE("fixture annotations agree with ground truth") {
  const auto& m = shared().run.manifest;
  std::set<std::string> spk0_labels, spk1_labels;
  for (const auto& r : m.records) {
    const FixtureUtterance* u = truth_for(r);
    REQUIRE_MESSAGE(u, r.segment_id);
    if (u->kind == "music") {
      CHECK(*r.is_speech == false);  // flagged, kept
      continue;
    }
    CHECK(*r.is_speech);
    CHECK(std::string(to_string(*r.emotion_category)) == u->emotion);
    CHECK(std::string(to_string(*r.gender)) == (u->speaker == "spk0" ? "male" : "female"));
    (u->speaker == "spk0" ? spk0_labels : spk1_labels).insert(*r.global_speaker);
    if (u->low_snr) {
      CHECK(*r.snr_db >= 0.0);
      CHECK(*r.snr_db <= 20.0);
    } else {
      CHECK(*r.snr_db > 30.0);
    }
  }
  // Each speaker links to one global label; the anchored one is spk_A.
  CHECK(spk0_labels == std::set<std::string>{"spk_A"});
  CHECK(spk1_labels.size() == 1);
  CHECK(spk1_labels != spk0_labels);
}

TEST_CASE("runs are deterministic across worker counts") {
  TempDir dir("pipeline");
  FixtureRun parallel = run_fixture(dir.path(), 4);
  // Only the audio location differs between the two fixture directories.
  const Manifest& serial = shared().run.manifest;
  REQUIRE(parallel.manifest.sources.size() == serial.sources.size());
  for (std::size_t i = 0; i < serial.sources.size(); ++i) parallel.manifest.sources[i].uri = serial.sources[i].uri;
  CHECK(serialize_manifest(parallel.manifest) == serialize_manifest(serial));
}

TEST_CASE("resuming a finished manifest changes nothing") {
  const auto& s = shared();
  PipelineConfig config = load_pipeline_config(s.dir / "config.json");
  config.created_at = "2026-01-01T00:00:00Z";
  RunReport report;
  const Manifest again = run_configured(config, s.dir / "audio", &report, &s.run.manifest);
  CHECK(serialize_manifest(again) == serialize_manifest(s.run.manifest));
  CHECK(report.sources_segmented == 0);
  for (const auto& st : report.stages) {
    CHECK(st.done == 0);
    CHECK(st.skipped == s.run.manifest.records.size());
  }
}

TEST_CASE("a crashing annotator leaves the other fields untouched and resumes cleanly") {
  const auto& s = shared();
  PipelineConfig config = load_pipeline_config(s.dir / "config.json");
  config.workers = 1;
  auto table = resolve_snr_table(config);
  AnnotatorRegistry reg;
  for (const auto& a : config.annotators) {
    AnnotatorSpec spec = default_spec(a.name);
    spec.batch_size = a.batch_size;
    std::shared_ptr<Annotator> impl;
    if (a.name == "emotion_category") impl = std::make_shared<Crashing>();
    else if (a.name == "snr") impl = std::make_shared<WadaSnrAnnotator>(table);
    else impl = make_stub_annotator(a.name, a.seed);
    reg.register_adapter(spec, impl);
  }
  reg.set_embedder(make_stub_embedder());
  PipelineOptions options;
  options.anchors = read_anchor_file(*config.anchors_path);
  options.run_metadata = s.run.manifest.run_metadata;
  const auto sources = discover_sources(s.dir / "audio");
  RunReport report;
  Manifest partial = run_pipeline(sources, reg, options, &report);
  CHECK_FALSE(report.complete());
  CHECK(report.failed_segments() == s.run.manifest.records.size());
  REQUIRE(partial.records.size() == s.run.manifest.records.size());
  for (std::size_t i = 0; i < partial.records.size(); ++i) {
    SegmentRecord expect = s.run.manifest.records[i];
    expect.emotion_category.reset();
    expect.annotation_status["emotion_category"] = AnnotationStatus::kFailed;
    CHECK(partial.records[i] == expect);
  }

  // Resume with the real stub: the result equals a clean run.
  RunReport resumed_report;
  config.created_at = "2026-01-01T00:00:00Z";
  const Manifest resumed = run_configured(config, s.dir / "audio", &resumed_report, &partial);
  CHECK(resumed_report.complete());
  CHECK(serialize_manifest(resumed) == serialize_manifest(s.run.manifest));
}

TEST_CASE("every populated field has exactly one owner") {
  std::map<std::string, std::string> owner;
  for (auto name : annotator_names()) {
    for (const auto& f : default_spec(name).output_fields) CHECK(owner.emplace(f, std::string(name)).second);
  }
  CHECK(owner.emplace("global_speaker", kSpeakerLinkerName).second);
  for (const auto& r : shared().run.manifest.records) {
    for (const auto& f : kAnnotationFields) {
      if (!has_field(r, f)) continue;
      REQUIRE(owner.contains(f));
      CHECK(r.annotation_status.at(owner[f]) == AnnotationStatus::kDone);
    }
  }
}

TEST_CASE("unreadable sources are skipped and reported") {
  TempDir dir("pipeline");
  write_fixture(dir.path());
  spit(dir / "audio" / "broken.wav", "RIFF garbage");
  PipelineConfig config = load_pipeline_config(dir / "config.json");
  RunReport report;
  const Manifest m = run_configured(config, dir / "audio", &report);
  CHECK_FALSE(report.complete());
  REQUIRE(report.skipped_sources.size() == 1);
  CHECK(report.skipped_sources[0].first.find("broken.wav") != std::string::npos);
  CHECK(m.sources.size() == 1);
  CHECK(m.records.size() == shared().run.manifest.records.size());
  CHECK(format_run_report(report).find("broken.wav") != std::string::npos);
  CHECK(run_report_to_json(report)["complete"] == false);
}

TEST_CASE("empty source list gives an empty manifest") {
  AnnotatorRegistry reg;
  register_stub_annotators(reg, 1, std::make_shared<SnrTable>(SnrTable{{0.0, 10.0}, {0.5, 1.0}, 0.4, 1, 1, 1}));
  RunReport report;
  const Manifest m = run_pipeline(std::vector<AudioSource>{}, reg, PipelineOptions{}, &report);
  CHECK(m.records.empty());
  CHECK(m.sources.empty());
  CHECK(report.complete());
}

TEST_CASE("duplicate source ids are rejected") {
  AnnotatorRegistry reg;
  const std::vector<AudioSource> s = {plain_source("a"), plain_source("a")};
  CHECK_THROWS_AS(run_pipeline(s, reg, PipelineOptions{}), Error);
}

TEST_CASE("config validation") {
  TempDir dir("pipeline");
  auto load = [&](const Json& j) { return pipeline_config_from_json(j, dir.path()); };
  const Json ok = {{"annotators", {{{"name", "asr"}}}}};
  CHECK(load(ok).annotators.at(0).impl == "stub");
  CHECK_THROWS_AS(load(Json{{"annotators", Json::array()}, {"bogus", 1}}), Error);
  CHECK_THROWS_AS(load(Json{{"annotators", {{{"name", "whisper"}}}}}), Error);
  CHECK_THROWS_AS(load(Json{{"annotators", {{{"name", "asr"}}, {{"name", "asr"}}}}}), Error);
  CHECK_THROWS_AS(load(Json{{"annotators", {{{"name", "snr"}, {"impl", "stub"}}}}}), Error);
  CHECK_THROWS_AS(load(Json{{"annotators", {{{"name", "asr"}, {"impl", "subprocess"}}}}}), Error);
  CHECK_THROWS_AS(load(Json{{"annotators", {{{"name", "asr"}, {"batch_size", 0}}}}}), Error);
  CHECK_THROWS_AS(load(Json{{"annotators", Json::array()}, {"anchors", "missing.jsonl"}}), Error);
  CHECK_THROWS_AS(load(Json{{"annotators", Json::array()}, {"snr_table", {{"path", "missing.json"}}}}), Error);
  CHECK_THROWS_AS(load(Json{{"annotators", Json::array()}, {"link_threshold", 1.5}}), Error);
  CHECK_THROWS_AS(load(Json{{"annotators", Json::array()}, {"segmenter", {{"extension_s", 0.4}}}}), Error);
  CHECK_THROWS_AS(load(Json{{"seed", 1}}), Error);
  const PipelineConfig c = load(Json{{"seed", 5}, {"annotators", {{{"name", "asr"}}, {{"name", "snr"}}}}});
  CHECK(c.annotators[0].seed != c.annotators[1].seed);
  CHECK(c.annotators[1].impl == "wada");
  CHECK(c.output == dir / "manifest.jsonl");
}
