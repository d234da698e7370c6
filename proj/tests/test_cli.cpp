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

#include "podcurate/fixture.hpp"
#include "podcurate/manifest.hpp"
#include "podcurate/subprocess.hpp"
#include "test_support.hpp"

using namespace podcurate;
using namespace podcurate::testing;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

CliResult cli(const TempDir& dir, std::initializer_list<std::string> args) {
  std::string cmd = shell_quote(PODCURATE_CLI_PATH);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  const fs::path err = dir / "stderr.txt";
  cmd += " 2>" + shell_quote(err.string());
  const ProcessResult p = run_process({"/bin/sh", "-c", cmd}, "");
  return {p.signaled ? -1 : p.exit_code, p.output, slurp(err)};
}

// One fixture run shared by the read-only command tests.
struct Shared {
  TempDir dir{"cli"};
  CliResult run;
  Shared() {
    write_fixture(dir.path());
    run = cli(dir, {"run", "--config", (dir / "config.json").string(), "--audio-dir", (dir / "audio").string()});
  }
};

Shared& shared() {
  static Shared s;
  return s;
}

}  // namespace

TEST_CASE("run on the fixture exits 0 and reports to stdout") {
  const auto& s = shared();
  CHECK(s.run.code == 0);
  const Json report = Json::parse(s.run.out);
  CHECK(report["complete"] == true);
  CHECK(report["sources_segmented"] == 1);
  CHECK(s.run.err.find("wrote") != std::string::npos);
  const Manifest m = read_manifest(s.dir / "manifest.jsonl");
  CHECK_FALSE(m.records.empty());
}

TEST_CASE("run with an unreadable file exits 2 and names it") {
  TempDir dir("cli");
  write_fixture(dir.path());
  spit(dir / "audio" / "corrupt.wav", "not a wave file");
  const auto r = cli(dir, {"run", "--config", (dir / "config.json").string(), "--audio-dir",
                           (dir / "audio").string(), "--report", (dir / "report.json").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("corrupt.wav") != std::string::npos);
  const Json report = Json::parse(slurp(dir / "report.json"));
  CHECK(report["skipped_sources"].size() == 1);
}

TEST_CASE("run with a crashing subprocess adapter exits 2") {
  TempDir dir("cli");
  write_fixture(dir.path());
  Json config = Json::parse(slurp(dir / "config.json"));
  for (auto& a : config["annotators"]) {
    if (a["name"] == "snr") {
      a = {{"name", "snr"}, {"impl", "subprocess"}, {"batch_size", 3},
           {"command", {PODCURATE_FAKE_ADAPTER_PATH, "--snr-from-start", "--crash-on", "fixture_00004"}}};
    }
  }
  spit(dir / "config.json", config.dump());
  const auto r = cli(dir, {"run", "--config", (dir / "config.json").string(), "--audio-dir", (dir / "audio").string()});
  CHECK(r.code == 2);
  const Manifest m = read_manifest(dir / "manifest.jsonl");
  std::size_t failed = 0;
  for (const auto& rec : m.records) failed += rec.annotation_status.at("snr") == AnnotationStatus::kFailed;
  CHECK(failed == 3);
}

TEST_CASE("missing config exits 1 with usage") {
  TempDir dir("cli");
  const auto r = cli(dir, {"run", "--config", (dir / "nope.json").string(), "--audio-dir", dir.path().string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(cli(dir, {}).code == 1);
  CHECK(cli(dir, {"frobnicate"}).code == 1);
  CHECK(cli(dir, {"filter", "--manifest", "x"}).code == 1);
}

TEST_CASE("filter writes a subset and counts on stderr") {
  const auto& s = shared();
  const auto r = cli(s.dir, {"filter", "--manifest", (s.dir / "manifest.jsonl").string(), "--query",
                             "emotion_category == 'neutral'", "--out", (s.dir / "neutral.jsonl").string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(r.err.find("records selected") != std::string::npos);
  const Manifest sub = read_manifest(s.dir / "neutral.jsonl");
  CHECK_FALSE(sub.records.empty());
  for (const auto& rec : sub.records) CHECK(*rec.emotion_category == EmotionCategory::kNeutral);
  CHECK(sub.run_metadata["filter"] == "emotion_category == 'neutral'");

  const auto none = cli(s.dir, {"filter", "--manifest", (s.dir / "manifest.jsonl").string(), "--query", "snr_db > 1000"});
  CHECK(none.code == 0);
  CHECK(parse_manifest(none.out).records.empty());
  CHECK(none.err.find("0 of") != std::string::npos);

  const auto bad = cli(s.dir, {"filter", "--manifest", (s.dir / "manifest.jsonl").string(), "--query", "snr_db >"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("byte") != std::string::npos);
}

TEST_CASE("stats commands") {
  const auto& s = shared();
  const std::string m = (s.dir / "manifest.jsonl").string();
  const auto csv = cli(s.dir, {"stats", "--manifest", m, "--field", "snr_db", "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("bin_lo,bin_hi,count", 0) == 0);
  const auto json = cli(s.dir, {"stats", "--manifest", m, "--field", "arousal", "--bins", "1:7:1"});
  CHECK(json.code == 0);
  CHECK(Json::parse(json.out)["histograms"][0]["bin_edges"].size() == 7);
  const auto cats = cli(s.dir, {"stats", "--manifest", m, "--field", "emotion_category"});
  CHECK(cats.code == 0);
  CHECK(Json::parse(cats.out).dump().find("neutral") != std::string::npos);
  const auto summary = cli(s.dir, {"stats", "summary", "--manifest", m});
  CHECK(summary.code == 0);
  CHECK(Json::parse(summary.out)["summary"]["global_speaker_count"] == 1);
  const auto svg = cli(s.dir, {"stats", "report", "--manifest", m, "--format", "svg", "--out", (s.dir / "r.svg").string()});
  CHECK(svg.code == 0);
  CHECK(slurp(s.dir / "r.svg").rfind("<svg", 0) == 0);
  CHECK(cli(s.dir, {"stats", "--manifest", m, "--field", "snr_db", "--format", "pdf"}).code == 1);
  CHECK(cli(s.dir, {"stats", "--manifest", m, "--field", "transcript"}).code == 1);
}

TEST_CASE("snr prints one number") {
  const auto& s = shared();
  const auto r = cli(s.dir, {"snr", (s.dir / "audio" / "fixture.wav").string(), "--table",
                             (s.dir / "snr_table.json").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find('\n') == r.out.size() - 1);
  const double v = std::stod(r.out);
  CHECK(v >= -20.0);
  CHECK(v <= 100.0);
}

TEST_CASE("eval commands") {
  TempDir dir("cli");
  spit(dir / "ref.txt", "hello world\nthe cat sat\n");
  spit(dir / "hyp.txt", "hello world\nthe cat sat\n");
  spit(dir / "hyp2.txt", "hello word\ncat sat\n");
  const auto same = cli(dir, {"eval", "wer", "--ref", (dir / "ref.txt").string(), "--hyp", (dir / "hyp.txt").string()});
  CHECK(same.code == 0);
  CHECK(same.out == "0.0\n");
  const auto diff = cli(dir, {"eval", "wer", "--ref", (dir / "ref.txt").string(), "--hyp", (dir / "hyp2.txt").string()});
  CHECK(std::stod(diff.out) == doctest::Approx(2.0 / 5.0));
  const auto cer = cli(dir, {"eval", "cer", "--ref", (dir / "ref.txt").string(), "--hyp", (dir / "hyp.txt").string()});
  CHECK(cer.out == "0.0\n");
  spit(dir / "short.txt", "one line\n");
  CHECK(cli(dir, {"eval", "wer", "--ref", (dir / "ref.txt").string(), "--hyp", (dir / "short.txt").string()}).code == 1);

  spit(dir / "trials.tsv", "genuine 0.6\ngenuine 0.4\nimpostor 0.5\nimpostor 0.3\n");
  const auto cal = cli(dir, {"eval", "sv", "--trials", (dir / "trials.tsv").string(), "--calibrate"});
  CHECK(cal.code == 0);
  const Json j = Json::parse(cal.out);
  CHECK(j["eer"].get<double>() == doctest::Approx(0.25));
  spit(dir / "sims.txt", "0.9\n0.1\n");
  const auto acc = cli(dir, {"eval", "sv", "--trials", (dir / "sims.txt").string(), "--threshold", "0.5"});
  CHECK(std::stod(acc.out) == doctest::Approx(0.5));
  CHECK(cli(dir, {"eval", "sv", "--trials", (dir / "sims.txt").string()}).code == 1);
}

TEST_CASE("snr-table and make-fixture write their outputs") {
  TempDir dir("cli");
  const auto t = cli(dir, {"snr-table", "--out", (dir / "t.json").string(), "--grid-min", "0", "--grid-max", "20",
                           "--grid-step", "10", "--trials", "2", "--samples", "4000"});
  CHECK(t.code == 0);
  CHECK(Json::parse(slurp(dir / "t.json"))["snr_grid_db"].size() == 3);
  const auto f = cli(dir, {"make-fixture", "--out", (dir / "fx").string()});
  CHECK(f.code == 0);
  CHECK(fs::exists(dir / "fx" / "audio" / "fixture.wav"));
  CHECK(fs::exists(dir / "fx" / "config.json"));
}
