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

// Acceptance harness: one PASS/FAIL line per criterion, non-zero exit when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>

#include <boost/math/special_functions/digamma.hpp>

#include "oracles.hpp"
#include "podcurate/eval_metrics.hpp"
#include "podcurate/fixture.hpp"
#include "podcurate/manifest.hpp"
#include "podcurate/query.hpp"
#include "podcurate/segmenter.hpp"
#include "podcurate/snr_wada.hpp"
#include "podcurate/speaker_linker.hpp"
#include "podcurate/subprocess.hpp"
#include "test_support.hpp"

using namespace podcurate;
using namespace podcurate::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects failed checks for one criterion.
class Outcome {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool passed() const { return failed_ == 0; }
  std::string detail() const {
    std::string out;
    for (const auto& n : notes_) out += (out.empty() ? "" : "; ") + n;
    for (const auto& f : failures_) out += (out.empty() ? "" : "; ") + std::string("failed: ") + f;
    if (failed_ > failures_.size()) out += "; " + std::to_string(failed_ - failures_.size()) + " more";
    return out;
  }

 private:
  std::vector<std::string> failures_, notes_;
  std::size_t failed_ = 0;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// Runs the CLI with stderr sent to `log` so the harness output stays one
// line per criterion.
ProcessResult run_cli(const std::vector<std::string>& args, const fs::path& log) {
  auto quote = [](const std::string& a) {
    std::string q = "'";
    for (char ch : a) q += ch == '\'' ? std::string("'\\''") : std::string(1, ch);
    return q + "'";
  };
  std::string cmd = quote(PODCURATE_CLI_PATH);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>" + quote(log.string());
  return run_process({"/bin/sh", "-c", cmd}, "");
}

const SnrTable& default_table() {
  static const SnrTable t = build_snr_table(SnrTableConfig{});
  return t;
}

// 1
void wada_accuracy(Outcome& o) {
  const SnrTable& table = default_table();
  double slowest = 0.0;
  for (double snr : {0.0, 5.0, 10.0, 20.0}) {
    std::vector<double> est;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto x = mixture(160000, snr, 5000 + seed * 31 + static_cast<std::uint64_t>(snr));
      const auto t0 = Clock::now();
      est.push_back(estimate_snr(x, table));
      slowest = std::max(slowest, seconds_since(t0));
    }
    std::nth_element(est.begin(), est.begin() + 10, est.end());
    const double median = est[10];
    o.note(fmt(snr, 3) + " dB -> median " + fmt(median));
    o.check(std::abs(median - snr) <= 2.0, "median at " + fmt(snr) + " dB");
  }
  o.note("slowest estimate " + fmt(slowest, 3) + " s");
  o.check(slowest < 1.0, "estimate under 1 s");
}

// 2
void wada_scale(Outcome& o) {
  const SnrTable& table = default_table();
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto x = mixture(16000 + rng() % 64000, grid_value(rng, -10, 60, 1), rng());
    const double base = estimate_snr(x, table);
    for (double c : {0.1, 3.0, 100.0}) {
      std::vector<double> y(x);
      for (auto& v : y) v *= c;
      worst = std::max(worst, std::abs(estimate_snr(y, table) - base));
    }
  }
  o.note("max deviation " + fmt(worst) + " dB");
  o.check(worst < 1e-6, "scale invariance");
}

// 3
void analytic_statistic(Outcome& o) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::vector<double> x(1000000);
  for (auto& v : x) v = nd(rng);
  const double g_noise = gain_invariant_statistic(x);
  const double half_normal =
      std::log(std::sqrt(2.0 / std::numbers::pi)) - (boost::math::digamma(0.5) + std::log(2.0)) / 2.0;
  std::gamma_distribution<double> gd(0.4, 1.0);
  for (auto& v : x) v = gd(rng);
  const double g_gamma = gain_invariant_statistic(x);
  const double gamma_ref = std::log(0.4) - boost::math::digamma(0.4);
  o.note("gaussian G " + fmt(g_noise) + " vs " + fmt(half_normal));
  o.note("gamma G " + fmt(g_gamma) + " vs " + fmt(gamma_ref));
  o.check(std::abs(half_normal - 0.4094) < 1e-4, "closed form");
  o.check(std::abs(g_noise - 0.4094) <= 0.01, "gaussian");
  o.check(std::abs(g_gamma - gamma_ref) <= 0.01, "gamma");
}

// 4
void edit_distance(Outcome& o) {
  std::mt19937_64 rng(4);
  const auto t0 = Clock::now();
  for (int i = 0; i < 200; ++i) {
    Tokens r = random_tokens(rng, 6);
    if (r.empty()) r.push_back("a");
    const Tokens h = random_tokens(rng, 6);
    o.check(edit_ops(r, h).errors() == brute_distance(r, 0, h, 0), "pair " + std::to_string(i));
  }
  const double t = seconds_since(t0);
  o.note("200 pairs in " + fmt(t, 3) + " s");
  o.check(t < 5.0, "runtime");
}

// 5
void eer_kernel(Outcome& o) {
  const std::vector<TrialScore> sep = {{TrialKind::kGenuine, 0.9}, {TrialKind::kGenuine, 0.8},
                                       {TrialKind::kImpostor, 0.1}, {TrialKind::kImpostor, 0.2}};
  const EerResult a = eer_threshold(sep);
  o.check(a.eer == 0.0, "separable eer");
  o.check(std::abs(a.far - a.frr) < 1e-9, "separable crossing");

  std::mt19937_64 rng(5);
  std::normal_distribution<double> d(0.3, 0.2);
  std::vector<TrialScore> same;
  for (int i = 0; i < 10000; ++i) same.push_back({TrialKind::kGenuine, d(rng)});
  for (int i = 0; i < 10000; ++i) same.push_back({TrialKind::kImpostor, d(rng)});
  const EerResult b = eer_threshold(same);
  o.note("chance eer " + fmt(b.eer));
  o.check(std::abs(b.eer - 0.5) <= 0.02, "chance eer");
  o.check(std::abs(b.far - b.frr) < 1e-9, "chance crossing");

  const std::vector<TrialScore> four = {{TrialKind::kGenuine, 0.6}, {TrialKind::kGenuine, 0.4},
                                        {TrialKind::kImpostor, 0.5}, {TrialKind::kImpostor, 0.3}};
  const EerResult c = eer_threshold(four);
  o.check(std::abs(c.far - c.frr) < 1e-9, "four-score crossing");
}

// 6
void segmenter_properties(Outcome& o) {
  auto exact = [&](const std::vector<SegmentProposal>& out, std::vector<std::pair<double, double>> want,
                   const std::string& name) {
    bool ok = out.size() == want.size();
    for (std::size_t i = 0; ok && i < out.size(); ++i) {
      ok = out[i].start_s == want[i].first && out[i].end_s == want[i].second;
    }
    o.check(ok, name);
  };
  exact(adjust_boundaries(Props{{0.0, 4.0, {}}, {4.6, 8.0, {}}}, 8.0), {{0.0, 4.25}, {4.35, 8.0}}, "extend example");
  exact(adjust_boundaries(Props{{0.0, 4.0, {}}, {4.3, 8.0, {}}}, 8.0), {{0.0, 8.0}}, "merge example");
  exact(adjust_boundaries(Props{{1.0, 5.0, {}}}, 10.0), {{0.75, 5.25}}, "edge example");
  exact(adjust_boundaries(Props{{0.0, 6.0, {}}, {6.3, 12.0, {}}}, 12.0), {{0.0, 6.15}, {6.15, 12.0}}, "cap example");

  std::mt19937_64 rng(6);
  const SegmenterConfig c;
  for (int trial = 0; trial < 1000; ++trial) {
    double duration = 0.0;
    const Props in = random_proposals(rng, duration);
    const Props out = adjust_boundaries(in, duration, c);
    const std::string id = "list " + std::to_string(trial);
    for (std::size_t i = 0; i < out.size(); ++i) {
      o.check(out[i].start_s >= 0.0 && out[i].end_s <= duration, id + " in bounds");
      o.check(out[i].start_s < out[i].end_s, id + " non-empty");
      if (i > 0) o.check(out[i - 1].end_s <= out[i].start_s, id + " sorted, non-overlapping");
    }
    // Map each input to its output segment and check the rule applied at
    // every input gap.
    std::vector<std::size_t> owner(in.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
      while (k < out.size() && out[k].end_s < in[i].end_s - 1e-9) ++k;
      owner[i] = k;
    }
    for (std::size_t i = 1; i < in.size(); ++i) {
      const double g = in[i].start_s - in[i - 1].end_s;
      if (owner[i] == owner[i - 1]) {
        o.check(g <= c.silence_threshold_s + 1e-12, id + " merge gap");
      } else {
        const double ext = std::min(c.extension_s, g / 2.0);
        o.check(std::abs(out[owner[i - 1]].end_s - (in[i - 1].end_s + ext)) < 1e-12, id + " left extension");
        o.check(std::abs(out[owner[i]].start_s - (in[i].start_s - ext)) < 1e-12, id + " right extension");
      }
    }
  }
}

// 7
void query_engine(Outcome& o) {
  std::mt19937_64 rng(7);
  const Manifest m = random_manifest(rng, 1000, false);
  for (int i = 0; i < 100; ++i) {
    const FilterExpr e = random_expr(rng, 3);
    const Manifest out = select(m, e);
    std::vector<SegmentRecord> expect;
    for (const auto& r : m.records) {
      if (naive_match(e, r)) expect.push_back(r);
    }
    o.check(out.records == expect, "oracle " + print_filter(e));
  }
  for (int i = 0; i < 500; ++i) {
    const FilterExpr e = random_expr(rng, 4);
    o.check(parse_filter(print_filter(e)) == e, "round trip " + print_filter(e));
  }

  TempDir dir("accept_query");
  write_fixture(dir.path());
  const std::string manifest = (dir / "manifest.jsonl").string();
  const auto run = run_cli({"run", "--config", (dir / "config.json").string(), "--audio-dir",
                            (dir / "audio").string(), "--out", manifest},
                           dir / "run.log");
  o.check(run.exit_code == 0, "fixture run");
  const Manifest fx = read_manifest(manifest);

  auto truth = [&](const std::function<bool(const FixtureUtterance&)>& pred) {
    std::set<std::string> ids;
    for (const auto& r : fx.records) {
      const auto u = fixture_utterance_at((r.start_s + r.end_s) / 2.0);
      if (u && pred(fixture_layout()[*u])) ids.insert(r.segment_id);
    }
    return ids;
  };
  auto selected = [&](const std::string& q) {
    std::set<std::string> ids;
    for (const auto& r : select(fx, parse_filter(q)).records) ids.insert(r.segment_id);
    return ids;
  };

  const std::string neutral_q = "emotion_category == 'neutral' and is_speech == true";
  const auto neutral = selected(neutral_q);
  o.check(neutral == truth([](const FixtureUtterance& u) { return u.kind == "speech" && u.emotion == "neutral"; }),
          "neutral subset");
  std::set<std::string> speakers;
  for (const auto& id : neutral) speakers.insert(*fx.find_record(id)->global_speaker);
  o.check(speakers.size() >= 2, "neutral subset spans several speakers");
  o.note("neutral " + std::to_string(neutral.size()) + " records, " + std::to_string(speakers.size()) + " speakers");

  const std::string low_q = "is_speech == true and snr_db >= 0 and snr_db <= 20";
  const auto low = selected(low_q);
  o.check(low == truth([](const FixtureUtterance& u) { return u.kind == "speech" && u.low_snr; }), "low-snr subset");
  o.note("low snr " + std::to_string(low.size()) + " records");
  for (const auto& [q, lo, hi] : {std::tuple{low_q, 0.0, 20.0}, std::tuple{std::string("snr_db >= 80 and snr_db <= 100"), 80.0, 100.0}}) {
    for (const auto& r : select(fx, parse_filter(q)).records) {
      o.check(r.snr_db && *r.snr_db >= lo && *r.snr_db <= hi, "band " + q);
    }
  }
}

// 8
void end_to_end(Outcome& o) {
  TempDir dir("accept_e2e");
  write_fixture(dir.path());
  std::vector<std::string> bytes;
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    const fs::path out = dir / ("manifest_" + std::to_string(i) + ".jsonl");
    const auto t0 = Clock::now();
    const auto r = run_cli({"run", "--config", (dir / "config.json").string(), "--audio-dir",
                            (dir / "audio").string(), "--out", out.string()},
                           dir / "run.log");
    total += seconds_since(t0);
    o.check(!r.signaled && r.exit_code == 0, "run " + std::to_string(i) + " exit 0");
    bytes.push_back(slurp(out));
  }
  o.check(bytes[0] == bytes[1] && bytes[1] == bytes[2], "byte-identical manifests");
  const Manifest m = parse_manifest(bytes[0]);
  o.check(!m.records.empty(), "records present");
  for (const auto& r : m.records) {
    const bool all = r.transcript && r.is_speech && r.local_speaker && r.global_speaker && r.gender && r.age_years &&
                     r.emotion_category && r.arousal && r.dominance && r.valence && r.snr_db && r.sound_events;
    o.check(all, r.segment_id + " fields populated");
    bool done = !r.annotation_status.empty();
    for (const auto& [_, s] : r.annotation_status) done &= s == AnnotationStatus::kDone;
    o.check(done, r.segment_id + " all done");
  }
  o.note(std::to_string(m.records.size()) + " records, 3 runs in " + fmt(total, 3) + " s");
  o.check(total < 30.0, "runtime");
}

// 9
void speaker_linker(Outcome& o) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  const std::size_t d = 16;
  std::vector<Embedding> protos(4, Embedding(d));
  for (auto& p : protos) p = normalized([&] { Embedding e(d); for (auto& v : e) v = g(rng); return e; }());
  const std::vector<std::string> names = {"spk_A", "spk_B", "spk_C", ""};  // speaker 3 never anchored
  // file -> speakers present (local id = position).
  const std::vector<std::vector<int>> files = {{0, 1}, {1, 2}, {0, 3}, {2, 0, 1}, {3}};
  std::vector<LocalCluster> clusters;
  std::map<SpeakerKey, std::string> expect;
  std::vector<AnchorLabel> anchors;
  std::set<int> anchored;
  for (std::size_t f = 0; f < files.size(); ++f) {
    const std::string src = "file" + std::to_string(f);
    for (std::size_t l = 0; l < files[f].size(); ++l) {
      const int spk = files[f][l];
      Embedding e = protos[static_cast<std::size_t>(spk)];
      for (auto& v : e) v += 0.03 * g(rng);
      const std::string seg = src + "_seg" + std::to_string(l);
      clusters.push_back({src, static_cast<std::int64_t>(l), {seg}, normalized(e)});
      expect[{src, static_cast<std::int64_t>(l)}] =
          spk == 3 ? unlinked_speaker_label(src, static_cast<std::int64_t>(l)) : names[static_cast<std::size_t>(spk)];
    }
  }
  // One anchor in each of the first three files, one per named speaker.
  anchors = {{"file0", "file0_seg0", "spk_A"}, {"file1", "file1_seg0", "spk_B"}, {"file3", "file3_seg0", "spk_C"}};
  const auto base = assign_global_speakers(clusters, anchors, 0.7);
  o.check(base == expect, "planted assignment");
  for (const auto& a : anchors) {
    bool ok = false;
    for (const auto& c : clusters) {
      if (c.source_id == a.source_id && c.segment_ids[0] == a.segment_id) ok = base.at({c.source_id, c.local_id}) == a.global_speaker;
    }
    o.check(ok, "anchor " + a.segment_id);
  }
  for (int t = 0; t < 20; ++t) {
    const auto q = random_orthonormal(rng, d);
    auto rotated = clusters;
    for (auto& c : rotated) c.centroid = rotate(q, c.centroid);
    o.check(assign_global_speakers(rotated, anchors, 0.7) == base, "rotation");
    auto shuffled = clusters;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    o.check(assign_global_speakers(shuffled, anchors, 0.7) == base, "permutation");
  }
}

// 10
void manifest_round_trip(Outcome& o) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 1000; ++i) {
    const Manifest m = random_manifest(rng, rng() % 20, true);
    const Manifest back = parse_manifest(serialize_manifest(m));
    o.check(back == m, "manifest " + std::to_string(i));
  }
  Manifest m;
  m.sources = {plain_source("s")};
  m.records = {plain_record("s", 0, 0.0, 2.0), plain_record("s", 1, 2.0, 5.0), plain_record("s", 2, 5.0, 10.0)};
  const CorpusSummary s = corpus_summary(m);
  o.check(s.utterance_count == 3, "count");
  o.check(s.total_hours == 10.0 / 3600.0, "total");
  o.check(s.mean_duration_s == 10.0 / 3.0, "mean");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"1 wada accuracy", wada_accuracy},
      {"2 wada scale invariance", wada_scale},
      {"3 analytic statistic", analytic_statistic},
      {"4 edit distance oracle", edit_distance},
      {"5 eer kernel", eer_kernel},
      {"6 segmenter properties", segmenter_properties},
      {"7 query engine", query_engine},
      {"8 end-to-end determinism", end_to_end},
      {"9 speaker linker", speaker_linker},
      {"10 manifest round trip", manifest_round_trip},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    if (!o.passed()) ++failed;
    std::cout << (o.passed() ? "PASS " : "FAIL ") << name << " (" << o.detail() << ")" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
