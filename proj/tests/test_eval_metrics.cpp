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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "podcurate/error.hpp"
#include "podcurate/eval_metrics.hpp"
#include "oracles.hpp"

using namespace podcurate;
using namespace podcurate::testing;
using doctest::Approx;

namespace {

struct RocPoint {
  double far, frr;
};

std::vector<RocPoint> roc_points(const std::vector<TrialScore>& s) {
  std::set<double> thresholds;
  double ng = 0, ni = 0;
  for (const auto& t : s) {
    thresholds.insert(t.score);
    (t.kind == TrialKind::kGenuine ? ng : ni) += 1;
  }
  std::vector<RocPoint> out;
  for (double th : thresholds) {
    double fa = 0, fr = 0;
    for (const auto& t : s) {
      if (t.kind == TrialKind::kImpostor && t.score >= th) ++fa;
      if (t.kind == TrialKind::kGenuine && t.score < th) ++fr;
    }
    out.push_back({fa / ni, fr / ng});
  }
  out.push_back({0.0, 1.0});
  return out;
}

// The hull's diagonal crossing is the lowest crossing of any chord between
// two operating points that straddle the diagonal.
double chord_eer(const std::vector<TrialScore>& s) {
  const auto pts = roc_points(s);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    for (const auto& q : pts) {
      const double dp = p.far - p.frr, dq = q.far - q.frr;
      if (dp == 0.0) best = std::min(best, p.far);
      if (dp > 0.0 && dq < 0.0) {
        const double w = dp / (dp - dq);
        best = std::min(best, p.far + w * (q.far - p.far));
      }
    }
  }
  return best;
}

std::vector<TrialScore> trials(std::initializer_list<double> genuine, std::initializer_list<double> impostor) {
  std::vector<TrialScore> out;
  for (double g : genuine) out.push_back({TrialKind::kGenuine, g});
  for (double i : impostor) out.push_back({TrialKind::kImpostor, i});
  return out;
}

}  // namespace

TEST_CASE("edit operation examples") {
  const auto same = edit_ops(split("a b c"), split("a b c"));
  CHECK(same.errors() == 0);
  CHECK(same.rate() == 0.0);
  const auto sub = edit_ops(split("a b c"), split("a x c"));
  CHECK(sub.substitutions == 1);
  CHECK(sub.rate() == Approx(1.0 / 3.0));
  const auto del = edit_ops(split("the cat sat"), split("cat sat"));
  CHECK(del.deletions == 1);
  CHECK(del.errors() == 1);
  CHECK(del.rate() == Approx(1.0 / 3.0));
  CHECK_THROWS_WITH_AS(edit_ops(Tokens{}, split("a")), doctest::Contains("undefined rate"), Error);
}

TEST_CASE("tie-break prefers substitution") {
  const auto ops = edit_ops(split("a"), split("b"));
  CHECK(ops.substitutions == 1);
  CHECK(ops.deletions == 0);
  CHECK(ops.insertions == 0);
}

TEST_CASE("edit distance matches exhaustive recursion") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 3000; ++i) {
    Tokens r = random_tokens(rng, 6);
    if (r.empty()) r.push_back("a");
    const Tokens h = random_tokens(rng, 6);
    const EditOps ops = edit_ops(r, h);
    CHECK(ops.errors() == brute_distance(r, 0, h, 0));
    CHECK(ops.reference_length == r.size());
    CHECK(ops.substitutions + ops.deletions <= r.size());
    CHECK(static_cast<long>(ops.deletions) - static_cast<long>(ops.insertions) ==
          static_cast<long>(r.size()) - static_cast<long>(h.size()));
  }
}

TEST_CASE("wer and cer examples") {
  CHECK(wer("Hello, World!", "hello world") == 0.0);
  CHECK(cer("Hello, World!", "hello   world") == 0.0);
  CHECK(wer("hello world", "hello word") == Approx(0.5));
  CHECK(cer("hello world", "hello word") == Approx(0.1));
  CHECK(wer("one two three four", "") == 1.0);
  CHECK_THROWS_AS(wer("?!", "a"), Error);
  CHECK_THROWS_AS(cer("", "a"), Error);
}

TEST_CASE("cer can count spaces when asked") {
  TextNormalization keep;
  keep.cer_exclude_spaces = false;
  // "hello world" is 11 characters with the space.
  CHECK(cer("hello world", "hello word", keep) == Approx(1.0 / 11.0));
}

TEST_CASE("wer properties") {
  CHECK(wer("a b c", "a b c") == 0.0);
  CHECK(wer("a b", "a b a b") == Approx(1.0));
  CHECK(wer("a b", "x y z w") > 1.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    Tokens r = random_tokens(rng, 5), h = random_tokens(rng, 5);
    if (r.empty()) continue;
    std::string rs, hs;
    for (auto& w : r) rs += w + " ";
    for (auto& w : h) hs += w + " ";
    CHECK(wer(rs, hs) >= 0.0);
    CHECK(wer(rs, rs) == 0.0);
  }
}

TEST_CASE("corpus rates sum edits over references") {
  const std::vector<std::string> refs = {"a b", "c d e f"};
  const std::vector<std::string> hyps = {"a x", "c d e f"};
  const auto ops = corpus_word_ops(refs, hyps);
  CHECK(ops.errors() == 1);
  CHECK(ops.reference_length == 6);
  CHECK_THROWS_AS(corpus_word_ops(refs, std::vector<std::string>{"a"}), Error);
}

TEST_CASE("perfectly separable trials") {
  const auto r = eer_threshold(trials({0.9, 0.8}, {0.1, 0.2}));
  CHECK(r.eer == 0.0);
  CHECK(r.threshold > 0.2);
  CHECK(r.threshold <= 0.8);
}

TEST_CASE("four-score crossing example") {
  const auto s = trials({0.6, 0.4}, {0.5, 0.3});
  const auto r = eer_threshold(s);
  CHECK(r.eer == Approx(0.25));
  CHECK(chord_eer(s) == Approx(0.25));
  CHECK(std::abs(r.far - r.frr) < 1e-9);
}

TEST_CASE("identical distributions sit at chance") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> d(0.2, 0.3);
  std::vector<TrialScore> s;
  for (int i = 0; i < 20000; ++i) s.push_back({i % 2 ? TrialKind::kGenuine : TrialKind::kImpostor, d(rng)});
  CHECK(eer_threshold(s).eer == Approx(0.5).epsilon(0.03));
}

TEST_CASE("eer matches the chord oracle on random trial sets") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 500; ++i) {
    std::vector<TrialScore> s;
    const int ng = 1 + static_cast<int>(rng() % 6), ni = 1 + static_cast<int>(rng() % 6);
    std::uniform_int_distribution<int> tick(-10, 10);
    for (int k = 0; k < ng; ++k) s.push_back({TrialKind::kGenuine, tick(rng) / 10.0 + 0.2});
    for (int k = 0; k < ni; ++k) s.push_back({TrialKind::kImpostor, tick(rng) / 10.0});
    const auto r = eer_threshold(s);
    CHECK(r.eer == Approx(chord_eer(s)).epsilon(1e-9));
    CHECK(std::abs(r.far - r.frr) < 1e-9);
    CHECK(r.eer >= 0.0);
    CHECK(r.eer <= 1.0);
  }
}

TEST_CASE("eer needs both classes") {
  CHECK_THROWS_AS(eer_threshold(trials({0.5}, {})), Error);
  CHECK_THROWS_AS(eer_threshold(trials({}, {0.5})), Error);
}

TEST_CASE("acceptance examples") {
  const std::vector<double> hi = {0.7, 0.8, 0.9};
  CHECK(sv_acceptance(hi, 0.5) == 1.0);
  const std::vector<double> mixed = {0.9, 0.1};
  CHECK(sv_acceptance(mixed, 0.5) == 0.5);
  CHECK(sv_acceptance(mixed, 0.95) == 0.0);
  CHECK(sv_acceptance(mixed, 0.9) == 0.5);  // inclusive
  CHECK_THROWS_AS(sv_acceptance(std::vector<double>{}, 0.5), Error);
}

TEST_CASE("acceptance never rises with the threshold") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> sims(300);
  for (auto& v : sims) v = u(rng);
  double prev = 2.0;
  for (double t = -1.1; t <= 1.1; t += 0.01) {
    const double a = sv_acceptance(sims, t);
    CHECK(a <= prev);
    prev = a;
  }
}
