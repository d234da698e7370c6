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

#include <cmath>
#include <random>

#include "podcurate/error.hpp"
#include "oracles.hpp"
#include "podcurate/segmenter.hpp"

using namespace podcurate;
using namespace podcurate::testing;
using doctest::Approx;

namespace {

void check_span(const SegmentProposal& p, double start, double end) {
  CHECK(p.start_s == Approx(start).epsilon(1e-12));
  CHECK(p.end_s == Approx(end).epsilon(1e-12));
}

}  // namespace

TEST_CASE("gap above the threshold extends both neighbours") {
  const auto out = adjust_boundaries(Props{{0.0, 4.0, {}}, {4.6, 8.0, {}}}, 8.0);
  REQUIRE(out.size() == 2);
  check_span(out[0], 0.0, 4.25);
  check_span(out[1], 4.35, 8.0);
}

TEST_CASE("gap at or below the threshold merges") {
  const auto out = adjust_boundaries(Props{{0.0, 4.0, "a"}, {4.3, 8.0, "b"}}, 8.0);
  REQUIRE(out.size() == 1);
  check_span(out[0], 0.0, 8.0);
  CHECK(out[0].text == "a b");

  // A gap of exactly the threshold merges as well.
  const auto tie = adjust_boundaries(Props{{0.0, 4.0, {}}, {4.5, 8.0, {}}}, 8.0);
  CHECK(tie.size() == 1);
}

TEST_CASE("single proposal only gets edge extension") {
  const auto out = adjust_boundaries(Props{{1.0, 5.0, {}}}, 10.0);
  REQUIRE(out.size() == 1);
  check_span(out[0], 0.75, 5.25);
}

TEST_CASE("merge over the cap falls back to clamped extension") {
  const auto out = adjust_boundaries(Props{{0.0, 6.0, {}}, {6.3, 12.0, {}}}, 12.0);
  REQUIRE(out.size() == 2);
  check_span(out[0], 0.0, 6.15);
  check_span(out[1], 6.15, 12.0);
}

TEST_CASE("merging cascades while the cap allows") {
  const auto out = adjust_boundaries(
      Props{{0.0, 2.0, "a"}, {2.2, 4.0, "b"}, {4.1, 6.0, {}}, {6.4, 9.0, "d"}, {9.2, 11.0, "e"}}, 20.0);
  REQUIRE(out.size() == 2);
  check_span(out[0], 0.0, 9.1);
  CHECK(out[0].text == "a b d");
  check_span(out[1], 9.1, 11.25);
  CHECK(out[1].text == "e");
}

TEST_CASE("invalid input and config are rejected") {
  CHECK_THROWS_AS(adjust_boundaries(Props{{2.0, 3.0, {}}, {1.0, 1.5, {}}}, 10.0), Error);
  CHECK_THROWS_AS(adjust_boundaries(Props{{0.0, 3.0, {}}, {2.0, 4.0, {}}}, 10.0), Error);
  CHECK_THROWS_AS(adjust_boundaries(Props{{3.0, 3.0, {}}}, 10.0), Error);
  CHECK_THROWS_AS(adjust_boundaries(Props{{0.0, 11.0, {}}}, 10.0), Error);
  SegmenterConfig bad;
  bad.extension_s = 0.3;
  CHECK_THROWS_AS(adjust_boundaries(Props{{0.0, 1.0, {}}}, 10.0, bad), Error);
  bad = {};
  bad.max_merge_duration_s = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK(adjust_boundaries(Props{}, 10.0).empty());
}

TEST_CASE("randomized proposal lists keep every invariant and match the oracle") {
  std::mt19937_64 rng(1234);
  const SegmenterConfig configs[] = {{}, {1.0, 0.5, 6.0, 16000}, {0.2, 0.05, 3.0, 16000}};
  for (int trial = 0; trial < 1000; ++trial) {
    const SegmenterConfig& c = configs[trial % 3];
    double duration = 0.0;
    const Props in = random_proposals(rng, duration);
    const Props out = adjust_boundaries(in, duration, c);
    const Props expect = segmenter_oracle(in, duration, c);
    REQUIRE(out.size() == expect.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i].start_s == Approx(expect[i].start_s).epsilon(1e-9));
      CHECK(out[i].end_s == Approx(expect[i].end_s).epsilon(1e-9));
      CHECK(out[i].text == expect[i].text);
      CHECK(out[i].start_s >= 0.0);
      CHECK(out[i].end_s <= duration);
      CHECK(out[i].start_s < out[i].end_s);
      if (i > 0) CHECK(out[i - 1].end_s <= out[i].start_s);
    }
    // Every original boundary pair ends up merged only across short gaps,
    // and separated pairs with long gaps never touch.
    std::size_t k = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
      while (k < out.size() && out[k].end_s < in[i].end_s - 1e-9) ++k;
      REQUIRE(k < out.size());
      CHECK(out[k].start_s <= in[i].start_s + 1e-9);
      if (i > 0 && out[k].start_s <= in[i - 1].start_s + 1e-9) {
        CHECK(in[i].start_s - in[i - 1].end_s <= c.silence_threshold_s + 1e-9);
      }
    }
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
      const double gap = out[i + 1].start_s - out[i].end_s;
      CHECK(gap >= 0.0);
    }
    // Determinism.
    CHECK(adjust_boundaries(in, duration, c) == out);
  }
}

TEST_CASE("normalize examples") {
  Waveform mono{16000, 1, std::vector<float>(16000, 0.25f)};
  CHECK(normalize_audio(mono) == mono.samples);

  Waveform stereo{48000, 2, std::vector<float>(2 * 48000)};
  for (std::size_t i = 0; i < 48000; ++i) {
    const float v = static_cast<float>(0.5 * std::sin(2.0 * 3.141592653589793 * 440.0 * i / 48000.0));
    stereo.samples[2 * i] = v;
    stereo.samples[2 * i + 1] = v;
  }
  const auto y = normalize_audio(stereo);
  CHECK(std::abs(static_cast<long>(y.size()) - 16000) <= 1);
  float peak = 0.0f;
  for (std::size_t i = 100; i + 100 < y.size(); ++i) peak = std::max(peak, std::abs(y[i]));
  CHECK(peak == Approx(0.5).epsilon(0.01));

  Waveform low{8000, 1, std::vector<float>(8000)};
  CHECK_THROWS_WITH_AS(normalize_audio(low), doctest::Contains("upsampling not supported"), Error);
}

TEST_CASE("slice examples") {
  std::vector<float> x(32000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(i);
  CHECK(slice_audio(x, {0.0, 1.0, {}}, 16000).size() == 16000);
  const auto s = slice_audio(x, {0.5, 0.75, {}}, 16000);
  CHECK(s.size() == 4000);
  CHECK(s.front() == 8000.0f);
  CHECK_THROWS_AS(slice_audio(x, {1.0, 2.5, {}}, 16000), Error);
}
