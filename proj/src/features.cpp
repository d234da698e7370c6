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

#include "podcurate/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace podcurate {

namespace {

constexpr double kEnvelopeHop = 0.005;

// Parabolic refinement of a peak at index k of f.
double refine_peak(std::span<const double> f, std::size_t k) {
  if (k == 0 || k + 1 >= f.size()) return static_cast<double>(k);
  const double a = f[k - 1], b = f[k], c = f[k + 1];
  const double denom = a - 2.0 * b + c;
  if (denom >= 0.0) return static_cast<double>(k);
  return static_cast<double>(k) + 0.5 * (a - c) / denom;
}

// Smallest-lag local maximum in [lo, hi] reaching both `min_value` and
// `rel` times the best value in range.
std::optional<std::size_t> first_strong_peak(std::span<const double> r, std::size_t lo,
                                             std::size_t hi, double min_value, double rel) {
  if (lo >= hi || hi >= r.size()) return std::nullopt;
  double best = -1.0;
  for (std::size_t l = lo; l <= hi; ++l) best = std::max(best, r[l]);
  if (best < min_value) return std::nullopt;
  const double floor = std::max(min_value, rel * best);
  for (std::size_t l = lo; l <= hi; ++l) {
    const bool left_ok = l == 0 || r[l] >= r[l - 1];
    const bool right_ok = l + 1 >= r.size() || r[l] >= r[l + 1];
    if (left_ok && right_ok && r[l] >= floor) return l;
  }
  return std::nullopt;
}

}  // namespace

std::vector<double> frame_rms(std::span<const float> x, int rate_hz, double hop_s,
                              double frame_s) {
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(hop_s * rate_hz)));
  const auto frame =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(frame_s * rate_hz)));
  std::vector<double> out;
  if (x.empty()) return out;
  if (x.size() <= frame) {
    double e = 0.0;
    for (float v : x) e += static_cast<double>(v) * v;
    out.push_back(std::sqrt(e / static_cast<double>(x.size())));
    return out;
  }
  for (std::size_t start = 0; start + frame <= x.size(); start += hop) {
    double e = 0.0;
    for (std::size_t i = start; i < start + frame; ++i) e += static_cast<double>(x[i]) * x[i];
    out.push_back(std::sqrt(e / static_cast<double>(frame)));
  }
  return out;
}

std::span<const double> active_span(std::span<const double> rms, double range_db) {
  if (rms.empty()) return rms;
  const double peak = *std::max_element(rms.begin(), rms.end());
  if (!(peak > 0.0)) return rms.subspan(0, 0);
  const double floor = peak * std::pow(10.0, -range_db / 20.0);
  std::size_t first = 0, last = rms.size() - 1;
  while (first < rms.size() && rms[first] < floor) ++first;
  while (last > first && rms[last] < floor) --last;
  return rms.subspan(first, last - first + 1);
}

double envelope_variation(std::span<const float> x, int rate_hz) {
  const auto rms = frame_rms(x, rate_hz, kEnvelopeHop);
  const auto env = active_span(rms);
  if (env.size() < 2) return 0.0;
  const double mean = std::accumulate(env.begin(), env.end(), 0.0) / static_cast<double>(env.size());
  if (!(mean > 0.0)) return 0.0;
  double var = 0.0;
  for (double v : env) var += (v - mean) * (v - mean);
  var /= static_cast<double>(env.size());
  return std::sqrt(var) / mean;
}

std::optional<double> modulation_rate(std::span<const float> x, int rate_hz) {
  const auto rms = frame_rms(x, rate_hz, kEnvelopeHop);
  const auto env = active_span(rms);
  const auto lo = static_cast<std::size_t>(std::floor(0.1 / kEnvelopeHop));
  const auto hi = static_cast<std::size_t>(std::ceil(0.625 / kEnvelopeHop));
  if (env.size() < 2 * hi) return std::nullopt;
  const double mean = std::accumulate(env.begin(), env.end(), 0.0) / static_cast<double>(env.size());
  std::vector<double> d(env.size());
  for (std::size_t i = 0; i < env.size(); ++i) d[i] = env[i] - mean;
  double r0 = 0.0;
  for (double v : d) r0 += v * v;
  if (!(r0 > 0.0)) return std::nullopt;
  std::vector<double> r(hi + 2, 0.0);
  for (std::size_t l = 0; l < r.size(); ++l) {
    double acc = 0.0;
    for (std::size_t i = 0; i + l < d.size(); ++i) acc += d[i] * d[i + l];
    // Unbiased normalization so long lags are not penalized.
    r[l] = acc / r0 * static_cast<double>(d.size()) / static_cast<double>(d.size() - l);
  }
  auto peak = first_strong_peak(r, lo, hi, 0.3, 0.8);
  if (!peak) return std::nullopt;
  return 1.0 / (refine_peak(r, *peak) * kEnvelopeHop);
}

std::optional<double> estimate_f0(std::span<const float> x, int rate_hz) {
  const auto window = static_cast<std::size_t>(0.2 * rate_hz);
  const auto min_lag = static_cast<std::size_t>(std::floor(rate_hz / 400.0));
  const auto max_lag = static_cast<std::size_t>(std::ceil(rate_hz / 60.0));
  if (x.size() < window || window <= max_lag + 2) return std::nullopt;

  // Loudest window, searched on a 50 ms grid.
  const auto step = static_cast<std::size_t>(0.05 * rate_hz);
  std::size_t best_start = 0;
  double best_energy = -1.0;
  for (std::size_t s = 0; s + window <= x.size(); s += step) {
    double e = 0.0;
    for (std::size_t i = s; i < s + window; ++i) e += static_cast<double>(x[i]) * x[i];
    if (e > best_energy) {
      best_energy = e;
      best_start = s;
    }
  }
  if (!(best_energy > 0.0)) return std::nullopt;
  const auto w = x.subspan(best_start, window);

  std::vector<double> r(max_lag + 2, 0.0);
  for (std::size_t l = min_lag > 0 ? min_lag - 1 : 0; l < r.size(); ++l) {
    double xy = 0.0, xx = 0.0, yy = 0.0;
    for (std::size_t i = 0; i + l < w.size(); ++i) {
      xy += static_cast<double>(w[i]) * w[i + l];
      xx += static_cast<double>(w[i]) * w[i];
      yy += static_cast<double>(w[i + l]) * w[i + l];
    }
    r[l] = (xx > 0.0 && yy > 0.0) ? xy / std::sqrt(xx * yy) : 0.0;
  }
  auto peak = first_strong_peak(r, min_lag, max_lag, 0.5, 0.9);
  if (!peak) return std::nullopt;
  return static_cast<double>(rate_hz) / refine_peak(r, *peak);
}

}  // namespace podcurate
