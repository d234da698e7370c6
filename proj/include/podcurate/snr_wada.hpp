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

#ifndef PODCURATE_SNR_WADA_HPP_
#define PODCURATE_SNR_WADA_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace podcurate {

// Waveform-amplitude-distribution SNR estimation.
//
// Speech amplitudes are modelled as gamma distributed (shape ~0.4) and the
// background as Gaussian. The statistic
//
//   G = ln(mean |x|) - mean(ln |x|)
//
// is invariant to gain, equals ln(k) - digamma(k) for pure gamma(k)
// amplitudes and ~0.4094 for pure Gaussian noise, and moves monotonically
// between those two as the mixture SNR rises. A Monte Carlo table maps SNR to
// G; estimation inverts it by linear interpolation.

inline constexpr double kAmplitudeFloor = 1e-20;

// Samples with |x| <= kAmplitudeFloor are excluded from both means. Throws
// Error("silent segment") when nothing remains.
double gain_invariant_statistic(std::span<const float> x);
double gain_invariant_statistic(std::span<const double> x);

struct SnrTableConfig {
  double grid_min_db = -20.0;
  double grid_max_db = 100.0;
  double grid_step_db = 1.0;
  double gamma_shape = 0.4;
  int trials_per_point = 20;
  int samples_per_trial = 100000;
  std::uint64_t seed = 20240917;
  // 0 = hardware concurrency. Output does not depend on this.
  int workers = 0;
  // Largest raw decrease in G between neighbouring grid points that the
  // isotonic pass may absorb before the build is rejected.
  double monotone_tolerance = 1e-3;
};

struct SnrTable {
  std::vector<double> snr_grid_db;
  std::vector<double> statistic_values;  // strictly increasing with SNR
  double gamma_shape = 0.4;
  int trials_per_point = 0;
  int samples_per_trial = 0;
  std::uint64_t seed = 0;

  double min_db() const { return snr_grid_db.front(); }
  double max_db() const { return snr_grid_db.back(); }
  void validate() const;

  bool operator==(const SnrTable&) const = default;
};

SnrTable build_snr_table(const SnrTableConfig& config = {});

// Clamped to [grid min, grid max].
double estimate_snr(std::span<const float> x, const SnrTable& table);
double estimate_snr(std::span<const double> x, const SnrTable& table);
double snr_from_statistic(double g, const SnrTable& table);

nlohmann::json snr_table_to_json(const SnrTable& t);
SnrTable snr_table_from_json(const nlohmann::json& j);
void save_snr_table(const SnrTable& t, const std::filesystem::path& path);
SnrTable load_snr_table(const std::filesystem::path& path);

// Synthetic mixture used to build the table: gamma(shape) amplitudes with
// random signs plus Gaussian noise scaled to hit `snr_db` exactly (measured on
// the drawn samples).
std::vector<double> synthesize_mixture(std::size_t n, double snr_db, double gamma_shape,
                                       std::uint64_t seed);

// Loads `path` if present, otherwise builds with `config` and caches there
// (best effort).
SnrTable load_or_build_snr_table(const std::filesystem::path& path, const SnrTableConfig& config);

}  // namespace podcurate

#endif  // PODCURATE_SNR_WADA_HPP_
