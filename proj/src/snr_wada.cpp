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

#include "podcurate/snr_wada.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "podcurate/error.hpp"
#include "podcurate/random.hpp"

namespace podcurate {

namespace {

constexpr const char* kTableFormat = "podcurate-snr-table";

template <typename T>
double statistic_impl(std::span<const T> x) {
  double sum_abs = 0.0;
  double sum_log = 0.0;
  std::size_t n = 0;
  for (T v : x) {
    const double a = std::abs(static_cast<double>(v));
    if (a <= kAmplitudeFloor) continue;
    sum_abs += a;
    sum_log += std::log(a);
    ++n;
  }
  if (n == 0) throw Error("silent segment");
  const double dn = static_cast<double>(n);
  return std::log(sum_abs / dn) - sum_log / dn;
}

struct SpeechAndNoise {
  std::vector<double> speech;
  std::vector<double> noise;
  double speech_power = 0.0;
  double noise_power = 0.0;
};

SpeechAndNoise draw_components(std::size_t n, double shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> amp(shape, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution sign(0.5);
  SpeechAndNoise d;
  d.speech.resize(n);
  d.noise.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = amp(rng);
    d.speech[i] = sign(rng) ? a : -a;
  }
  for (std::size_t i = 0; i < n; ++i) d.noise[i] = gauss(rng);
  for (std::size_t i = 0; i < n; ++i) {
    d.speech_power += d.speech[i] * d.speech[i];
    d.noise_power += d.noise[i] * d.noise[i];
  }
  d.speech_power /= static_cast<double>(n);
  d.noise_power /= static_cast<double>(n);
  return d;
}

double noise_gain(const SpeechAndNoise& d, double snr_db) {
  return std::sqrt(d.speech_power / (d.noise_power * std::pow(10.0, snr_db / 10.0)));
}

double mixture_statistic(const SpeechAndNoise& d, double gain) {
  double sum_abs = 0.0, sum_log = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < d.speech.size(); ++i) {
    const double a = std::abs(d.speech[i] + gain * d.noise[i]);
    if (a <= kAmplitudeFloor) continue;
    sum_abs += a;
    sum_log += std::log(a);
    ++n;
  }
  if (n == 0) throw Error("silent segment");
  return std::log(sum_abs / static_cast<double>(n)) - sum_log / static_cast<double>(n);
}

// Pool-adjacent-violators for a non-decreasing fit with unit weights.
std::vector<double> isotonic_increasing(const std::vector<double>& y) {
  struct Block {
    double sum;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (double v : y) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1) {
      const Block& b = blocks.back();
      const Block& a = blocks[blocks.size() - 2];
      if (a.sum / a.count <= b.sum / b.count) break;
      Block m{a.sum + b.sum, a.count + b.count};
      blocks.pop_back();
      blocks.back() = m;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.sum / b.count);
  return out;
}

}  // namespace

double gain_invariant_statistic(std::span<const float> x) { return statistic_impl(x); }
double gain_invariant_statistic(std::span<const double> x) { return statistic_impl(x); }

void SnrTable::validate() const {
  if (snr_grid_db.empty()) throw Error("SNR table is empty");
  if (snr_grid_db.size() != statistic_values.size()) {
    throw Error("SNR table grid and statistic columns differ in length");
  }
  for (std::size_t i = 1; i < snr_grid_db.size(); ++i) {
    if (!(snr_grid_db[i] > snr_grid_db[i - 1])) throw Error("SNR grid must be strictly increasing");
    if (!(statistic_values[i] > statistic_values[i - 1])) {
      throw Error("SNR table statistic must be strictly increasing");
    }
  }
}

std::vector<double> synthesize_mixture(std::size_t n, double snr_db, double gamma_shape,
                                       std::uint64_t seed) {
  SpeechAndNoise d = draw_components(n, gamma_shape, seed);
  const double g = noise_gain(d, snr_db);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = d.speech[i] + g * d.noise[i];
  return x;
}

SnrTable build_snr_table(const SnrTableConfig& config) {
  if (config.trials_per_point < 1) throw Error("trials_per_point must be >= 1");
  if (config.samples_per_trial < 2) throw Error("samples_per_trial must be >= 2");
  if (!(config.gamma_shape > 0.0)) throw Error("gamma_shape must be positive");
  if (!(config.grid_step_db > 0.0) || config.grid_max_db < config.grid_min_db) {
    throw Error("invalid SNR grid");
  }

  SnrTable t;
  t.gamma_shape = config.gamma_shape;
  t.trials_per_point = config.trials_per_point;
  t.samples_per_trial = config.samples_per_trial;
  t.seed = config.seed;
  const auto points = static_cast<std::size_t>(
      std::floor((config.grid_max_db - config.grid_min_db) / config.grid_step_db + 1e-9)) + 1;
  for (std::size_t k = 0; k < points; ++k) {
    t.snr_grid_db.push_back(config.grid_min_db + static_cast<double>(k) * config.grid_step_db);
  }

  // Each trial draws one speech/noise pair and evaluates every grid point on
  // it (common random numbers). Per-trial seeds keep the result independent
  // of how trials are spread over threads.
  const auto trials = static_cast<std::size_t>(config.trials_per_point);
  std::vector<std::vector<double>> per_trial(trials, std::vector<double>(points));
  auto run_trial = [&](std::size_t trial) {
    SpeechAndNoise d = draw_components(static_cast<std::size_t>(config.samples_per_trial),
                                       config.gamma_shape, derive_seed(config.seed, trial));
    for (std::size_t k = 0; k < points; ++k) {
      per_trial[trial][k] = mixture_statistic(d, noise_gain(d, t.snr_grid_db[k]));
    }
  };
  std::size_t workers = config.workers > 0 ? static_cast<std::size_t>(config.workers)
                                           : std::max(1U, std::thread::hardware_concurrency());
  workers = std::min(workers, trials);
  if (workers <= 1) {
    for (std::size_t i = 0; i < trials; ++i) run_trial(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < trials; i += workers) run_trial(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<double> raw(points, 0.0);
  for (std::size_t k = 0; k < points; ++k) {
    for (std::size_t i = 0; i < trials; ++i) raw[k] += per_trial[i][k];
    raw[k] /= static_cast<double>(trials);
  }
  for (std::size_t k = 1; k < points; ++k) {
    if (raw[k - 1] - raw[k] > config.monotone_tolerance) {
      std::ostringstream os;
      os << "SNR table not monotone at " << t.snr_grid_db[k]
         << " dB beyond tolerance; increase trials_per_point or samples_per_trial";
      throw Error(os.str());
    }
  }
  t.statistic_values = isotonic_increasing(raw);
  // Break ties left by pooling (and the flat high-SNR tail) with the smallest
  // representable steps so the inverse stays a function.
  for (std::size_t k = 1; k < points; ++k) {
    if (!(t.statistic_values[k] > t.statistic_values[k - 1])) {
      t.statistic_values[k] = std::nextafter(t.statistic_values[k - 1], INFINITY);
    }
  }
  t.validate();
  return t;
}

double snr_from_statistic(double g, const SnrTable& table) {
  const auto& xs = table.statistic_values;
  const auto& ys = table.snr_grid_db;
  if (xs.size() == 1 || g <= xs.front()) return ys.front();
  if (g >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), g);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double f = (g - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + f * (ys[hi] - ys[lo]);
}

double estimate_snr(std::span<const float> x, const SnrTable& table) {
  return snr_from_statistic(gain_invariant_statistic(x), table);
}

double estimate_snr(std::span<const double> x, const SnrTable& table) {
  return snr_from_statistic(gain_invariant_statistic(x), table);
}

nlohmann::json snr_table_to_json(const SnrTable& t) {
  nlohmann::json j;
  j["format"] = kTableFormat;
  j["snr_grid_db"] = t.snr_grid_db;
  j["statistic_values"] = t.statistic_values;
  j["gamma_shape"] = t.gamma_shape;
  j["trials_per_point"] = t.trials_per_point;
  j["samples_per_trial"] = t.samples_per_trial;
  j["seed"] = t.seed;
  return j;
}

SnrTable snr_table_from_json(const nlohmann::json& j) {
  SnrTable t;
  try {
    if (j.value("format", "") != kTableFormat) throw Error("not an SNR table file");
    t.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
    t.statistic_values = j.at("statistic_values").get<std::vector<double>>();
    t.gamma_shape = j.at("gamma_shape").get<double>();
    t.trials_per_point = j.at("trials_per_point").get<int>();
    t.samples_per_trial = j.at("samples_per_trial").get<int>();
    t.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed SNR table: ") + e.what());
  }
  t.validate();
  return t;
}

void save_snr_table(const SnrTable& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << snr_table_to_json(t).dump(1) << '\n';
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

SnrTable load_snr_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open SNR table '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("'" + path.string() + "': " + e.what());
  }
  return snr_table_from_json(j);
}

SnrTable load_or_build_snr_table(const std::filesystem::path& path,
                                 const SnrTableConfig& config) {
  std::error_code ec;
  if (!path.empty() && std::filesystem::exists(path, ec)) return load_snr_table(path);
  SnrTable t = build_snr_table(config);
  if (!path.empty()) {
    try {
      if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
      save_snr_table(t, path);
    } catch (const Error&) {
      // Cache is optional.
    }
  }
  return t;
}

}  // namespace podcurate
