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

#ifndef PODCURATE_STATS_HPP_
#define PODCURATE_STATS_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "podcurate/manifest.hpp"

namespace podcurate {

// Half-open bins [e_i, e_{i+1}). Values below e_0 / at or above e_n land in
// the overflow counters; records without the field are counted in `absent`.
struct Histogram {
  std::string field;
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
  std::size_t below = 0;
  std::size_t above = 0;
  std::size_t absent = 0;

  std::size_t present() const;
  bool operator==(const Histogram&) const = default;
};

Histogram histogram(const Manifest& m, std::string_view field, std::span<const double> edges);
// Element-wise sum of histograms over the same field and edges.
Histogram merge_histograms(const Histogram& a, const Histogram& b);

// SNR: width 10 over [-20, 100]; emotion attributes: width 0.5 over [1, 7].
std::vector<double> default_bin_edges(std::string_view field);
// "0,10,20,30" or "lo:hi:step".
std::vector<double> parse_bin_edges(std::string_view text);

struct CategoryCounts {
  std::string field;
  std::map<std::string, std::size_t> counts;
  std::size_t absent = 0;

  bool operator==(const CategoryCounts&) const = default;
};

// Enum and boolean fields. Every allowed label appears, zero or not.
CategoryCounts category_counts(const Manifest& m, std::string_view field);

struct Report {
  std::optional<CorpusSummary> summary;
  std::vector<Histogram> histograms;
  std::vector<CategoryCounts> categories;
};

// Summary, SNR and emotion-attribute histograms, emotion/gender/speech
// category counts.
Report standard_report(const Manifest& m);

enum class ReportFormat { kStructuredText, kDelimitedTable, kPlotImage };
ReportFormat parse_report_format(std::string_view name);

// JSON for structured text, CSV for the delimited table (one table per
// report), SVG bar charts for the plot image.
std::string render_report(const Report& report, ReportFormat format);
void emit_report(const Report& report, const std::filesystem::path& path, ReportFormat format);

}  // namespace podcurate

#endif  // PODCURATE_STATS_HPP_
