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

#include "podcurate/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "podcurate/error.hpp"
#include "podcurate/schema.hpp"

namespace podcurate {

namespace {

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Fixed precision keeps SVG coordinates stable across platforms.
std::string coord(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error("invalid number '" + std::string(s) + "' in bin specification");
  }
  return neg ? -v : v;
}

void check_edges(std::span<const double> edges) {
  if (edges.size() < 2) throw Error("histogram needs at least two bin edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i])) throw Error("bin edges must be finite");
    if (i > 0 && !(edges[i] > edges[i - 1])) throw Error("bin edges must be strictly increasing");
  }
}

Json histogram_json(const Histogram& h) {
  Json j;
  j["field"] = h.field;
  j["bin_edges"] = h.bin_edges;
  j["counts"] = h.counts;
  j["below"] = h.below;
  j["above"] = h.above;
  j["absent"] = h.absent;
  return j;
}

Json categories_json(const CategoryCounts& c) {
  Json j;
  j["field"] = c.field;
  j["counts"] = c.counts;
  j["absent"] = c.absent;
  return j;
}

std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_lo,bin_hi,count\n";
  if (h.below) out += "-inf," + num(h.bin_edges.front()) + "," + std::to_string(h.below) + "\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += num(h.bin_edges[i]) + "," + num(h.bin_edges[i + 1]) + "," + std::to_string(h.counts[i]) +
           "\n";
  }
  if (h.above) out += num(h.bin_edges.back()) + ",inf," + std::to_string(h.above) + "\n";
  return out;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

constexpr double kPanelWidth = 480.0;
constexpr double kPanelHeight = 240.0;
constexpr double kMargin = 40.0;

// One bar panel. Bar x-extent follows the bin edges exactly.
std::string svg_histogram(const Histogram& h, double y0) {
  const double lo = h.bin_edges.front(), hi = h.bin_edges.back();
  const std::size_t peak = h.counts.empty() ? 0 : *std::max_element(h.counts.begin(), h.counts.end());
  const double plot_w = kPanelWidth - 2 * kMargin;
  const double plot_h = kPanelHeight - 2 * kMargin;
  const double base = y0 + kPanelHeight - kMargin;
  std::string out = "<g class=\"histogram\" data-field=\"" + escape_xml(h.field) + "\">\n";
  out += "<text x=\"" + coord(kMargin) + "\" y=\"" + coord(y0 + 20) + "\">" + escape_xml(h.field) +
         "</text>\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double x = kMargin + (h.bin_edges[i] - lo) / (hi - lo) * plot_w;
    const double w = (h.bin_edges[i + 1] - h.bin_edges[i]) / (hi - lo) * plot_w;
    const double bar = peak ? static_cast<double>(h.counts[i]) / static_cast<double>(peak) * plot_h : 0.0;
    out += "<rect x=\"" + coord(x) + "\" y=\"" + coord(base - bar) + "\" width=\"" + coord(w) +
           "\" height=\"" + coord(bar) + "\" data-lo=\"" + num(h.bin_edges[i]) + "\" data-hi=\"" +
           num(h.bin_edges[i + 1]) + "\" data-count=\"" + std::to_string(h.counts[i]) +
           "\" fill=\"#4c72b0\" stroke=\"#ffffff\"/>\n";
  }
  out += "<line x1=\"" + coord(kMargin) + "\" y1=\"" + coord(base) + "\" x2=\"" +
         coord(kMargin + plot_w) + "\" y2=\"" + coord(base) + "\" stroke=\"#000000\"/>\n";
  out += "<text x=\"" + coord(kMargin) + "\" y=\"" + coord(base + 16) + "\">" + num(lo) + "</text>\n";
  out += "<text x=\"" + coord(kMargin + plot_w) + "\" y=\"" + coord(base + 16) +
         "\" text-anchor=\"end\">" + num(hi) + "</text>\n";
  out += "</g>\n";
  return out;
}

std::string svg_categories(const CategoryCounts& c, double y0) {
  std::size_t peak = 0;
  for (const auto& [_, n] : c.counts) peak = std::max(peak, n);
  const double plot_w = kPanelWidth - 2 * kMargin;
  const double plot_h = kPanelHeight - 2 * kMargin;
  const double base = y0 + kPanelHeight - kMargin;
  const double slot = c.counts.empty() ? plot_w : plot_w / static_cast<double>(c.counts.size());
  std::string out = "<g class=\"categories\" data-field=\"" + escape_xml(c.field) + "\">\n";
  out += "<text x=\"" + coord(kMargin) + "\" y=\"" + coord(y0 + 20) + "\">" + escape_xml(c.field) +
         "</text>\n";
  std::size_t i = 0;
  for (const auto& [label, n] : c.counts) {
    const double x = kMargin + slot * static_cast<double>(i) + slot * 0.1;
    const double bar = peak ? static_cast<double>(n) / static_cast<double>(peak) * plot_h : 0.0;
    out += "<rect x=\"" + coord(x) + "\" y=\"" + coord(base - bar) + "\" width=\"" +
           coord(slot * 0.8) + "\" height=\"" + coord(bar) + "\" data-label=\"" +
           escape_xml(label) + "\" data-count=\"" + std::to_string(n) + "\" fill=\"#dd8452\"/>\n";
    out += "<text x=\"" + coord(x + slot * 0.4) + "\" y=\"" + coord(base + 16) +
           "\" text-anchor=\"middle\">" + escape_xml(label) + "</text>\n";
    ++i;
  }
  out += "</g>\n";
  return out;
}

}  // namespace

std::size_t Histogram::present() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0}) + below + above;
}

Histogram histogram(const Manifest& m, std::string_view field, std::span<const double> edges) {
  const FieldInfo* f = find_field(field);
  if (!f) throw Error("unknown field '" + std::string(field) + "'");
  if (f->kind != FieldKind::kNumber) {
    throw Error("field '" + std::string(field) + "' is not numeric");
  }
  check_edges(edges);
  Histogram h;
  h.field = std::string(field);
  h.bin_edges.assign(edges.begin(), edges.end());
  h.counts.assign(edges.size() - 1, 0);
  for (const auto& r : m.records) {
    auto v = field_value(r, field);
    if (!v) {
      ++h.absent;
      continue;
    }
    const double x = std::get<double>(*v);
    if (x < edges.front()) {
      ++h.below;
    } else if (x >= edges.back()) {
      ++h.above;
    } else {
      // First edge strictly greater than x closes x's bin.
      auto it = std::upper_bound(edges.begin(), edges.end(), x);
      ++h.counts[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
  }
  return h;
}

Histogram merge_histograms(const Histogram& a, const Histogram& b) {
  if (a.field != b.field || a.bin_edges != b.bin_edges) {
    throw Error("cannot merge histograms over different fields or edges");
  }
  Histogram out = a;
  for (std::size_t i = 0; i < out.counts.size(); ++i) out.counts[i] += b.counts[i];
  out.below += b.below;
  out.above += b.above;
  out.absent += b.absent;
  return out;
}

std::vector<double> default_bin_edges(std::string_view field) {
  std::vector<double> edges;
  if (field == "snr_db") {
    for (int e = -20; e <= 100; e += 10) edges.push_back(e);
  } else if (field == "arousal" || field == "dominance" || field == "valence") {
    for (int k = 0; k <= 12; ++k) edges.push_back(1.0 + 0.5 * k);
  } else {
    throw Error("no default bins for field '" + std::string(field) + "'; pass --bins");
  }
  return edges;
}

std::vector<double> parse_bin_edges(std::string_view text) {
  std::vector<double> edges;
  if (text.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find(':', pos);
      if (end == std::string_view::npos) end = text.size();
      parts.push_back(parse_double(text.substr(pos, end - pos)));
      pos = end + 1;
    }
    if (parts.size() != 3 || !(parts[2] > 0.0) || !(parts[1] > parts[0])) {
      throw Error("range bins must look like lo:hi:step with lo < hi and step > 0");
    }
    const auto n = static_cast<std::size_t>(std::llround((parts[1] - parts[0]) / parts[2]));
    for (std::size_t k = 0; k <= n; ++k) edges.push_back(parts[0] + static_cast<double>(k) * parts[2]);
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find(',', pos);
      if (end == std::string_view::npos) end = text.size();
      edges.push_back(parse_double(text.substr(pos, end - pos)));
      pos = end + 1;
    }
  }
  check_edges(edges);
  return edges;
}

CategoryCounts category_counts(const Manifest& m, std::string_view field) {
  const FieldInfo* f = find_field(field);
  if (!f) throw Error("unknown field '" + std::string(field) + "'");
  CategoryCounts c;
  c.field = std::string(field);
  if (f->kind == FieldKind::kEnum) {
    for (auto v : f->enum_values) c.counts[std::string(v)] = 0;
  } else if (f->kind == FieldKind::kBool) {
    c.counts["false"] = 0;
    c.counts["true"] = 0;
  } else {
    throw Error("field '" + std::string(field) + "' is not categorical");
  }
  for (const auto& r : m.records) {
    auto v = field_value(r, field);
    if (!v) {
      ++c.absent;
    } else if (const auto* b = std::get_if<bool>(&*v)) {
      ++c.counts[*b ? "true" : "false"];
    } else {
      ++c.counts[std::get<std::string>(*v)];
    }
  }
  return c;
}

Report standard_report(const Manifest& m) {
  Report r;
  r.summary = corpus_summary(m);
  for (const char* field : {"snr_db", "arousal", "dominance", "valence"}) {
    auto edges = default_bin_edges(field);
    r.histograms.push_back(histogram(m, field, edges));
  }
  for (const char* field : {"emotion_category", "gender", "is_speech"}) {
    r.categories.push_back(category_counts(m, field));
  }
  return r;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json" || name == "structured-text") return ReportFormat::kStructuredText;
  if (name == "csv" || name == "delimited-table") return ReportFormat::kDelimitedTable;
  if (name == "svg" || name == "plot-image") return ReportFormat::kPlotImage;
  throw Error("unknown report format '" + std::string(name) + "' (expected json, csv or svg)");
}

std::string render_report(const Report& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kStructuredText: {
      Json j = Json::object();
      if (report.summary) j["summary"] = summary_to_json(*report.summary);
      Json hs = Json::array();
      for (const auto& h : report.histograms) hs.push_back(histogram_json(h));
      j["histograms"] = std::move(hs);
      Json cs = Json::array();
      for (const auto& c : report.categories) cs.push_back(categories_json(c));
      j["categories"] = std::move(cs);
      return j.dump(2) + "\n";
    }
    case ReportFormat::kDelimitedTable: {
      const std::size_t tables = (report.summary ? 1 : 0) + report.histograms.size() +
                                 report.categories.size();
      if (tables != 1) {
        throw Error("delimited-table output holds exactly one table; got " +
                    std::to_string(tables));
      }
      if (!report.histograms.empty()) return histogram_csv(report.histograms.front());
      if (!report.categories.empty()) {
        const auto& c = report.categories.front();
        std::string out = "label,count\n";
        for (const auto& [label, n] : c.counts) out += label + "," + std::to_string(n) + "\n";
        out += "absent," + std::to_string(c.absent) + "\n";
        return out;
      }
      std::string out = "key,value\n";
      const Json summary = summary_to_json(*report.summary);
      for (const auto& [k, v] : summary.items()) {
        if (v.is_object()) {
          for (const auto& [k2, v2] : v.items()) out += k + "." + k2 + "," + v2.dump() + "\n";
        } else {
          out += k + "," + v.dump() + "\n";
        }
      }
      return out;
    }
    case ReportFormat::kPlotImage: {
      const std::size_t panels = report.histograms.size() + report.categories.size();
      const double height = kPanelHeight * static_cast<double>(std::max<std::size_t>(panels, 1));
      std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(kPanelWidth) +
                        "\" height=\"" + coord(height) + "\" font-family=\"sans-serif\" "
                        "font-size=\"12\">\n";
      double y = 0.0;
      for (const auto& h : report.histograms) {
        out += svg_histogram(h, y);
        y += kPanelHeight;
      }
      for (const auto& c : report.categories) {
        out += svg_categories(c, y);
        y += kPanelHeight;
      }
      out += "</svg>\n";
      return out;
    }
  }
  throw Error("unknown report format");
}

void emit_report(const Report& report, const std::filesystem::path& path, ReportFormat format) {
  const std::string bytes = render_report(report, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace podcurate
