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


// Python bindings over the curation library. Manifests cross the boundary as
// JSON Lines text so Python callers can use their own file handling.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "podcurate/error.hpp"
#include "podcurate/eval_metrics.hpp"
#include "podcurate/manifest.hpp"
#include "podcurate/query.hpp"
#include "podcurate/segmenter.hpp"
#include "podcurate/snr_wada.hpp"
#include "podcurate/speaker_linker.hpp"

namespace py = pybind11;
using namespace podcurate;

namespace {

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

std::vector<std::pair<double, double>> py_adjust_boundaries(const std::vector<std::pair<double, double>>& spans,
                                                            double duration_s, double silence_threshold_s,
                                                            double extension_s, double max_merge_duration_s) {
  SegmenterConfig config;
  config.silence_threshold_s = silence_threshold_s;
  config.extension_s = extension_s;
  config.max_merge_duration_s = max_merge_duration_s;
  std::vector<SegmentProposal> in;
  for (const auto& [s, e] : spans) in.push_back({s, e, std::nullopt});
  std::vector<std::pair<double, double>> out;
  for (const auto& p : adjust_boundaries(in, duration_s, config)) out.emplace_back(p.start_s, p.end_s);
  return out;
}

py::dict py_eer(const std::vector<double>& genuine, const std::vector<double>& impostor) {
  std::vector<TrialScore> scores;
  for (double s : genuine) scores.push_back({TrialKind::kGenuine, s});
  for (double s : impostor) scores.push_back({TrialKind::kImpostor, s});
  const EerResult r = eer_threshold(scores);
  py::dict d;
  d["eer"] = r.eer;
  d["threshold"] = r.threshold;
  d["far"] = r.far;
  d["frr"] = r.frr;
  return d;
}

SnrTable py_build_table(double grid_min_db, double grid_max_db, double grid_step_db, int trials_per_point,
                        int samples_per_trial, std::uint64_t seed, int workers) {
  SnrTableConfig c;
  c.grid_min_db = grid_min_db;
  c.grid_max_db = grid_max_db;
  c.grid_step_db = grid_step_db;
  c.trials_per_point = trials_per_point;
  c.samples_per_trial = samples_per_trial;
  c.seed = seed;
  c.workers = workers;
  py::gil_scoped_release release;
  return build_snr_table(c);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Speech corpus curation: segmentation, SNR estimation, metrics and manifest queries.";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  static py::exception<FilterSyntaxError> syntax_error(m, "FilterSyntaxError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const FilterSyntaxError& e) {
      py::set_error(syntax_error, (std::string(e.what()) + " (byte " + std::to_string(e.offset()) + ")").c_str());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("adjust_boundaries", &py_adjust_boundaries, py::arg("spans"), py::arg("duration_s"),
        py::arg("silence_threshold_s") = 0.5, py::arg("extension_s") = 0.25, py::arg("max_merge_duration_s") = 10.0,
        "Merge short gaps and extend boundaries into silence. Spans are (start_s, end_s) pairs.");

  m.def(
      "wer", [](const std::string& ref, const std::string& hyp) { return wer(ref, hyp); }, py::arg("reference"),
      py::arg("hypothesis"), "Word error rate after lowercasing and punctuation removal.");
  m.def(
      "cer",
      [](const std::string& ref, const std::string& hyp, bool exclude_spaces) {
        TextNormalization n;
        n.cer_exclude_spaces = exclude_spaces;
        return cer(ref, hyp, n);
      },
      py::arg("reference"), py::arg("hypothesis"), py::arg("exclude_spaces") = true,
      "Character error rate after lowercasing and punctuation removal.");
  m.def("eer", &py_eer, py::arg("genuine"), py::arg("impostor"),
        "Equal error rate of verification scores; returns eer, threshold, far and frr.");
  m.def(
      "sv_acceptance", [](const std::vector<double>& s, double t) { return sv_acceptance(s, t); },
      py::arg("similarities"), py::arg("threshold"), "Fraction of genuine similarities at or above the threshold.");
  m.def(
      "cosine_similarity", [](const std::vector<double>& a, const std::vector<double>& b) {
        return cosine_similarity(a, b);
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "gain_invariant_statistic", [](const std::vector<double>& x) { return gain_invariant_statistic(x); },
      py::arg("samples"), "log(mean |x|) - mean(log |x|) over nonzero samples.");

  py::class_<SnrTable>(m, "SnrTable", "Lookup table from the amplitude statistic to SNR in dB.")
      .def_static("build", &py_build_table, py::arg("grid_min_db") = -20.0, py::arg("grid_max_db") = 100.0,
                  py::arg("grid_step_db") = 1.0, py::arg("trials_per_point") = 20,
                  py::arg("samples_per_trial") = 100000, py::arg("seed") = SnrTableConfig{}.seed,
                  py::arg("workers") = 0)
      .def_static(
          "load", [](const std::string& path) { return load_snr_table(path); }, py::arg("path"))
      .def(
          "save", [](const SnrTable& t, const std::string& path) { save_snr_table(t, path); }, py::arg("path"))
      .def(
          "estimate", [](const SnrTable& t, const std::vector<double>& x) { return estimate_snr(x, t); },
          py::arg("samples"), "Estimated SNR in dB, clamped to the table range.")
      .def_readonly("snr_grid_db", &SnrTable::snr_grid_db)
      .def_readonly("statistic_values", &SnrTable::statistic_values);

  m.def(
      "canonical_filter", [](const std::string& text) { return print_filter(parse_filter(text)); },
      py::arg("query"), "Parse and type-check a filter expression; return its canonical text.");
  m.def(
      "filter_manifest",
      [](const std::string& manifest_text, const std::string& query) {
        return serialize_manifest(select(parse_manifest(manifest_text), parse_filter(query), query));
      },
      py::arg("manifest_text"), py::arg("query"), "Select records from JSON Lines manifest text.");
  m.def(
      "manifest_summary",
      [](const std::string& manifest_text) { return to_python(summary_to_json(corpus_summary(parse_manifest(manifest_text)))); },
      py::arg("manifest_text"));
  m.def(
      "manifest_records",
      [](const std::string& manifest_text) {
        py::list out;
        for (const auto& r : parse_manifest(manifest_text).records) out.append(to_python(record_to_json(r)));
        return out;
      },
      py::arg("manifest_text"), "Validated records as dictionaries.");
}
