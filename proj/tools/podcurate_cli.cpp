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

// podcurate: command-line front end.
//
// Exit codes: 0 success, 1 fatal or usage error, 2 run finished with
// partial annotation failures or skipped sources.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "podcurate/audio.hpp"
#include "podcurate/error.hpp"
#include "podcurate/eval_metrics.hpp"
#include "podcurate/fixture.hpp"
#include "podcurate/manifest.hpp"
#include "podcurate/pipeline.hpp"
#include "podcurate/query.hpp"
#include "podcurate/schema.hpp"
#include "podcurate/segmenter.hpp"
#include "podcurate/snr_wada.hpp"
#include "podcurate/stats.hpp"

namespace fs = std::filesystem;
using namespace podcurate;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitPartial = 2;

// Shortest round-trip form, always with a decimal point ("0.0", "0.25").
std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

SnrTable table_for_cli(const std::string& path) {
  if (!path.empty()) return load_snr_table(path);
  PipelineConfig c;
  return *resolve_snr_table(c);
}

struct RunArgs {
  std::string config;
  std::string audio_dir;
  std::string out;
  std::string report;
  int workers = -1;
  bool resume = false;
};

int cmd_run(const RunArgs& a) {
  PipelineConfig config = load_pipeline_config(a.config);
  if (a.workers >= 0) config.workers = a.workers;
  if (!a.out.empty()) config.output = a.out;

  std::optional<Manifest> previous;
  if (a.resume && fs::exists(config.output)) previous = read_manifest(config.output);

  RunReport report;
  Manifest m = run_configured(config, a.audio_dir, &report, previous ? &*previous : nullptr);
  write_manifest(m, config.output);

  std::cerr << format_run_report(report);
  std::cerr << "wrote " << m.records.size() << " records to " << config.output.string() << "\n";
  const Json rj = run_report_to_json(report);
  if (!a.report.empty()) {
    std::ofstream(a.report) << rj.dump(2) << "\n";
  }
  std::cout << rj.dump() << "\n";
  return report.complete() ? kExitOk : kExitPartial;
}

int cmd_filter(const std::string& manifest, const std::string& query, const std::string& out) {
  const Manifest m = read_manifest(manifest);
  const FilterExpr e = parse_filter(query);
  type_check(e);
  const Manifest sub = select(m, e, query);
  if (out.empty() || out == "-") {
    std::cout << serialize_manifest(sub);
  } else {
    write_manifest(sub, out);
  }
  std::cerr << sub.records.size() << " of " << m.records.size() << " records selected\n";
  return kExitOk;
}

void write_output(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error("cannot write '" + out + "'");
    f << text;
  }
}

int cmd_stats_field(const std::string& manifest, const std::string& field, const std::string& bins,
                    const std::string& format, const std::string& out) {
  const Manifest m = read_manifest(manifest);
  const FieldInfo* info = find_field(field);
  if (!info) throw Error("unknown field '" + field + "'");
  Report report;
  if (info->kind == FieldKind::kNumber) {
    const auto edges = bins.empty() ? default_bin_edges(field) : parse_bin_edges(bins);
    report.histograms.push_back(histogram(m, field, edges));
  } else {
    if (!bins.empty()) throw Error("--bins only applies to numeric fields");
    report.categories.push_back(category_counts(m, field));
  }
  write_output(render_report(report, parse_report_format(format)), out);
  return kExitOk;
}

int cmd_stats_summary(const std::string& manifest, const std::string& format,
                      const std::string& out) {
  Report report;
  report.summary = corpus_summary(read_manifest(manifest));
  write_output(render_report(report, parse_report_format(format)), out);
  return kExitOk;
}

int cmd_stats_report(const std::string& manifest, const std::string& format,
                     const std::string& out) {
  write_output(render_report(standard_report(read_manifest(manifest)), parse_report_format(format)),
               out);
  return kExitOk;
}

int cmd_snr(const std::string& wav, const std::string& table_path, const SegmenterConfig& seg) {
  const SnrTable table = table_for_cli(table_path);
  const auto samples = normalize_audio(read_wav(wav), seg);
  std::cout << format_number(std::round(estimate_snr(samples, table) * 100.0) / 100.0) << "\n";
  return kExitOk;
}

int cmd_eval_text(bool words, const std::string& ref, const std::string& hyp) {
  const auto refs = read_lines(ref);
  const auto hyps = read_lines(hyp);
  if (refs.size() != hyps.size()) {
    throw Error("reference has " + std::to_string(refs.size()) + " lines but hypothesis has " +
                std::to_string(hyps.size()));
  }
  const EditOps ops = words ? corpus_word_ops(refs, hyps) : corpus_char_ops(refs, hyps);
  std::cout << format_number(ops.rate()) << "\n";
  std::cerr << "S=" << ops.substitutions << " D=" << ops.deletions << " I=" << ops.insertions
            << " N=" << ops.reference_length << "\n";
  return kExitOk;
}

int cmd_eval_sv(const std::string& trials_path, bool calibrate, std::optional<double> threshold) {
  std::vector<TrialScore> trials;
  std::vector<double> plain;
  std::size_t lineno = 0;
  for (const auto& line : read_lines(trials_path)) {
    ++lineno;
    std::istringstream fields(line);
    std::vector<std::string> cols;
    for (std::string c; fields >> c;) cols.push_back(c);
    if (cols.empty() || cols[0][0] == '#') continue;
    auto number = [&](const std::string& s) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) {
        throw Error("trials line " + std::to_string(lineno) + ": bad score '" + s + "'");
      }
      return v;
    };
    if (cols.size() == 1) {
      plain.push_back(number(cols[0]));
    } else if (cols.size() == 2) {
      TrialKind kind;
      if (cols[0] == "genuine" || cols[0] == "target") {
        kind = TrialKind::kGenuine;
      } else if (cols[0] == "impostor" || cols[0] == "nontarget") {
        kind = TrialKind::kImpostor;
      } else {
        throw Error("trials line " + std::to_string(lineno) + ": unknown kind '" + cols[0] + "'");
      }
      trials.push_back({kind, number(cols[1])});
    } else {
      throw Error("trials line " + std::to_string(lineno) + ": expected 1 or 2 columns");
    }
  }
  if (!trials.empty() && !plain.empty()) throw Error("trials file mixes 1- and 2-column rows");

  if (calibrate) {
    if (trials.empty()) throw Error("calibration needs (kind, score) rows");
    const EerResult r = eer_threshold(trials);
    Json j = {{"threshold", r.threshold}, {"eer", r.eer}, {"far", r.far}, {"frr", r.frr}};
    // Acceptance of the genuine trials at the calibrated threshold.
    std::vector<double> genuine;
    for (const auto& t : trials) {
      if (t.kind == TrialKind::kGenuine) genuine.push_back(t.score);
    }
    j["acceptance"] = sv_acceptance(genuine, r.threshold);
    std::cout << j.dump() << "\n";
    return kExitOk;
  }
  if (!threshold) throw Error("--threshold is required without --calibrate");
  if (plain.empty()) {
    for (const auto& t : trials) {
      if (t.kind == TrialKind::kGenuine) plain.push_back(t.score);
    }
  }
  std::cout << format_number(sv_acceptance(plain, *threshold)) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"podcurate: build, filter and measure annotated speech corpora"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Segment and annotate every .wav file in a directory");
  run_cmd->add_option("--config", run.config, "Pipeline config (JSON)")->required();
  run_cmd->add_option("--audio-dir", run.audio_dir, "Directory of .wav files")->required();
  run_cmd->add_option("--out", run.out, "Output manifest (overrides the config)");
  run_cmd->add_option("--workers", run.workers, "Worker threads (0 = all cores)");
  run_cmd->add_option("--report", run.report, "Also write the run report here");
  run_cmd->add_flag("--resume", run.resume, "Continue from an existing output manifest");

  std::string manifest, query, out, field, bins, format = "json";
  auto* filter_cmd = app.add_subcommand("filter", "Select records matching a query");
  filter_cmd->add_option("--manifest", manifest)->required();
  filter_cmd->add_option("--query", query, "Filter expression")->required();
  filter_cmd->add_option("--out", out, "Output manifest ('-' for stdout)");

  auto* stats_cmd = app.add_subcommand("stats", "Histograms and summaries");
  stats_cmd->add_option("--manifest", manifest);
  stats_cmd->add_option("--field", field);
  stats_cmd->add_option("--bins", bins, "Edges \"a,b,c\" or \"lo:hi:step\"");
  stats_cmd->add_option("--format", format, "json, csv or svg");
  stats_cmd->add_option("--out", out);
  auto* summary_cmd = stats_cmd->add_subcommand("summary", "Corpus summary");
  summary_cmd->add_option("--manifest", manifest)->required();
  summary_cmd->add_option("--format", format);
  summary_cmd->add_option("--out", out);
  auto* report_cmd = stats_cmd->add_subcommand("report", "Summary, histograms and category counts");
  report_cmd->add_option("--manifest", manifest)->required();
  report_cmd->add_option("--format", format);
  report_cmd->add_option("--out", out);

  std::string wav, table_path;
  const SegmenterConfig seg;
  auto* snr_cmd = app.add_subcommand("snr", "Estimate the SNR of a whole file");
  snr_cmd->add_option("wav", wav)->required();
  snr_cmd->add_option("--table", table_path, "Lookup table (built on demand otherwise)");

  auto* eval_cmd = app.add_subcommand("eval", "Objective metrics");
  eval_cmd->require_subcommand(1);
  std::string ref, hyp, trials;
  auto* wer_cmd = eval_cmd->add_subcommand("wer", "Word error rate of line-aligned files");
  wer_cmd->add_option("--ref", ref)->required();
  wer_cmd->add_option("--hyp", hyp)->required();
  auto* cer_cmd = eval_cmd->add_subcommand("cer", "Character error rate of line-aligned files");
  cer_cmd->add_option("--ref", ref)->required();
  cer_cmd->add_option("--hyp", hyp)->required();
  bool calibrate = false;
  std::optional<double> threshold;
  auto* sv_cmd = eval_cmd->add_subcommand("sv", "EER calibration and acceptance rate");
  sv_cmd->add_option("--trials", trials, "Rows of (kind score) or (score)")->required();
  sv_cmd->add_flag("--calibrate", calibrate, "Report the EER operating point");
  sv_cmd->add_option("--threshold", threshold, "Acceptance threshold");

  SnrTableConfig tc;
  std::string table_out;
  auto* table_cmd = app.add_subcommand("snr-table", "Build the statistic-to-SNR lookup table");
  table_cmd->add_option("--out", table_out)->required();
  table_cmd->add_option("--grid-min", tc.grid_min_db);
  table_cmd->add_option("--grid-max", tc.grid_max_db);
  table_cmd->add_option("--grid-step", tc.grid_step_db);
  table_cmd->add_option("--shape", tc.gamma_shape);
  table_cmd->add_option("--trials", tc.trials_per_point);
  table_cmd->add_option("--samples", tc.samples_per_trial);
  table_cmd->add_option("--seed", tc.seed);
  table_cmd->add_option("--workers", tc.workers);

  std::string fixture_dir;
  std::uint64_t fixture_seed = kFixtureSeed;
  auto* fixture_cmd = app.add_subcommand("make-fixture", "Write the synthetic test recording");
  fixture_cmd->add_option("--out", fixture_dir)->required();
  fixture_cmd->add_option("--seed", fixture_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitFatal;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitFatal;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitFatal;
  }

  try {
    if (*run_cmd) {
      if (!fs::exists(run.config)) {
        std::cerr << "error: config '" << run.config << "' does not exist\n\n" << run_cmd->help();
        return kExitFatal;
      }
      return cmd_run(run);
    }
    if (*filter_cmd) return cmd_filter(manifest, query, out);
    if (*stats_cmd) {
      if (*summary_cmd) return cmd_stats_summary(manifest, format, out);
      if (*report_cmd) return cmd_stats_report(manifest, format, out);
      if (manifest.empty() || field.empty()) {
        std::cerr << "error: stats needs --manifest and --field\n\n" << stats_cmd->help();
        return kExitFatal;
      }
      return cmd_stats_field(manifest, field, bins, format, out);
    }
    if (*snr_cmd) return cmd_snr(wav, table_path, seg);
    if (*wer_cmd) return cmd_eval_text(true, ref, hyp);
    if (*cer_cmd) return cmd_eval_text(false, ref, hyp);
    if (*sv_cmd) return cmd_eval_sv(trials, calibrate, threshold);
    if (*table_cmd) {
      save_snr_table(build_snr_table(tc), table_out);
      std::cerr << "wrote " << table_out << "\n";
      return kExitOk;
    }
    if (*fixture_cmd) {
      write_fixture(fixture_dir, fixture_seed);
      std::cerr << "wrote fixture to " << fixture_dir << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}
