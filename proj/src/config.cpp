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

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>
#include <thread>

#include "podcurate/error.hpp"
#include "podcurate/pipeline.hpp"
#include "podcurate/random.hpp"
#include "podcurate/stubs.hpp"
#include "podcurate/subprocess.hpp"

namespace podcurate {

namespace fs = std::filesystem;

namespace {

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, _] : j.items()) {
    if (!ok.contains(k)) throw Error("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
T get(const Json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(where + "." + key + " is missing or has the wrong type");
  }
}

template <typename T>
void read_opt(const Json& j, const char* key, T& out, const std::string& where) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

SnrTableConfig table_config_from_json(const Json& j) {
  const std::string where = "snr_table.build";
  check_keys(j, where,
             {"grid_min_db", "grid_max_db", "grid_step_db", "gamma_shape", "trials_per_point",
              "samples_per_trial", "seed", "workers", "monotone_tolerance"});
  SnrTableConfig c;
  read_opt(j, "grid_min_db", c.grid_min_db, where);
  read_opt(j, "grid_max_db", c.grid_max_db, where);
  read_opt(j, "grid_step_db", c.grid_step_db, where);
  read_opt(j, "gamma_shape", c.gamma_shape, where);
  read_opt(j, "trials_per_point", c.trials_per_point, where);
  read_opt(j, "samples_per_trial", c.samples_per_trial, where);
  read_opt(j, "seed", c.seed, where);
  read_opt(j, "workers", c.workers, where);
  read_opt(j, "monotone_tolerance", c.monotone_tolerance, where);
  return c;
}

Json table_config_to_json(const SnrTableConfig& c) {
  return {{"grid_min_db", c.grid_min_db},         {"grid_max_db", c.grid_max_db},
          {"grid_step_db", c.grid_step_db},       {"gamma_shape", c.gamma_shape},
          {"trials_per_point", c.trials_per_point}, {"samples_per_trial", c.samples_per_trial},
          {"seed", c.seed}};
}

}  // namespace

PipelineConfig pipeline_config_from_json(const Json& j, const fs::path& base_dir) {
  check_keys(j, "config",
             {"seed", "annotators", "segmenter", "snr_table", "anchors", "link_threshold", "output",
              "workers", "created_at"});
  PipelineConfig c;
  read_opt(j, "seed", c.seed, "config");
  read_opt(j, "link_threshold", c.link_threshold, "config");
  read_opt(j, "workers", c.workers, "config");
  if (c.workers < 0) throw Error("config.workers must be non-negative");
  if (!(c.link_threshold > 0.0 && c.link_threshold < 1.0)) {
    throw Error("config.link_threshold must lie in (0, 1)");
  }
  if (j.contains("created_at")) c.created_at = get<std::string>(j, "created_at", "config");
  if (j.contains("output")) c.output = resolve(base_dir, get<std::string>(j, "output", "config"));
  else c.output = base_dir / c.output;

  if (j.contains("segmenter")) {
    const Json& s = j["segmenter"];
    check_keys(s, "segmenter",
               {"silence_threshold_s", "extension_s", "max_merge_duration_s",
                "target_sample_rate_hz"});
    read_opt(s, "silence_threshold_s", c.segmenter.silence_threshold_s, "segmenter");
    read_opt(s, "extension_s", c.segmenter.extension_s, "segmenter");
    read_opt(s, "max_merge_duration_s", c.segmenter.max_merge_duration_s, "segmenter");
    read_opt(s, "target_sample_rate_hz", c.segmenter.target_sample_rate_hz, "segmenter");
  }
  c.segmenter.validate();

  if (j.contains("snr_table")) {
    const Json& t = j["snr_table"];
    check_keys(t, "snr_table", {"path", "build"});
    if (t.contains("path")) c.snr_table_path = resolve(base_dir, get<std::string>(t, "path", "snr_table"));
    if (t.contains("build")) c.snr_table_build = table_config_from_json(t["build"]);
    if (c.snr_table_path && !c.snr_table_build && !fs::exists(*c.snr_table_path)) {
      throw Error("snr table '" + c.snr_table_path->string() + "' does not exist");
    }
  }

  if (j.contains("anchors")) {
    c.anchors_path = resolve(base_dir, get<std::string>(j, "anchors", "config"));
    if (!fs::exists(*c.anchors_path)) {
      throw Error("anchor file '" + c.anchors_path->string() + "' does not exist");
    }
  }

  if (!j.contains("annotators")) throw Error("config.annotators is required");
  if (!j["annotators"].is_array()) throw Error("config.annotators must be a list");
  std::set<std::string> names;
  for (const Json& a : j["annotators"]) {
    const std::string where = "annotator";
    check_keys(a, where,
               {"name", "impl", "seed", "batch_size", "version", "command", "output_fields"});
    AnnotatorConfig ac;
    ac.name = get<std::string>(a, "name", where);
    if (!is_annotator_name(ac.name)) throw Error("unknown annotator '" + ac.name + "'");
    if (!names.insert(ac.name).second) throw Error("annotator '" + ac.name + "' listed twice");
    ac.impl = ac.name == "snr" ? "wada" : "stub";
    read_opt(a, "impl", ac.impl, where);
    ac.seed = derive_seed(c.seed, ac.name);
    read_opt(a, "seed", ac.seed, where);
    read_opt(a, "batch_size", ac.batch_size, where);
    read_opt(a, "version", ac.version, where);
    read_opt(a, "command", ac.command, where);
    read_opt(a, "output_fields", ac.output_fields, where);
    if (ac.batch_size <= 0) throw Error("annotator '" + ac.name + "': batch_size must be positive");
    if (ac.impl == "subprocess") {
      if (ac.command.empty()) throw Error("annotator '" + ac.name + "': subprocess needs a command");
    } else if (ac.impl == "wada") {
      if (ac.name != "snr") throw Error("impl 'wada' only serves the snr annotator");
    } else if (ac.impl == "stub") {
      if (ac.name == "snr") throw Error("the snr annotator has no stub; use impl 'wada'");
    } else {
      throw Error("annotator '" + ac.name + "': unknown impl '" + ac.impl + "'");
    }
    c.annotators.push_back(std::move(ac));
  }
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return pipeline_config_from_json(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

std::shared_ptr<const SnrTable> resolve_snr_table(const PipelineConfig& config) {
  SnrTableConfig build = config.snr_table_build.value_or(SnrTableConfig{});
  if (build.workers == 0) build.workers = config.workers;
  if (config.snr_table_path) {
    if (!config.snr_table_build) return std::make_shared<SnrTable>(load_snr_table(*config.snr_table_path));
    return std::make_shared<SnrTable>(load_or_build_snr_table(*config.snr_table_path, build));
  }
  if (const char* dir = std::getenv("PODCURATE_CACHE_DIR"); dir && *dir) {
    const std::string key = fnv1a_hex(table_config_to_json(build).dump());
    return std::make_shared<SnrTable>(
        load_or_build_snr_table(fs::path(dir) / ("snr_table_" + key + ".json"), build));
  }
  return std::make_shared<SnrTable>(build_snr_table(build));
}

AnnotatorRegistry build_registry(const PipelineConfig& config,
                                 std::shared_ptr<const SnrTable> table) {
  AnnotatorRegistry reg;
  for (const auto& a : config.annotators) {
    AnnotatorSpec spec = default_spec(a.name);
    spec.batch_size = a.batch_size;
    if (!a.output_fields.empty()) spec.output_fields = a.output_fields;
    std::shared_ptr<Annotator> impl;
    if (a.impl == "subprocess") {
      spec.version = "subprocess";
      impl = std::make_shared<SubprocessAnnotator>(a.command);
    } else if (a.impl == "wada") {
      if (!table) throw Error("the snr annotator needs an snr table");
      impl = std::make_shared<WadaSnrAnnotator>(table);
    } else {
      impl = make_stub_annotator(a.name, a.seed);
    }
    if (!a.version.empty()) spec.version = a.version;
    reg.register_adapter(std::move(spec), std::move(impl));
  }
  reg.set_embedder(make_stub_embedder());
  return reg;
}

Json config_run_metadata(const PipelineConfig& config, const AnnotatorRegistry& registry,
                         const SnrTable* table) {
  Json j;
  j["seed"] = config.seed;
  Json annotators = Json::array();
  for (const auto& a : config.annotators) {
    const auto* entry = registry.find(a.name);
    Json aj = {{"name", a.name}, {"impl", a.impl}, {"seed", a.seed}, {"batch_size", a.batch_size}};
    if (entry) aj["version"] = entry->spec.version;
    annotators.push_back(std::move(aj));
  }
  j["annotators"] = std::move(annotators);
  j["segmenter"] = {{"silence_threshold_s", config.segmenter.silence_threshold_s},
                    {"extension_s", config.segmenter.extension_s},
                    {"max_merge_duration_s", config.segmenter.max_merge_duration_s},
                    {"target_sample_rate_hz", config.segmenter.target_sample_rate_hz}};
  j["link_threshold"] = config.link_threshold;
  if (table) {
    j["snr_table"] = {{"gamma_shape", table->gamma_shape},
                      {"seed", table->seed},
                      {"trials_per_point", table->trials_per_point},
                      {"samples_per_trial", table->samples_per_trial},
                      {"min_db", table->min_db()},
                      {"max_db", table->max_db()},
                      {"hash", fnv1a_hex(snr_table_to_json(*table).dump())}};
  }
  if (config.created_at) {
    j["created_at"] = *config.created_at;
  } else if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    char* end = nullptr;
    const long long secs = std::strtoll(epoch, &end, 10);
    if (*end != '\0') throw Error("SOURCE_DATE_EPOCH must be an integer");
    const std::time_t t = static_cast<std::time_t>(secs);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    j["created_at"] = std::string(buf);
  }
  return j;
}

Manifest run_configured(const PipelineConfig& config, const fs::path& audio_dir,
                        RunReport* report, const Manifest* resume) {
  PipelineConfig c = config;
  if (c.workers <= 0) c.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto sources = discover_sources(audio_dir);
  std::shared_ptr<const SnrTable> table;
  for (const auto& a : c.annotators) {
    if (a.impl == "wada") table = resolve_snr_table(c);
  }
  const AnnotatorRegistry registry = build_registry(c, table);

  PipelineOptions options;
  options.segmenter = c.segmenter;
  options.link_threshold = c.link_threshold;
  options.workers = c.workers;
  if (c.anchors_path) options.anchors = read_anchor_file(*c.anchors_path);
  options.run_metadata = config_run_metadata(c, registry, table.get());
  return run_pipeline(sources, registry, options, report, resume);
}

}  // namespace podcurate
