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

#include "podcurate/annotator.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <set>
#include <thread>

#include "podcurate/audio.hpp"
#include "podcurate/error.hpp"
#include "podcurate/schema.hpp"

namespace podcurate {

namespace {

constexpr std::array<std::string_view, 8> kAnnotatorNames = {
    "asr",           "speech_music",      "diarization",       "gender_age",
    "emotion_category", "emotion_attributes", "sound_events", "snr"};

bool needs_run(const SegmentRecord& r, const std::string& name) {
  auto it = r.annotation_status.find(name);
  return it == r.annotation_status.end() || it->second != AnnotationStatus::kDone;
}

struct BatchOutcome {
  // Indexed like the batch.
  std::vector<SegmentResult> results;
};

}  // namespace

std::span<const std::string_view> annotator_names() { return kAnnotatorNames; }

bool is_annotator_name(std::string_view name) {
  return std::find(kAnnotatorNames.begin(), kAnnotatorNames.end(), name) != kAnnotatorNames.end();
}

void AnnotatorRegistry::register_adapter(AnnotatorSpec spec, std::shared_ptr<Annotator> impl) {
  if (!is_annotator_name(spec.name)) throw Error("unknown annotator slot '" + spec.name + "'");
  if (entries_.contains(spec.name)) throw Error("annotator '" + spec.name + "' already registered");
  if (!impl) throw Error("annotator '" + spec.name + "' has no implementation");
  if (spec.batch_size <= 0) throw Error("annotator '" + spec.name + "': batch_size must be positive");
  if (spec.output_fields.empty()) {
    throw Error("annotator '" + spec.name + "' declares no output fields");
  }
  std::set<std::string> own;
  for (const auto& f : spec.output_fields) {
    const FieldInfo* info = find_field(f);
    if (!info || !info->annotatable) {
      throw Error("annotator '" + spec.name + "' declares non-annotatable field '" + f + "'");
    }
    if (!own.insert(f).second) {
      throw Error("annotator '" + spec.name + "' lists field '" + f + "' twice");
    }
    for (const auto& [other, entry] : entries_) {
      const auto& of = entry.spec.output_fields;
      if (std::find(of.begin(), of.end(), f) != of.end()) {
        throw Error("annotator '" + spec.name + "' field '" + f + "' collides with annotator '" +
                    other + "'");
      }
    }
  }
  std::string name = spec.name;
  entries_.emplace(std::move(name), Entry{std::move(spec), std::move(impl)});
}

const AnnotatorRegistry::Entry* AnnotatorRegistry::find(std::string_view name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> AnnotatorRegistry::names() const {
  std::vector<std::string> out;
  for (auto n : kAnnotatorNames) {
    if (entries_.contains(n)) out.emplace_back(n);
  }
  return out;
}

const std::vector<float>& FileAudioAccess::samples(const AudioSource& source) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(source.source_id);
  if (it != cache_.end()) return it->second;
  Waveform w = read_wav(source.uri);
  auto [pos, _] = cache_.emplace(source.source_id, normalize_audio(w, config_));
  return pos->second;
}

const std::vector<float>& MemoryAudioAccess::samples(const AudioSource& source) {
  auto it = audio_.find(source.source_id);
  if (it == audio_.end()) throw Error("no audio for source '" + source.source_id + "'");
  return it->second;
}

AnnotatorReport run_annotator(const AnnotatorRegistry& registry, const std::string& name,
                              Manifest& manifest, AudioAccess& audio, int workers) {
  const AnnotatorRegistry::Entry* entry = registry.find(name);
  if (!entry) throw Error("annotator '" + name + "' is not registered");

  AnnotatorReport report;
  report.name = name;

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    if (needs_run(manifest.records[i], name)) {
      pending.push_back(i);
    } else {
      ++report.skipped;
    }
  }
  if (pending.empty()) return report;

  // Load every involved source up front; workers then only read.
  std::map<std::string, const std::vector<float>*> source_audio;
  std::map<std::string, std::string> source_errors;
  for (std::size_t idx : pending) {
    const auto& r = manifest.records[idx];
    if (source_audio.contains(r.source_id) || source_errors.contains(r.source_id)) continue;
    const AudioSource* src = manifest.find_source(r.source_id);
    try {
      if (!src) throw Error("unknown source '" + r.source_id + "'");
      source_audio[r.source_id] = &audio.samples(*src);
    } catch (const std::exception& e) {
      source_errors[r.source_id] = e.what();
    }
  }

  const auto batch_size = static_cast<std::size_t>(entry->spec.batch_size);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t k = 0; k < pending.size(); k += batch_size) {
    batches.emplace_back(pending.begin() + static_cast<std::ptrdiff_t>(k),
                         pending.begin() + static_cast<std::ptrdiff_t>(std::min(k + batch_size, pending.size())));
  }
  std::vector<BatchOutcome> outcomes(batches.size());
  const std::set<std::string> declared(entry->spec.output_fields.begin(),
                                       entry->spec.output_fields.end());

  auto run_batch = [&](std::size_t b) {
    const auto& idxs = batches[b];
    auto& results = outcomes[b].results;
    results.resize(idxs.size());
    std::vector<SegmentInput> inputs;
    std::vector<std::size_t> input_slot;  // position in idxs
    std::vector<std::vector<float>> slices(idxs.size());
    for (std::size_t k = 0; k < idxs.size(); ++k) {
      const SegmentRecord& r = manifest.records[idxs[k]];
      results[k].segment_id = r.segment_id;
      if (auto err = source_errors.find(r.source_id); err != source_errors.end()) {
        results[k].ok = false;
        results[k].reason = "audio unavailable: " + err->second;
        continue;
      }
      try {
        slices[k] = slice_audio(*source_audio.at(r.source_id), {r.start_s, r.end_s, std::nullopt},
                                audio.sample_rate_hz());
      } catch (const std::exception& e) {
        results[k].ok = false;
        results[k].reason = e.what();
        continue;
      }
      inputs.push_back({&r, manifest.find_source(r.source_id), slices[k], audio.sample_rate_hz()});
      input_slot.push_back(k);
    }
    if (inputs.empty()) return;

    AnnotationBatchResult out;
    std::string batch_error;
    try {
      out = entry->impl->annotate(inputs);
    } catch (const std::exception& e) {
      batch_error = e.what();
    } catch (...) {
      batch_error = "unknown exception";
    }
    if (batch_error.empty()) {
      // Every input must come back exactly once.
      std::map<std::string, const SegmentResult*> by_id;
      for (const auto& res : out) {
        if (!by_id.emplace(res.segment_id, &res).second) {
          batch_error = "adapter returned segment '" + res.segment_id + "' twice";
          break;
        }
      }
      if (batch_error.empty() && by_id.size() != inputs.size()) {
        for (const auto& [id, _] : by_id) {
          bool known = std::any_of(inputs.begin(), inputs.end(),
                                   [&](const SegmentInput& in) { return in.record->segment_id == id; });
          if (!known) {
            batch_error = "adapter returned unknown segment '" + id + "'";
            break;
          }
        }
      }
      if (batch_error.empty()) {
        for (std::size_t j = 0; j < inputs.size(); ++j) {
          SegmentResult& slot = results[input_slot[j]];
          auto it = by_id.find(inputs[j].record->segment_id);
          if (it == by_id.end()) {
            slot.ok = false;
            slot.reason = "adapter returned no result";
            continue;
          }
          slot = *it->second;
          if (!slot.ok) continue;
          for (const auto& [field, _] : slot.fields) {
            if (!declared.contains(field)) {
              slot.ok = false;
              slot.reason = "adapter wrote undeclared field '" + field + "'";
              slot.fields.clear();
              break;
            }
          }
        }
        return;
      }
    }
    for (std::size_t k : input_slot) {
      results[k].ok = false;
      results[k].reason = "batch failed: " + batch_error;
      results[k].fields.clear();
    }
  };

  const std::size_t threads =
      std::min<std::size_t>(batches.size(), static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t b = 0; b < batches.size(); ++b) run_batch(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < batches.size(); b = next++) run_batch(b);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t b = 0; b < batches.size(); ++b) {
    for (std::size_t k = 0; k < batches[b].size(); ++k) {
      SegmentRecord& rec = manifest.records[batches[b][k]];
      const SegmentResult& res = outcomes[b].results[k];
      bool ok = res.ok;
      std::string reason = res.reason;
      if (ok) {
        try {
          merge_annotations(manifest, name, {{rec.segment_id, res.fields}});
        } catch (const std::exception& e) {
          ok = false;
          reason = std::string("invalid output: ") + e.what();
        }
      }
      if (ok) {
        ++report.done;
      } else {
        rec.annotation_status[name] = AnnotationStatus::kFailed;
        ++report.failed;
        report.failures.emplace_back(rec.segment_id, reason);
      }
    }
  }
  return report;
}

}  // namespace podcurate
