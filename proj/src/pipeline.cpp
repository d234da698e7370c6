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

#include "podcurate/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "podcurate/audio.hpp"
#include "podcurate/error.hpp"

namespace podcurate {

namespace {

std::vector<std::string> stage_names(const AnnotatorRegistry& registry) {
  auto names = registry.names();
  names.emplace_back(kSpeakerLinkerName);
  return names;
}

Embedding unit(Embedding e) {
  double n = 0.0;
  for (double v : e) n += v * v;
  n = std::sqrt(n);
  if (!(n > 0.0) || !std::isfinite(n)) throw Error("degenerate speaker embedding");
  for (double& v : e) v /= n;
  return e;
}

}  // namespace

std::size_t RunReport::failed_segments() const {
  std::size_t n = 0;
  for (const auto& s : stages) n += s.failed;
  return n;
}

bool RunReport::complete() const { return skipped_sources.empty() && failed_segments() == 0; }

Json run_report_to_json(const RunReport& r) {
  Json j;
  j["sources_total"] = r.sources_total;
  j["sources_segmented"] = r.sources_segmented;
  j["skipped_sources"] = Json::array();
  for (const auto& [uri, why] : r.skipped_sources) {
    j["skipped_sources"].push_back({{"uri", uri}, {"reason", why}});
  }
  j["stages"] = Json::array();
  for (const auto& s : r.stages) {
    Json sj = {{"name", s.name}, {"done", s.done}, {"failed", s.failed}, {"skipped", s.skipped}};
    sj["failures"] = Json::array();
    for (const auto& [id, why] : s.failures) sj["failures"].push_back({{"segment_id", id}, {"reason", why}});
    j["stages"].push_back(std::move(sj));
  }
  j["warnings"] = r.warnings;
  j["status_counts"] = r.status_counts;
  j["complete"] = r.complete();
  return j;
}

std::string format_run_report(const RunReport& r) {
  std::ostringstream os;
  os << "sources: " << r.sources_total << " total, " << r.sources_segmented << " segmented, "
     << r.skipped_sources.size() << " skipped\n";
  for (const auto& [uri, why] : r.skipped_sources) os << "  skipped " << uri << ": " << why << "\n";
  for (const auto& s : r.stages) {
    os << s.name << ": " << s.done << " done, " << s.failed << " failed, " << s.skipped
       << " already done\n";
    for (const auto& [id, why] : s.failures) os << "  failed " << id << ": " << why << "\n";
  }
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  return os.str();
}

AnnotatorReport link_speakers(Manifest& manifest, SpeakerEmbedder* embedder, AudioAccess& audio,
                              std::span<const AnchorLabel> anchors, double threshold,
                              std::vector<std::string>* warnings) {
  AnnotatorReport report;
  report.name = kSpeakerLinkerName;
  auto is_done = [](const SegmentRecord& r) {
    auto it = r.annotation_status.find(kSpeakerLinkerName);
    return it != r.annotation_status.end() && it->second == AnnotationStatus::kDone;
  };
  std::vector<SegmentRecord*> todo;
  for (auto& r : manifest.records) {
    if (is_done(r)) {
      ++report.skipped;
    } else {
      todo.push_back(&r);
    }
  }
  if (todo.empty()) return report;

  auto fail = [&](SegmentRecord& r, const std::string& why) {
    r.annotation_status[kSpeakerLinkerName] = AnnotationStatus::kFailed;
    ++report.failed;
    report.failures.emplace_back(r.segment_id, why);
  };
  if (!embedder) {
    for (auto* r : todo) fail(*r, "no speaker embedder registered");
    return report;
  }

  // Centroids use every diarized record, finished or not, so a resumed run
  // sees the same clusters as a fresh one.
  std::map<SpeakerKey, std::vector<Embedding>> members;
  std::map<SpeakerKey, std::vector<std::string>> member_ids;
  std::map<std::string, std::string> embed_errors;
  for (const auto& r : manifest.records) {
    if (!r.local_speaker) continue;
    try {
      const AudioSource* src = manifest.find_source(r.source_id);
      if (!src) throw Error("unknown source");
      const auto slice = slice_audio(audio.samples(*src), {r.start_s, r.end_s, std::nullopt},
                                     audio.sample_rate_hz());
      SpeakerKey key{r.source_id, *r.local_speaker};
      members[key].push_back(unit(embedder->embed(slice, audio.sample_rate_hz())));
      member_ids[key].push_back(r.segment_id);
    } catch (const std::exception& e) {
      embed_errors[r.segment_id] = e.what();
    }
  }
  std::vector<LocalCluster> clusters;
  std::map<std::string, SpeakerKey> cluster_of;
  for (const auto& [key, embs] : members) {
    clusters.push_back({key.source_id, key.local_id, member_ids[key], update_global_centroid(embs)});
    for (const auto& id : member_ids[key]) cluster_of.emplace(id, key);
  }

  std::vector<AnchorLabel> usable;
  for (const auto& a : anchors) {
    if (!manifest.find_source(a.source_id)) continue;  // not part of this corpus
    if (!cluster_of.contains(a.segment_id)) {
      if (warnings) {
        warnings->push_back("anchor segment '" + a.segment_id + "' of source '" + a.source_id +
                            "' has no diarized record; ignored");
      }
      continue;
    }
    usable.push_back(a);
  }
  const SpeakerAssignment assignment = assign_global_speakers(clusters, usable, threshold);

  for (auto* r : todo) {
    if (!r->local_speaker) {
      fail(*r, "no local_speaker to link");
      continue;
    }
    if (auto e = embed_errors.find(r->segment_id); e != embed_errors.end()) {
      fail(*r, "embedding failed: " + e->second);
      continue;
    }
    const std::string& label = assignment.at(cluster_of.at(r->segment_id));
    merge_annotations(manifest, kSpeakerLinkerName, {{r->segment_id, {{"global_speaker", label}}}});
    ++report.done;
  }
  return report;
}

Manifest run_pipeline(std::span<const AudioSource> sources, const AnnotatorRegistry& registry,
                      const PipelineOptions& options, RunReport* report_out,
                      const Manifest* resume) {
  options.segmenter.validate();
  RunReport report;
  Manifest m = resume ? *resume : Manifest{};
  for (const auto& [k, v] : options.run_metadata.items()) m.run_metadata[k] = v;

  const auto stages = stage_names(registry);
  const auto* asr = registry.find("asr");
  SegmentProposer* proposer = asr ? dynamic_cast<SegmentProposer*>(asr->impl.get()) : nullptr;

  std::vector<const AudioSource*> ordered;
  std::set<std::string> ids;
  for (const auto& s : sources) {
    if (!ids.insert(s.source_id).second) throw Error("duplicate source_id '" + s.source_id + "'");
    ordered.push_back(&s);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const AudioSource* a, const AudioSource* b) { return a->source_id < b->source_id; });
  report.sources_total = ordered.size();

  MemoryAudioAccess audio(options.segmenter.target_sample_rate_hz);
  for (const AudioSource* given : ordered) {
    AudioSource src = *given;
    std::vector<float> samples;
    try {
      Waveform w = read_wav(src.uri);
      if (w.frames() == 0) throw Error("no audio frames");
      src.sample_rate_hz = w.sample_rate_hz;
      src.channel_count = w.channels;
      src.duration_s = w.duration_s();
      samples = normalize_audio(w, options.segmenter);
    } catch (const std::exception& e) {
      report.skipped_sources.emplace_back(src.uri, e.what());
      continue;
    }

    if (m.find_source(src.source_id)) {
      audio.add(src.source_id, std::move(samples));
      continue;
    }
    if (!proposer) {
      throw Error("segmenting new sources needs an asr adapter that proposes segments");
    }
    auto proposals = proposer->propose(src, samples, options.segmenter.target_sample_rate_hz);
    for (auto& p : proposals) {
      p.end_s = std::min(p.end_s, src.duration_s);
      p.start_s = std::min(p.start_s, p.end_s);
    }
    std::erase_if(proposals, [](const SegmentProposal& p) { return !(p.end_s > p.start_s); });
    const auto segments = adjust_boundaries(proposals, src.duration_s, options.segmenter);

    m.sources.push_back(src);
    for (std::size_t i = 0; i < segments.size(); ++i) {
      SegmentRecord r;
      r.segment_id = make_segment_id(src.source_id, i);
      r.source_id = src.source_id;
      r.start_s = segments[i].start_s;
      r.end_s = segments[i].end_s;
      for (const auto& s : stages) r.annotation_status[s] = AnnotationStatus::kPending;
      if (segments[i].text) {
        r.transcript = *segments[i].text;
        r.annotation_status["asr"] = AnnotationStatus::kDone;
      }
      m.records.push_back(std::move(r));
    }
    audio.add(src.source_id, std::move(samples));
    ++report.sources_segmented;
  }
  std::sort(m.sources.begin(), m.sources.end(),
            [](const AudioSource& a, const AudioSource& b) { return a.source_id < b.source_id; });
  m.sort_records();

  for (const auto& name : registry.names()) {
    report.stages.push_back(run_annotator(registry, name, m, audio, options.workers));
  }
  report.stages.push_back(link_speakers(m, registry.embedder(), audio, options.anchors,
                                        options.link_threshold, &report.warnings));

  for (const auto& r : m.records) {
    for (const auto& [stage, status] : r.annotation_status) {
      ++report.status_counts[stage][std::string(to_string(status))];
    }
  }
  validate_manifest(m);
  if (report_out) *report_out = std::move(report);
  return m;
}

std::vector<AudioSource> discover_sources(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("audio directory '" + dir.string() + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".wav") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<AudioSource> out;
  std::set<std::string> seen;
  for (const auto& f : files) {
    AudioSource s;
    s.source_id = f.stem().string();
    s.uri = f.string();
    if (!seen.insert(s.source_id).second) {
      throw Error("two audio files share the source id '" + s.source_id + "'");
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace podcurate
