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

#include "podcurate/speaker_linker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "podcurate/error.hpp"

namespace podcurate {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("embedding dimensions differ");
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw Error("cosine similarity of a zero vector");
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

Embedding update_global_centroid(std::span<const Embedding> members) {
  if (members.empty()) throw Error("centroid of an empty member set");
  const std::size_t dim = members.front().size();
  Embedding mean(dim, 0.0);
  for (const auto& m : members) {
    if (m.size() != dim) throw Error("embedding dimensions differ");
    for (std::size_t i = 0; i < dim; ++i) mean[i] += m[i];
  }
  for (double& v : mean) v /= static_cast<double>(members.size());
  const double n = norm(mean);
  if (!(n > 1e-12)) throw Error("degenerate centroid: members cancel to the zero vector");
  for (double& v : mean) v /= n;
  return mean;
}

std::string unlinked_speaker_label(const std::string& source_id, std::int64_t local_id) {
  return "unk_" + source_id + "_" + std::to_string(local_id);
}

SpeakerAssignment assign_global_speakers(std::span<const LocalCluster> clusters,
                                         std::span<const AnchorLabel> anchors, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error("link threshold must lie in (0, 1)");

  std::vector<const LocalCluster*> order;
  std::set<SpeakerKey> seen;
  for (const auto& c : clusters) {
    if (c.segment_ids.empty()) {
      throw Error("cluster " + c.source_id + "/" + std::to_string(c.local_id) + " has no segments");
    }
    if (std::abs(norm(c.centroid) - 1.0) > 1e-6) {
      throw Error("cluster " + c.source_id + "/" + std::to_string(c.local_id) +
                  " centroid is not unit norm");
    }
    if (!seen.insert({c.source_id, c.local_id}).second) {
      throw Error("duplicate cluster " + c.source_id + "/" + std::to_string(c.local_id));
    }
    order.push_back(&c);
  }
  std::sort(order.begin(), order.end(), [](const LocalCluster* a, const LocalCluster* b) {
    return SpeakerKey{a->source_id, a->local_id} < SpeakerKey{b->source_id, b->local_id};
  });

  SpeakerAssignment out;
  std::map<std::string, std::vector<Embedding>> members;  // global label -> member centroids

  std::set<std::string> anchored_sources;
  std::vector<AnchorLabel> sorted_anchors(anchors.begin(), anchors.end());
  std::sort(sorted_anchors.begin(), sorted_anchors.end(),
            [](const AnchorLabel& a, const AnchorLabel& b) { return a.source_id < b.source_id; });
  for (const auto& a : sorted_anchors) {
    if (!anchored_sources.insert(a.source_id).second) {
      throw Error("more than one anchor for source '" + a.source_id + "'");
    }
    const LocalCluster* owner = nullptr;
    for (const LocalCluster* c : order) {
      if (c->source_id != a.source_id) continue;
      if (std::find(c->segment_ids.begin(), c->segment_ids.end(), a.segment_id) !=
          c->segment_ids.end()) {
        owner = c;
        break;
      }
    }
    if (!owner) {
      throw Error("anchor segment '" + a.segment_id + "' of source '" + a.source_id +
                  "' belongs to no cluster");
    }
    out[{owner->source_id, owner->local_id}] = a.global_speaker;
    members[a.global_speaker].push_back(owner->centroid);
  }

  std::map<std::string, Embedding> centroids;
  for (const auto& [label, ms] : members) centroids[label] = update_global_centroid(ms);

  for (const LocalCluster* c : order) {
    SpeakerKey key{c->source_id, c->local_id};
    if (out.contains(key)) continue;
    const std::string* best_label = nullptr;
    double best = -2.0;
    for (const auto& [label, centroid] : centroids) {
      const double s = cosine_similarity(c->centroid, centroid);
      if (s > best) {
        best = s;
        best_label = &label;
      }
    }
    if (best_label && best >= threshold) {
      const std::string label = *best_label;
      out[key] = label;
      members[label].push_back(c->centroid);
      centroids[label] = update_global_centroid(members[label]);
    } else {
      out[key] = unlinked_speaker_label(c->source_id, c->local_id);
    }
  }
  return out;
}

std::vector<AnchorLabel> read_anchor_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open anchor file '" + path.string() + "'");
  std::vector<AnchorLabel> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      out.push_back({j.at("source_id").get<std::string>(), j.at("segment_id").get<std::string>(),
                     j.at("global_speaker").get<std::string>()});
    } catch (const nlohmann::json::exception&) {
      throw Error(path.string() + ": malformed anchor at line " + std::to_string(line_no));
    }
  }
  return out;
}

void write_anchor_file(const std::filesystem::path& path, std::span<const AnchorLabel> anchors) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  for (const auto& a : anchors) {
    nlohmann::json j;
    j["source_id"] = a.source_id;
    j["segment_id"] = a.segment_id;
    j["global_speaker"] = a.global_speaker;
    out << j.dump() << '\n';
  }
}

}  // namespace podcurate
