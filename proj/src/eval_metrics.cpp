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

#include "podcurate/eval_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iterator>
#include <limits>

#include "podcurate/error.hpp"

namespace podcurate {

EditOps edit_ops(std::span<const std::string> ref, std::span<const std::string> hyp) {
  if (ref.empty()) throw Error("undefined rate: empty reference");
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> cost((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return cost[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  EditOps ops;
  ops.reference_length = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        if (!same) ++ops.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++ops.deletions;
      --i;
    } else {
      ++ops.insertions;
      --j;
    }
  }
  return ops;
}

std::string normalize_text(std::string_view text, const TextNormalization& config) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isspace(c)) {
      if (config.collapse_whitespace) {
        pending_space = !out.empty();
      } else {
        out.push_back(' ');
      }
      continue;
    }
    if (config.strip_punctuation && c < 0x80 && std::ispunct(c)) continue;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(config.lowercase && c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
  }
  return out;
}

std::vector<std::string> word_tokens(std::string_view text, const TextNormalization& config) {
  const std::string norm = normalize_text(text, config);
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < norm.size()) {
    while (pos < norm.size() && norm[pos] == ' ') ++pos;
    std::size_t end = norm.find(' ', pos);
    if (end == std::string::npos) end = norm.size();
    if (end > pos) words.emplace_back(norm.substr(pos, end - pos));
    pos = end;
  }
  return words;
}

std::vector<std::string> char_tokens(std::string_view text, const TextNormalization& config) {
  const std::string norm = normalize_text(text, config);
  std::vector<std::string> chars;
  for (std::size_t i = 0; i < norm.size();) {
    const auto lead = static_cast<unsigned char>(norm[i]);
    std::size_t len = 1;
    if (lead >= 0xF0) len = 4;
    else if (lead >= 0xE0) len = 3;
    else if (lead >= 0xC0) len = 2;
    len = std::min(len, norm.size() - i);
    if (!(config.cer_exclude_spaces && norm[i] == ' ')) chars.emplace_back(norm.substr(i, len));
    i += len;
  }
  return chars;
}

double wer(std::string_view ref, std::string_view hyp, const TextNormalization& config) {
  const auto r = word_tokens(ref, config);
  if (r.empty()) throw Error("undefined rate: reference is empty after normalization");
  return edit_ops(r, word_tokens(hyp, config)).rate();
}

double cer(std::string_view ref, std::string_view hyp, const TextNormalization& config) {
  const auto r = char_tokens(ref, config);
  if (r.empty()) throw Error("undefined rate: reference is empty after normalization");
  return edit_ops(r, char_tokens(hyp, config)).rate();
}

namespace {

template <typename Tokenize>
EditOps corpus_ops(std::span<const std::string> refs, std::span<const std::string> hyps,
                   Tokenize tokenize) {
  if (refs.size() != hyps.size()) {
    throw Error("reference and hypothesis counts differ (" + std::to_string(refs.size()) +
                " vs " + std::to_string(hyps.size()) + ")");
  }
  EditOps total;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    const auto r = tokenize(refs[k]);
    if (r.empty()) {
      throw Error("undefined rate: reference " + std::to_string(k + 1) +
                  " is empty after normalization");
    }
    const EditOps e = edit_ops(r, tokenize(hyps[k]));
    total.substitutions += e.substitutions;
    total.deletions += e.deletions;
    total.insertions += e.insertions;
    total.reference_length += e.reference_length;
  }
  if (total.reference_length == 0) throw Error("undefined rate: no references");
  return total;
}

}  // namespace

EditOps corpus_word_ops(std::span<const std::string> refs, std::span<const std::string> hyps,
                        const TextNormalization& config) {
  return corpus_ops(refs, hyps, [&](const std::string& s) { return word_tokens(s, config); });
}

EditOps corpus_char_ops(std::span<const std::string> refs, std::span<const std::string> hyps,
                        const TextNormalization& config) {
  return corpus_ops(refs, hyps, [&](const std::string& s) { return char_tokens(s, config); });
}

EerResult eer_threshold(std::span<const TrialScore> scores) {
  std::vector<double> genuine, impostor;
  for (const auto& s : scores) {
    if (!std::isfinite(s.score)) throw Error("trial score must be finite");
    (s.kind == TrialKind::kGenuine ? genuine : impostor).push_back(s.score);
  }
  if (genuine.empty() || impostor.empty()) {
    throw Error("EER needs at least one genuine and one impostor trial");
  }
  std::sort(genuine.begin(), genuine.end());
  std::sort(impostor.begin(), impostor.end());

  std::vector<double> thresholds;
  thresholds.reserve(genuine.size() + impostor.size() + 1);
  std::merge(genuine.begin(), genuine.end(), impostor.begin(), impostor.end(),
             std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  // Reject-everything point, just above the largest score.
  thresholds.push_back(std::nextafter(thresholds.back(), std::numeric_limits<double>::infinity()));

  struct Point {
    double far, frr, t;
  };
  const double ng = static_cast<double>(genuine.size());
  const double ni = static_cast<double>(impostor.size());
  std::vector<Point> hull;
  for (double t : thresholds) {
    const auto accepted_imp =
        impostor.end() - std::lower_bound(impostor.begin(), impostor.end(), t);
    const auto rejected_gen = std::lower_bound(genuine.begin(), genuine.end(), t) - genuine.begin();
    Point p{static_cast<double>(accepted_imp) / ni, static_cast<double>(rejected_gen) / ng, t};
    // Lower-left convex hull; collinear sweep points are kept so that
    // threshold interpolation runs between real neighbours when possible.
    while (hull.size() >= 2) {
      const Point& a = hull[hull.size() - 2];
      const Point& b = hull.back();
      const double cross = (b.far - a.far) * (p.frr - a.frr) - (b.frr - a.frr) * (p.far - a.far);
      if (cross > 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(p);
  }

  for (std::size_t k = 0; k < hull.size(); ++k) {
    const Point& b = hull[k];
    const double db = b.far - b.frr;
    if (db > 0.0) continue;
    if (db == 0.0 || k == 0) return {b.t, b.far, b.far, b.frr};
    const Point& a = hull[k - 1];
    const double da = a.far - a.frr;
    const double alpha = da / (da - db);
    EerResult r;
    r.far = a.far + alpha * (b.far - a.far);
    r.frr = a.frr + alpha * (b.frr - a.frr);
    r.threshold = a.t + alpha * (b.t - a.t);
    r.eer = 0.5 * (r.far + r.frr);
    return r;
  }
  // Unreachable: the final point always has FAR 0 and FRR 1.
  throw Error("EER crossing not found");
}

double sv_acceptance(std::span<const double> similarities, double threshold) {
  if (similarities.empty()) throw Error("acceptance rate needs at least one trial");
  const auto accepted = std::count_if(similarities.begin(), similarities.end(),
                                      [&](double s) { return s >= threshold; });
  return static_cast<double>(accepted) / static_cast<double>(similarities.size());
}

}  // namespace podcurate
