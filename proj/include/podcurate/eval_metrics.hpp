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

#ifndef PODCURATE_EVAL_METRICS_HPP_
#define PODCURATE_EVAL_METRICS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace podcurate {

struct EditOps {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_length = 0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
  double rate() const {
    return static_cast<double>(errors()) / static_cast<double>(reference_length);
  }
  bool operator==(const EditOps&) const = default;
};

// Unit-cost Levenshtein alignment. Among equal-cost alignments the backtrace
// prefers substitution, then deletion, then insertion. Throws on an empty
// reference.
EditOps edit_ops(std::span<const std::string> ref, std::span<const std::string> hyp);

struct TextNormalization {
  bool lowercase = true;
  bool strip_punctuation = true;
  bool collapse_whitespace = true;
  // CER only: drop the spaces between words before counting characters.
  bool cer_exclude_spaces = true;
};

// ASCII lowercasing and punctuation removal; other UTF-8 passes through.
std::string normalize_text(std::string_view text, const TextNormalization& config = {});
std::vector<std::string> word_tokens(std::string_view text, const TextNormalization& config = {});
// One token per UTF-8 code point.
std::vector<std::string> char_tokens(std::string_view text, const TextNormalization& config = {});

double wer(std::string_view ref, std::string_view hyp, const TextNormalization& config = {});
double cer(std::string_view ref, std::string_view hyp, const TextNormalization& config = {});

// Corpus-level rates: summed edits over summed reference lengths.
EditOps corpus_word_ops(std::span<const std::string> refs, std::span<const std::string> hyps,
                        const TextNormalization& config = {});
EditOps corpus_char_ops(std::span<const std::string> refs, std::span<const std::string> hyps,
                        const TextNormalization& config = {});

enum class TrialKind { kGenuine, kImpostor };

struct TrialScore {
  TrialKind kind = TrialKind::kGenuine;
  double score = 0.0;
};

struct EerResult {
  double threshold = 0.0;
  double eer = 0.0;
  // Interpolated false-acceptance / false-rejection at `threshold`.
  double far = 0.0;
  double frr = 0.0;
};

// Operating points are taken at every distinct score t with
//   FAR(t) = #{impostor >= t} / #impostor,  FRR(t) = #{genuine < t} / #genuine,
// plus t = +inf. Neighbouring points on the lower convex hull of that ROC are
// joined by straight lines (in both error rates and threshold) and the
// crossing with FAR = FRR is returned. On a plateau the smallest threshold
// wins.
EerResult eer_threshold(std::span<const TrialScore> scores);

// Fraction of similarities >= threshold.
double sv_acceptance(std::span<const double> similarities, double threshold);

}  // namespace podcurate

#endif  // PODCURATE_EVAL_METRICS_HPP_
