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

#ifndef PODCURATE_SUBPROCESS_HPP_
#define PODCURATE_SUBPROCESS_HPP_

#include <string>
#include <vector>

#include "podcurate/annotator.hpp"

namespace podcurate {

// Out-of-process adapter. One child is started per batch. It receives one
// JSON object per line on stdin:
//
//   {"segment_id": "...", "audio_path": "...", "start_s": 1.0, "end_s": 2.5}
//
// and must answer with one line per segment on stdout:
//
//   {"segment_id": "...", "status": "done", "fields": {...}}
//   {"segment_id": "...", "status": "failed", "reason": "..."}
//
// A non-zero exit status, a signal, or unparsable output fails the batch.
// stderr is passed through.
class SubprocessAnnotator : public Annotator {
 public:
  explicit SubprocessAnnotator(std::vector<std::string> argv);
  AnnotationBatchResult annotate(std::span<const SegmentInput> batch) override;

 private:
  std::vector<std::string> argv_;
};

// Runs argv with `input` on stdin; returns stdout and the raw wait status.
struct ProcessResult {
  std::string output;
  int exit_code = 0;    // valid when !signaled
  bool signaled = false;
};
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input);

}  // namespace podcurate

#endif  // PODCURATE_SUBPROCESS_HPP_
