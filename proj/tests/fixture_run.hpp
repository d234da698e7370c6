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

// Runs the synthetic fixture through the configured pipeline.

#ifndef PODCURATE_TESTS_FIXTURE_RUN_HPP_
#define PODCURATE_TESTS_FIXTURE_RUN_HPP_

#include <filesystem>

#include "podcurate/fixture.hpp"
#include "podcurate/pipeline.hpp"

namespace podcurate::testing {

struct FixtureRun {
  Manifest manifest;
  RunReport report;
};

inline FixtureRun run_fixture(const std::filesystem::path& dir, int workers = 1) {
  write_fixture(dir);
  PipelineConfig config = load_pipeline_config(dir / "config.json");
  config.workers = workers;
  config.created_at = "2026-01-01T00:00:00Z";
  FixtureRun run;
  run.manifest = run_configured(config, dir / "audio", &run.report);
  return run;
}

// Ground-truth utterance for a record: the one containing its midpoint.
inline const FixtureUtterance* truth_for(const SegmentRecord& r) {
  const auto i = fixture_utterance_at((r.start_s + r.end_s) / 2.0);
  return i ? &fixture_layout()[*i] : nullptr;
}

}  // namespace podcurate::testing

#endif  // PODCURATE_TESTS_FIXTURE_RUN_HPP_
