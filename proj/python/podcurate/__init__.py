# Copyright 2026 The podcurate Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Speech corpus curation tools backed by a C++ core."""

from podcurate._core import (
    Error,
    FilterSyntaxError,
    SnrTable,
    adjust_boundaries,
    canonical_filter,
    cer,
    cosine_similarity,
    eer,
    filter_manifest,
    gain_invariant_statistic,
    manifest_records,
    manifest_summary,
    sv_acceptance,
    wer,
)

__version__ = "0.1.0"

__all__ = [
    "Error",
    "FilterSyntaxError",
    "SnrTable",
    "adjust_boundaries",
    "canonical_filter",
    "cer",
    "cosine_similarity",
    "eer",
    "filter_manifest",
    "gain_invariant_statistic",
    "manifest_records",
    "manifest_summary",
    "sv_acceptance",
    "wer",
]
