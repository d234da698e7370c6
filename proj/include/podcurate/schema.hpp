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

#ifndef PODCURATE_SCHEMA_HPP_
#define PODCURATE_SCHEMA_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "podcurate/manifest.hpp"

namespace podcurate {

enum class FieldKind { kNumber, kBool, kString, kEnum, kEvents, kStatus };

struct FieldInfo {
  std::string_view name;
  FieldKind kind;
  // Allowed values for kEnum fields.
  std::span<const std::string_view> enum_values;
  // True when annotators may write the field through merge_annotations.
  bool annotatable;
};

// Every SegmentRecord field, in declaration order.
std::span<const FieldInfo> record_fields();
const FieldInfo* find_field(std::string_view name);

std::span<const std::string_view> emotion_labels();
std::span<const std::string_view> gender_labels();

// Scalar view of a record field, for the query engine and the reporters.
using FieldValue = std::variant<double, bool, std::string>;
std::optional<FieldValue> field_value(const SegmentRecord& r, std::string_view name);

}  // namespace podcurate

#endif  // PODCURATE_SCHEMA_HPP_
