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

#ifndef PODCURATE_QUERY_HPP_
#define PODCURATE_QUERY_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "podcurate/error.hpp"
#include "podcurate/manifest.hpp"

namespace podcurate {

// Filter language over manifest records.
//
//   expr     := or_expr
//   or_expr  := and_expr ("or" and_expr)*
//   and_expr := unary ("and" unary)*
//   unary    := "not" unary | "(" expr ")" | atom
//   atom     := field cmp literal
//             | field "contains" string
//             | "has" "(" field ")"
//             | "has_event" "(" string ")"
//             | "event_score" "(" string ")" cmp number
//   cmp      := "<" | "<=" | ">" | ">=" | "==" | "!="
//   literal  := number | string | "true" | "false"
//
// Strings are single-quoted ('it\'s'); keywords are case-insensitive; field
// names and event labels are not. A comparison on an absent field is false,
// so `not snr_db > 0` is true for a record without snr_db. Use has(field) to
// test presence explicitly.

enum class CmpOp { kLt, kLe, kGt, kGe, kEq, kNe };

using Literal = std::variant<double, bool, std::string>;

struct FilterExpr {
  enum class Kind { kCompare, kContains, kHas, kHasEvent, kEventScore, kAnd, kOr, kNot };

  Kind kind = Kind::kHas;
  // Field name, or the event label for kHasEvent / kEventScore.
  std::string name;
  CmpOp op = CmpOp::kEq;
  Literal literal;
  std::vector<FilterExpr> children;

  bool operator==(const FilterExpr&) const = default;

  static FilterExpr compare(std::string field, CmpOp op, Literal value);
  static FilterExpr contains(std::string field, std::string text);
  static FilterExpr has(std::string field);
  static FilterExpr has_event(std::string label);
  static FilterExpr event_score(std::string label, CmpOp op, double value);
  static FilterExpr both(FilterExpr a, FilterExpr b);
  static FilterExpr either(FilterExpr a, FilterExpr b);
  static FilterExpr negate(FilterExpr a);
};

class FilterSyntaxError : public Error {
 public:
  FilterSyntaxError(const std::string& what, std::size_t offset, std::vector<std::string> expected)
      : Error(what), offset_(offset), expected_(std::move(expected)) {}
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

// Unknown fields and kind mismatches (e.g. a string compared with <).
class FilterTypeError : public Error {
 public:
  using Error::Error;
};

FilterExpr parse_filter(std::string_view text);
// Canonical text; parse_filter(print_filter(e)) == e.
std::string print_filter(const FilterExpr& e);
// Throws FilterTypeError. parse_filter already calls this.
void type_check(const FilterExpr& e);

bool evaluate(const FilterExpr& e, const SegmentRecord& r);

// Records matching `e`, in order, with the same sources. run_metadata gains
// the filter text and the hash of the parent manifest.
Manifest select(const Manifest& m, const FilterExpr& e);
Manifest select(const Manifest& m, const FilterExpr& e, std::string_view filter_text);

std::string_view to_string(CmpOp op);

}  // namespace podcurate

#endif  // PODCURATE_QUERY_HPP_
