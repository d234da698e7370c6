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

#include "podcurate/query.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

#include "podcurate/schema.hpp"

namespace podcurate {

FilterExpr FilterExpr::compare(std::string field, CmpOp op, Literal value) {
  FilterExpr e;
  e.kind = Kind::kCompare;
  e.name = std::move(field);
  e.op = op;
  e.literal = std::move(value);
  return e;
}

FilterExpr FilterExpr::contains(std::string field, std::string text) {
  FilterExpr e;
  e.kind = Kind::kContains;
  e.name = std::move(field);
  e.literal = std::move(text);
  return e;
}

FilterExpr FilterExpr::has(std::string field) {
  FilterExpr e;
  e.kind = Kind::kHas;
  e.name = std::move(field);
  return e;
}

FilterExpr FilterExpr::has_event(std::string label) {
  FilterExpr e;
  e.kind = Kind::kHasEvent;
  e.name = std::move(label);
  return e;
}

FilterExpr FilterExpr::event_score(std::string label, CmpOp op, double value) {
  FilterExpr e;
  e.kind = Kind::kEventScore;
  e.name = std::move(label);
  e.op = op;
  e.literal = value;
  return e;
}

FilterExpr FilterExpr::both(FilterExpr a, FilterExpr b) {
  FilterExpr e;
  e.kind = Kind::kAnd;
  e.children.push_back(std::move(a));
  e.children.push_back(std::move(b));
  return e;
}

FilterExpr FilterExpr::either(FilterExpr a, FilterExpr b) {
  FilterExpr e;
  e.kind = Kind::kOr;
  e.children.push_back(std::move(a));
  e.children.push_back(std::move(b));
  return e;
}

FilterExpr FilterExpr::negate(FilterExpr a) {
  FilterExpr e;
  e.kind = Kind::kNot;
  e.children.push_back(std::move(a));
  return e;
}

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
    case CmpOp::kEq: return "==";
    case CmpOp::kNe: return "!=";
  }
  return "==";
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  kIdent, kNumber, kString, kLParen, kRParen, kOp, kAnd, kOr, kNot, kHas, kHasEvent,
  kEventScore, kContains, kTrue, kFalse, kEnd
};

struct Token {
  Tok type;
  std::size_t offset;
  std::string text;  // identifier / unescaped string / operator spelling
  double number = 0.0;
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string describe(const Token& t) {
  switch (t.type) {
    case Tok::kEnd: return "end of input";
    case Tok::kString: return "string '" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ >= s_.size()) {
        out.push_back({Tok::kEnd, pos_, ""});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected = {}) const {
    throw FilterSyntaxError("syntax error at byte " + std::to_string(pos_) + ": " + msg, pos_,
                            std::move(expected));
  }

  Token next() {
    const std::size_t start = pos_;
    const char c = s_[pos_];
    if (c == '(') return ++pos_, Token{Tok::kLParen, start, "("};
    if (c == ')') return ++pos_, Token{Tok::kRParen, start, ")"};
    if (c == '<' || c == '>' || c == '=' || c == '!') {
      const bool eq_next = pos_ + 1 < s_.size() && s_[pos_ + 1] == '=';
      if ((c == '=' || c == '!') && !eq_next) fail("expected '=' after '" + std::string(1, c) + "'", {"=="});
      pos_ += eq_next ? 2 : 1;
      return Token{Tok::kOp, start, std::string(s_.substr(start, pos_ - start))};
    }
    if (c == '\'') return string_literal();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      return number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      std::string word(s_.substr(start, pos_ - start));
      const std::string kw = lower(word);
      Tok t = Tok::kIdent;
      if (kw == "and") t = Tok::kAnd;
      else if (kw == "or") t = Tok::kOr;
      else if (kw == "not") t = Tok::kNot;
      else if (kw == "has") t = Tok::kHas;
      else if (kw == "has_event") t = Tok::kHasEvent;
      else if (kw == "event_score") t = Tok::kEventScore;
      else if (kw == "contains") t = Tok::kContains;
      else if (kw == "true") t = Tok::kTrue;
      else if (kw == "false") t = Tok::kFalse;
      return Token{t, start, word};
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Token string_literal() {
    const std::size_t start = pos_++;
    std::string out;
    while (pos_ < s_.size()) {
      const char c = s_[pos_++];
      if (c == '\'') return Token{Tok::kString, start, out};
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        const char e = s_[pos_++];
        if (e != '\'' && e != '\\') fail("invalid escape in string literal");
        out.push_back(e);
        continue;
      }
      out.push_back(c);
    }
    pos_ = start;
    fail("unterminated string literal", {"'"});
  }

  Token number() {
    const std::size_t start = pos_;
    std::size_t i = pos_;
    if (s_[i] == '+' || s_[i] == '-') ++i;
    const char* first = s_.data() + i;
    const char* last = s_.data() + s_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) fail("malformed number", {"number"});
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    if (pos_ < s_.size() &&
        (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      fail("malformed number", {"number"});
    }
    if (!std::isfinite(v)) fail("number out of range", {"number"});
    if (s_[start] == '-') v = -v;
    return Token{Tok::kNumber, start, std::string(s_.substr(start, pos_ - start)), v};
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  FilterExpr run() {
    FilterExpr e = or_expr();
    if (peek().type != Tok::kEnd) fail({"'and'", "'or'", "end of input"});
    return e;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& take() { return toks_[i_++]; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string msg = "syntax error at byte " + std::to_string(t.offset) + ": expected ";
    if (expected.size() == 1) {
      msg += expected[0];
    } else {
      msg += "one of {";
      for (std::size_t k = 0; k < expected.size(); ++k) msg += (k ? ", " : "") + expected[k];
      msg += "}";
    }
    msg += ", found " + describe(t);
    throw FilterSyntaxError(msg, t.offset, std::move(expected));
  }

  const Token& expect(Tok type, const char* what) {
    if (peek().type != type) fail({what});
    return take();
  }

  FilterExpr or_expr() {
    FilterExpr e = and_expr();
    while (peek().type == Tok::kOr) {
      take();
      e = FilterExpr::either(std::move(e), and_expr());
    }
    return e;
  }

  FilterExpr and_expr() {
    FilterExpr e = unary();
    while (peek().type == Tok::kAnd) {
      take();
      e = FilterExpr::both(std::move(e), unary());
    }
    return e;
  }

  FilterExpr unary() {
    switch (peek().type) {
      case Tok::kNot:
        take();
        return FilterExpr::negate(unary());
      case Tok::kLParen: {
        take();
        FilterExpr e = or_expr();
        expect(Tok::kRParen, "')'");
        return e;
      }
      default:
        return atom();
    }
  }

  CmpOp cmp_op() {
    const Token& t = peek();
    if (t.type != Tok::kOp) fail({"'<'", "'<='", "'>'", "'>='", "'=='", "'!='"});
    take();
    if (t.text == "<") return CmpOp::kLt;
    if (t.text == "<=") return CmpOp::kLe;
    if (t.text == ">") return CmpOp::kGt;
    if (t.text == ">=") return CmpOp::kGe;
    if (t.text == "==") return CmpOp::kEq;
    return CmpOp::kNe;
  }

  FilterExpr atom() {
    const Token& t = peek();
    switch (t.type) {
      case Tok::kHas: {
        take();
        expect(Tok::kLParen, "'('");
        std::string field = expect(Tok::kIdent, "field name").text;
        expect(Tok::kRParen, "')'");
        return FilterExpr::has(std::move(field));
      }
      case Tok::kHasEvent: {
        take();
        expect(Tok::kLParen, "'('");
        std::string label = expect(Tok::kString, "quoted event label").text;
        expect(Tok::kRParen, "')'");
        return FilterExpr::has_event(std::move(label));
      }
      case Tok::kEventScore: {
        take();
        expect(Tok::kLParen, "'('");
        std::string label = expect(Tok::kString, "quoted event label").text;
        expect(Tok::kRParen, "')'");
        CmpOp op = cmp_op();
        double v = expect(Tok::kNumber, "number").number;
        return FilterExpr::event_score(std::move(label), op, v);
      }
      case Tok::kIdent: {
        std::string field = take().text;
        if (peek().type == Tok::kContains) {
          take();
          return FilterExpr::contains(std::move(field), expect(Tok::kString, "quoted string").text);
        }
        CmpOp op = cmp_op();
        const Token& lit = peek();
        switch (lit.type) {
          case Tok::kNumber: take(); return FilterExpr::compare(std::move(field), op, lit.number);
          case Tok::kString: take(); return FilterExpr::compare(std::move(field), op, lit.text);
          case Tok::kTrue: take(); return FilterExpr::compare(std::move(field), op, true);
          case Tok::kFalse: take(); return FilterExpr::compare(std::move(field), op, false);
          default: fail({"number", "quoted string", "'true'", "'false'"});
        }
      }
      default:
        fail({"field name", "'not'", "'('", "'has'", "'has_event'", "'event_score'"});
    }
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string number_text(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string literal_text(const Literal& l) {
  if (const auto* d = std::get_if<double>(&l)) return number_text(*d);
  if (const auto* b = std::get_if<bool>(&l)) return *b ? "true" : "false";
  return quote(std::get<std::string>(l));
}

template <typename T>
bool apply_cmp(CmpOp op, const T& a, const T& b) {
  switch (op) {
    case CmpOp::kLt: return a < b;
    case CmpOp::kLe: return a <= b;
    case CmpOp::kGt: return a > b;
    case CmpOp::kGe: return a >= b;
    case CmpOp::kEq: return a == b;
    case CmpOp::kNe: return a != b;
  }
  return false;
}

bool field_present(const SegmentRecord& r, const std::string& name) {
  if (name == "sound_events") return r.sound_events.has_value();
  if (name == "annotation_status") return !r.annotation_status.empty();
  return field_value(r, name).has_value();
}

}  // namespace

FilterExpr parse_filter(std::string_view text) {
  FilterExpr e = Parser(Lexer(text).run()).run();
  type_check(e);
  return e;
}

std::string print_filter(const FilterExpr& e) {
  using K = FilterExpr::Kind;
  auto child = [](const FilterExpr& c) {
    std::string s = print_filter(c);
    if (c.kind == K::kAnd || c.kind == K::kOr) return "(" + s + ")";
    return s;
  };
  switch (e.kind) {
    case K::kCompare:
      return e.name + " " + std::string(to_string(e.op)) + " " + literal_text(e.literal);
    case K::kContains:
      return e.name + " contains " + literal_text(e.literal);
    case K::kHas:
      return "has(" + e.name + ")";
    case K::kHasEvent:
      return "has_event(" + quote(e.name) + ")";
    case K::kEventScore:
      return "event_score(" + quote(e.name) + ") " + std::string(to_string(e.op)) + " " +
             literal_text(e.literal);
    case K::kAnd:
      return child(e.children.at(0)) + " and " + child(e.children.at(1));
    case K::kOr:
      return child(e.children.at(0)) + " or " + child(e.children.at(1));
    case K::kNot:
      return "not " + child(e.children.at(0));
  }
  return {};
}

void type_check(const FilterExpr& e) {
  using K = FilterExpr::Kind;
  switch (e.kind) {
    case K::kAnd:
    case K::kOr:
      if (e.children.size() != 2) throw FilterTypeError("binary node needs two operands");
      for (const auto& c : e.children) type_check(c);
      return;
    case K::kNot:
      if (e.children.size() != 1) throw FilterTypeError("'not' needs one operand");
      type_check(e.children[0]);
      return;
    case K::kHasEvent:
      return;
    case K::kEventScore:
      if (!std::holds_alternative<double>(e.literal)) {
        throw FilterTypeError("event_score must be compared with a number");
      }
      return;
    default:
      break;
  }

  const FieldInfo* f = find_field(e.name);
  if (!f) throw FilterTypeError("unknown field '" + e.name + "'");
  if (e.kind == K::kHas) return;
  if (e.kind == K::kContains) {
    if (f->kind != FieldKind::kString) {
      throw FilterTypeError("'contains' needs a text field; '" + e.name + "' is not text");
    }
    if (!std::holds_alternative<std::string>(e.literal)) {
      throw FilterTypeError("'contains' needs a quoted string");
    }
    return;
  }

  const bool equality = e.op == CmpOp::kEq || e.op == CmpOp::kNe;
  const std::string op(to_string(e.op));
  switch (f->kind) {
    case FieldKind::kNumber:
      if (!std::holds_alternative<double>(e.literal)) {
        throw FilterTypeError("type mismatch: numeric field '" + e.name +
                              "' compared with a non-number");
      }
      return;
    case FieldKind::kBool:
      if (!std::holds_alternative<bool>(e.literal)) {
        throw FilterTypeError("type mismatch: boolean field '" + e.name +
                              "' needs true or false");
      }
      if (!equality) throw FilterTypeError("type mismatch: boolean field '" + e.name + "' with " + op);
      return;
    case FieldKind::kString:
    case FieldKind::kEnum: {
      const auto* s = std::get_if<std::string>(&e.literal);
      if (!s) {
        throw FilterTypeError("type mismatch: field '" + e.name + "' needs a quoted string");
      }
      if (!equality) {
        throw FilterTypeError("type mismatch: string field '" + e.name + "' cannot use " + op);
      }
      if (f->kind == FieldKind::kEnum &&
          std::find(f->enum_values.begin(), f->enum_values.end(), *s) == f->enum_values.end()) {
        std::string allowed;
        for (auto v : f->enum_values) allowed += (allowed.empty() ? "" : ", ") + std::string(v);
        throw FilterTypeError("'" + *s + "' is not a valid " + e.name + " (expected one of " +
                              allowed + ")");
      }
      return;
    }
    case FieldKind::kEvents:
      throw FilterTypeError("field 'sound_events' cannot be compared; use has_event() or "
                            "event_score()");
    case FieldKind::kStatus:
      throw FilterTypeError("field 'annotation_status' cannot be compared");
  }
}

bool evaluate(const FilterExpr& e, const SegmentRecord& r) {
  using K = FilterExpr::Kind;
  switch (e.kind) {
    case K::kAnd: return evaluate(e.children[0], r) && evaluate(e.children[1], r);
    case K::kOr: return evaluate(e.children[0], r) || evaluate(e.children[1], r);
    case K::kNot: return !evaluate(e.children[0], r);
    case K::kHas: return field_present(r, e.name);
    case K::kHasEvent:
      if (!r.sound_events) return false;
      return std::any_of(r.sound_events->begin(), r.sound_events->end(),
                         [&](const SoundEvent& s) { return s.label == e.name; });
    case K::kEventScore: {
      if (!r.sound_events) return false;
      std::optional<double> best;
      for (const auto& s : *r.sound_events) {
        if (s.label == e.name && (!best || s.score > *best)) best = s.score;
      }
      return best && apply_cmp(e.op, *best, std::get<double>(e.literal));
    }
    case K::kContains: {
      auto v = field_value(r, e.name);
      if (!v) return false;
      const auto* s = std::get_if<std::string>(&*v);
      return s && s->find(std::get<std::string>(e.literal)) != std::string::npos;
    }
    case K::kCompare: {
      auto v = field_value(r, e.name);
      if (!v) return false;
      if (const auto* d = std::get_if<double>(&*v)) {
        const auto* lit = std::get_if<double>(&e.literal);
        return lit && apply_cmp(e.op, *d, *lit);
      }
      if (const auto* b = std::get_if<bool>(&*v)) {
        const auto* lit = std::get_if<bool>(&e.literal);
        return lit && apply_cmp(e.op, *b, *lit);
      }
      const auto* lit = std::get_if<std::string>(&e.literal);
      return lit && apply_cmp(e.op, std::get<std::string>(*v), *lit);
    }
  }
  return false;
}

Manifest select(const Manifest& m, const FilterExpr& e) { return select(m, e, print_filter(e)); }

Manifest select(const Manifest& m, const FilterExpr& e, std::string_view filter_text) {
  Manifest out;
  out.schema_version = m.schema_version;
  out.sources = m.sources;
  out.extra = m.extra;
  out.run_metadata = m.run_metadata;
  out.run_metadata["filter"] = std::string(filter_text);
  out.run_metadata["parent_manifest_hash"] = manifest_hash(m);
  for (const auto& r : m.records) {
    if (evaluate(e, r)) out.records.push_back(r);
  }
  return out;
}

}  // namespace podcurate
