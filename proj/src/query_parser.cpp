// Copyright 2026 The Probery Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cctype>
#include <charconv>
#include <cmath>

#include "probery/error.hpp"
#include "probery/query.hpp"

namespace probery {

namespace {

enum class Tok {
  kIdent,
  kInteger,
  kDecimal,
  kDate,
  kString,
  kStar,
  kComma,
  kLParen,
  kRParen,
  kOp,
  kEnd,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  std::size_t pos = 0;
};

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_ident_start(c)) {
      while (i < s.size() && is_ident_char(s[i])) ++i;
      out.push_back({Tok::kIdent, std::string(s.substr(start, i - start)), start});
    } else if (is_digit(c) || ((c == '-' || c == '.') && i + 1 < s.size() &&
                               (is_digit(s[i + 1]) || s[i + 1] == '.'))) {
      // ISO date: dddd-dd-dd
      if (i + 10 <= s.size() && is_digit(s[i]) && is_digit(s[i + 1]) &&
          is_digit(s[i + 2]) && is_digit(s[i + 3]) && s[i + 4] == '-' &&
          is_digit(s[i + 5]) && is_digit(s[i + 6]) && s[i + 7] == '-' &&
          is_digit(s[i + 8]) && is_digit(s[i + 9]) &&
          (i + 10 == s.size() || !is_ident_char(s[i + 10]))) {
        out.push_back({Tok::kDate, std::string(s.substr(i, 10)), start});
        i += 10;
        continue;
      }
      if (s[i] == '-') ++i;
      bool decimal = false;
      while (i < s.size() && is_digit(s[i])) ++i;
      if (i < s.size() && s[i] == '.') {
        decimal = true;
        ++i;
        while (i < s.size() && is_digit(s[i])) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && is_digit(s[j])) {
          decimal = true;
          i = j;
          while (i < s.size() && is_digit(s[i])) ++i;
        }
      }
      if (i < s.size() && is_ident_char(s[i])) {
        throw SyntaxError(start, "malformed number");
      }
      out.push_back({decimal ? Tok::kDecimal : Tok::kInteger,
                     std::string(s.substr(start, i - start)), start});
    } else if (c == '\'') {
      std::string text;
      ++i;
      while (true) {
        if (i >= s.size()) throw SyntaxError(start, "unterminated string");
        if (s[i] == '\'') {
          if (i + 1 < s.size() && s[i + 1] == '\'') {
            text += '\'';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        text += s[i++];
      }
      out.push_back({Tok::kString, std::move(text), start});
    } else if (c == '<' || c == '>') {
      ++i;
      if (i < s.size() && s[i] == '=') ++i;
      out.push_back({Tok::kOp, std::string(s.substr(start, i - start)), start});
    } else if (c == '=') {
      ++i;
      out.push_back({Tok::kOp, "=", start});
    } else if (c == '*') {
      ++i;
      out.push_back({Tok::kStar, "*", start});
    } else if (c == ',') {
      ++i;
      out.push_back({Tok::kComma, ",", start});
    } else if (c == '(') {
      ++i;
      out.push_back({Tok::kLParen, "(", start});
    } else if (c == ')') {
      ++i;
      out.push_back({Tok::kRParen, ")", start});
    } else {
      throw SyntaxError(start, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::kEnd, "", s.size()});
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

bool is_reserved(std::string_view word) {
  for (auto kw : {"select", "from", "where", "and", "with"}) {
    if (iequals(word, kw)) return true;
  }
  return false;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  QuerySpec parse() {
    QuerySpec spec;
    expect_keyword("select");
    parse_targets(spec);
    expect_keyword("from");
    spec.table = expect_ident("table name");
    if (accept_keyword("where")) {
      do {
        spec.conditions.push_back(parse_condition());
      } while (accept_keyword("and"));
    }
    if (accept_keyword("with")) {
      const Token &t = peek();
      if (t.kind != Tok::kInteger && t.kind != Tok::kDecimal) {
        throw SyntaxError(t.pos, "expected a confidence number after 'with'");
      }
      double v = 0.0;
      std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (!(v > 0.0 && v <= 1.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::kRange,
                    "confidence " + t.text + " is outside (0, 1]");
      }
      spec.confidence = v;
      ++at_;
    }
    if (peek().kind != Tok::kEnd) {
      throw SyntaxError(peek().pos, "unexpected '" + peek().text + "'");
    }
    merge_ranges(spec);
    return spec;
  }

 private:
  const Token &peek() const { return toks_[at_]; }

  bool accept_keyword(std::string_view kw) {
    if (peek().kind == Tok::kIdent && iequals(peek().text, kw)) {
      ++at_;
      return true;
    }
    return false;
  }

  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) {
      throw SyntaxError(peek().pos, "expected '" + std::string(kw) + "'");
    }
  }

  std::string expect_ident(std::string_view what) {
    const Token &t = peek();
    if (t.kind != Tok::kIdent || is_reserved(t.text)) {
      throw SyntaxError(t.pos, "expected " + std::string(what));
    }
    ++at_;
    return t.text;
  }

  void parse_targets(QuerySpec &spec) {
    if (peek().kind == Tok::kStar) {
      ++at_;
      spec.select_all = true;
      return;
    }
    const Token &t = peek();
    if (t.kind == Tok::kIdent && toks_[at_ + 1].kind == Tok::kLParen) {
      if (iequals(t.text, "count")) {
        spec.aggregate = AggregateKind::kCount;
      } else if (iequals(t.text, "sum")) {
        spec.aggregate = AggregateKind::kSum;
      } else if (iequals(t.text, "avg")) {
        spec.aggregate = AggregateKind::kAvg;
      } else {
        throw SyntaxError(t.pos, "unknown aggregate '" + t.text + "'");
      }
      at_ += 2;
      spec.aggregate_attribute = expect_ident("attribute name");
      if (peek().kind != Tok::kRParen) throw SyntaxError(peek().pos, "expected ')'");
      ++at_;
      return;
    }
    do {
      spec.columns.push_back(expect_ident("attribute name"));
    } while (peek().kind == Tok::kComma && ++at_);
  }

  QueryCondition parse_condition() {
    QueryCondition c;
    c.attribute = expect_ident("attribute name");
    const Token &op = peek();
    if (op.kind != Tok::kOp) throw SyntaxError(op.pos, "expected a comparison");
    if (op.text == "=") c.op = CompareOp::kEq;
    else if (op.text == "<") c.op = CompareOp::kLt;
    else if (op.text == "<=") c.op = CompareOp::kLe;
    else if (op.text == ">") c.op = CompareOp::kGt;
    else c.op = CompareOp::kGe;
    ++at_;
    const Token &lit = peek();
    switch (lit.kind) {
      case Tok::kInteger: c.value = {LiteralKind::kInteger, lit.text}; break;
      case Tok::kDecimal: c.value = {LiteralKind::kDecimal, lit.text}; break;
      case Tok::kDate: c.value = {LiteralKind::kDate, lit.text}; break;
      case Tok::kString: c.value = {LiteralKind::kString, lit.text}; break;
      default: throw SyntaxError(lit.pos, "expected a literal");
    }
    ++at_;
    return c;
  }

  static std::optional<Value> literal_value(const Literal &l) {
    try {
      switch (l.kind) {
        case LiteralKind::kInteger: return parse_value(ValueKind::kInteger, l.text);
        case LiteralKind::kDecimal: return parse_value(ValueKind::kFloat, l.text);
        case LiteralKind::kDate: return parse_value(ValueKind::kDate, l.text);
        case LiteralKind::kString: return Value(l.text);
      }
    } catch (const Error &) {
    }
    return std::nullopt;
  }

  // `a >= lo and a < hi` becomes one range condition [lo, hi).
  static void merge_ranges(QuerySpec &spec) {
    auto &conds = spec.conditions;
    for (std::size_t i = 0; i < conds.size(); ++i) {
      if (conds[i].op != CompareOp::kGe) continue;
      for (std::size_t j = 0; j < conds.size(); ++j) {
        if (j == i || conds[j].op != CompareOp::kLt ||
            conds[j].attribute != conds[i].attribute) {
          continue;
        }
        const bool dates_i = conds[i].value.kind == LiteralKind::kDate;
        const bool dates_j = conds[j].value.kind == LiteralKind::kDate;
        if (dates_i != dates_j) continue;
        const auto lo = literal_value(conds[i].value);
        const auto hi = literal_value(conds[j].value);
        if (!lo || !hi || is_numeric(*lo) != is_numeric(*hi) ||
            compare_values(*lo, *hi) >= 0) {
          continue;
        }
        conds[i].op = CompareOp::kRange;
        conds[i].upper = conds[j].value;
        conds.erase(conds.begin() + static_cast<std::ptrdiff_t>(j));
        if (j < i) --i;
        break;
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t at_ = 0;
};

}  // namespace

QuerySpec parse_query(std::string_view text) { return Parser(text).parse(); }

}  // namespace probery
