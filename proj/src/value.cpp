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

#include "probery/value.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "probery/error.hpp"

namespace probery {

std::string_view kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::kInteger: return "integer";
    case ValueKind::kFloat: return "float";
    case ValueKind::kString: return "string";
    case ValueKind::kDate: return "date";
  }
  return "integer";
}

ValueKind parse_kind(std::string_view name) {
  if (name == "integer") return ValueKind::kInteger;
  if (name == "float") return ValueKind::kFloat;
  if (name == "string") return ValueKind::kString;
  if (name == "date") return ValueKind::kDate;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown value kind '" + std::string(name) + "'");
}

bool is_numeric(const Value &v) {
  return std::holds_alternative<std::int64_t>(v) ||
         std::holds_alternative<double>(v);
}

double to_double(const Value &v) {
  if (const auto *i = std::get_if<std::int64_t>(&v)) {
    return static_cast<double>(*i);
  }
  if (const auto *d = std::get_if<double>(&v)) return *d;
  throw Error(ErrorCode::kInvalidArgument, "value is not numeric");
}

int compare_values(const Value &a, const Value &b) {
  if (const auto *ai = std::get_if<std::int64_t>(&a)) {
    if (const auto *bi = std::get_if<std::int64_t>(&b)) {
      return *ai < *bi ? -1 : (*ai > *bi ? 1 : 0);
    }
  }
  if (is_numeric(a) && is_numeric(b)) {
    const double x = to_double(a);
    const double y = to_double(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  const auto *as = std::get_if<std::string>(&a);
  const auto *bs = std::get_if<std::string>(&b);
  if (as && bs) {
    const int c = as->compare(*bs);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  throw Error(ErrorCode::kInvalidArgument, "incomparable values");
}

std::int64_t parse_date(std::string_view iso) {
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0, d = 0;
  auto bad = [&] {
    return Error(ErrorCode::kInvalidArgument,
                 "invalid date '" + std::string(iso) + "'");
  };
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') throw bad();
  auto num = [&](std::size_t pos, std::size_t len, auto &out) {
    auto [p, ec] = std::from_chars(iso.data() + pos, iso.data() + pos + len,
                                   out);
    if (ec != std::errc{} || p != iso.data() + pos + len) throw bad();
  };
  num(0, 4, y);
  num(5, 2, mo);
  num(8, 2, d);
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok()) throw bad();
  return sys_days{ymd}.time_since_epoch().count();
}

std::string format_date(std::int64_t days) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

namespace {

std::int64_t parse_int(std::string_view text) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid integer '" + std::string(text) + "'");
  }
  return v;
}

double parse_double(std::string_view text) {
  double v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid number '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

Value parse_value(ValueKind kind, std::string_view text) {
  if (text.empty()) return std::monostate{};
  switch (kind) {
    case ValueKind::kInteger: return parse_int(text);
    case ValueKind::kFloat: return parse_double(text);
    case ValueKind::kString: return std::string(text);
    case ValueKind::kDate: return parse_date(text);
  }
  return std::monostate{};
}

std::string format_value(ValueKind kind, const Value &v) {
  if (is_empty(v)) return {};
  if (const auto *s = std::get_if<std::string>(&v)) return *s;
  if (const auto *d = std::get_if<double>(&v)) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, *d);
    return std::string(buf, p);
  }
  const auto i = std::get<std::int64_t>(v);
  if (kind == ValueKind::kDate) return format_date(i);
  if (kind == ValueKind::kFloat) return format_value(kind, static_cast<double>(i));
  return std::to_string(i);
}

Value coerce_value(ValueKind kind, const Value &v) {
  if (is_empty(v)) return v;
  switch (kind) {
    case ValueKind::kInteger:
    case ValueKind::kDate:
      if (std::holds_alternative<std::int64_t>(v) ||
          std::holds_alternative<double>(v)) {
        return v;  // fractional literals compare numerically
      }
      break;
    case ValueKind::kFloat:
      if (is_numeric(v)) return to_double(v);
      break;
    case ValueKind::kString:
      if (std::holds_alternative<std::string>(v)) return v;
      break;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "value does not match attribute kind " +
                  std::string(kind_name(kind)));
}

}  // namespace probery
