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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace probery {

enum class ValueKind { kInteger, kFloat, kString, kDate };

std::string_view kind_name(ValueKind kind);
ValueKind parse_kind(std::string_view name);

/// An attribute value. `std::monostate` is the empty (missing) value; dates
/// are held as days since 1970-01-01 in the int64 alternative, so the
/// attribute's ValueKind is needed to format them.
using Value = std::variant<std::monostate, std::int64_t, double, std::string>;

/// One record: values in schema attribute order.
using Record = std::vector<Value>;

inline bool is_empty(const Value &v) {
  return std::holds_alternative<std::monostate>(v);
}

/// Three-way comparison of two non-empty values. Integers and floats compare
/// numerically with each other; strings compare bytewise. Comparing a string
/// with a number throws invalid-argument.
int compare_values(const Value &a, const Value &b);

bool is_numeric(const Value &v);
double to_double(const Value &v);

std::int64_t parse_date(std::string_view iso);
std::string format_date(std::int64_t days);

/// Parses the canonical text form of a value of `kind`. Empty text yields the
/// empty value.
Value parse_value(ValueKind kind, std::string_view text);

/// Canonical text form. Floats use the shortest representation that round
/// trips; the empty value formats as "".
std::string format_value(ValueKind kind, const Value &v);

/// Converts `v` into the representation used by attributes of `kind`
/// (e.g. an integer literal against a float attribute). Throws on a
/// kind mismatch that has no lossless conversion.
Value coerce_value(ValueKind kind, const Value &v);

}  // namespace probery
