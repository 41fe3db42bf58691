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
#include <optional>
#include <string>
#include <string_view>

#include "probery/tablespace.hpp"

namespace probery {

/// Trunk line: `<cell>\t<field_1>\t...\t<field_K>\n`. Backslash, tab and
/// newline inside fields are escaped as `\\`, `\t`, `\n`; the empty value is
/// written as `\N`.
void append_line(std::string &out, std::uint64_t cell,
                 const TableSchema &schema, const Record &record);
std::string encode_line(std::uint64_t cell, const TableSchema &schema,
                        const Record &record);

/// Reads the cell header without touching the fields. `line` excludes the
/// newline. Returns nullopt on a malformed header.
std::optional<std::uint64_t> parse_header(std::string_view line,
                                          std::string_view *rest = nullptr);

/// Decodes the fields following the header.
Record decode_fields(const TableSchema &schema, std::string_view rest);

std::string escape_field(std::string_view raw);
std::string unescape_field(std::string_view escaped);

}  // namespace probery
