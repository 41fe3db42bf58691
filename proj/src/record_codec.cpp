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

#include "probery/record_codec.hpp"

#include <charconv>

#include "probery/error.hpp"

namespace probery {

std::string escape_field(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    char c = escaped[i];
    if (c == '\\' && i + 1 < escaped.size()) {
      const char e = escaped[++i];
      c = e == 't' ? '\t' : e == 'n' ? '\n' : e;
    }
    out += c;
  }
  return out;
}

void append_line(std::string &out, std::uint64_t cell,
                 const TableSchema &schema, const Record &record) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, cell);
  out.append(buf, p);
  const auto &attrs = schema.attributes();
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    out += '\t';
    const Value &v = record[i];
    if (is_empty(v)) {
      out += "\\N";
    } else if (attrs[i].kind == ValueKind::kString) {
      out += escape_field(std::get<std::string>(v));
    } else {
      out += format_value(attrs[i].kind, v);
    }
  }
  out += '\n';
}

std::string encode_line(std::uint64_t cell, const TableSchema &schema,
                        const Record &record) {
  std::string out;
  append_line(out, cell, schema, record);
  return out;
}

std::optional<std::uint64_t> parse_header(std::string_view line,
                                          std::string_view *rest) {
  std::uint64_t cell = 0;
  auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), cell);
  if (ec != std::errc{} || p == line.data()) return std::nullopt;
  const auto consumed = static_cast<std::size_t>(p - line.data());
  if (consumed >= line.size() || line[consumed] != '\t') return std::nullopt;
  if (rest) *rest = line.substr(consumed + 1);
  return cell;
}

Record decode_fields(const TableSchema &schema, std::string_view rest) {
  const auto &attrs = schema.attributes();
  Record record;
  record.reserve(attrs.size());
  std::size_t start = 0;
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    const std::size_t tab = rest.find('\t', start);
    const bool last = i + 1 == attrs.size();
    if (last != (tab == std::string_view::npos)) {
      throw Error(ErrorCode::kCorruption, "trunk line has wrong field count");
    }
    const std::string_view field =
        rest.substr(start, last ? std::string_view::npos : tab - start);
    if (field == "\\N") {
      record.emplace_back(std::monostate{});
    } else if (attrs[i].kind == ValueKind::kString) {
      record.emplace_back(unescape_field(field));
    } else {
      record.push_back(parse_value(attrs[i].kind, field));
    }
    start = tab + 1;
  }
  return record;
}

}  // namespace probery
