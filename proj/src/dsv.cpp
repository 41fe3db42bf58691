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

#include "probery/dsv.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "probery/error.hpp"

namespace probery {

namespace {

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::vector<Record> read_dsv(std::istream &in,
                             std::span<const AttributeDef> attributes,
                             char delimiter) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kInvalidArgument, "input has no header row");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  // column -> attribute index
  std::vector<std::size_t> mapping;
  for (auto name : split(line, delimiter)) {
    std::size_t found = attributes.size();
    for (std::size_t i = 0; i < attributes.size(); ++i) {
      if (attributes[i].name == name) found = i;
    }
    if (found == attributes.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "input column '" + std::string(name) +
                      "' is not a table attribute");
    }
    mapping.push_back(found);
  }

  std::vector<Record> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, delimiter);
    if (fields.size() != mapping.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(mapping.size()));
    }
    Record r(attributes.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      try {
        r[mapping[c]] = parse_value(attributes[mapping[c]].kind, fields[c]);
      } catch (const Error &e) {
        throw Error(ErrorCode::kInvalidArgument,
                    "line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<Record> read_dsv(const std::filesystem::path &file,
                             std::span<const AttributeDef> attributes,
                             char delimiter) {
  std::ifstream in(file);
  if (!in) {
    throw StorageError(ErrorCode::kInvalidArgument, file.string(),
                       "cannot open input");
  }
  return read_dsv(in, attributes, delimiter);
}

void write_dsv(std::ostream &out, std::span<const AttributeDef> attributes,
               std::span<const Record> records, char delimiter) {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (i) out << delimiter;
    out << attributes[i].name;
  }
  out << '\n';
  std::string line;
  for (const auto &r : records) {
    line.clear();
    for (std::size_t i = 0; i < attributes.size(); ++i) {
      if (i) line += delimiter;
      line += format_value(attributes[i].kind, r[i]);
    }
    line += '\n';
    out << line;
  }
}

}  // namespace probery
