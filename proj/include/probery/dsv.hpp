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

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "probery/tablespace.hpp"

namespace probery {

/// Reads delimiter-separated values whose header row names attributes.
/// Columns may appear in any order; attributes without a column and empty
/// fields become empty values. An unknown column is an invalid-argument.
std::vector<Record> read_dsv(std::istream &in,
                             std::span<const AttributeDef> attributes,
                             char delimiter = '\t');
std::vector<Record> read_dsv(const std::filesystem::path &file,
                             std::span<const AttributeDef> attributes,
                             char delimiter = '\t');

void write_dsv(std::ostream &out, std::span<const AttributeDef> attributes,
               std::span<const Record> records, char delimiter = '\t');

}  // namespace probery
