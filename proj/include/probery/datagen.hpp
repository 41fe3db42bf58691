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
#include <vector>

#include "probery/rng.hpp"
#include "probery/tablespace.hpp"

namespace probery {

inline constexpr std::int64_t kSyntheticMax = 100'000'000;

/// Attributes key_a, key_b, ... (integer).
std::vector<AttributeDef> synthetic_attributes(std::size_t count);

/// Uniform integers in [0, max] per attribute.
std::vector<Record> generate_uniform(std::uint64_t count,
                                     std::size_t attributes, Rng &rng,
                                     std::int64_t max = kSyntheticMax);

/// Every attribute a query dimension with `segments` equal-frequency
/// segments computed from `sample`.
TableSchema synthetic_schema(const std::string &name, std::size_t attributes,
                             std::size_t segments,
                             const std::vector<Record> &sample);

}  // namespace probery
