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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>

#include <json.hpp>

#include "probery/probability.hpp"
#include "probery/tablespace.hpp"

namespace probery {

/// A block within a slot; block is 1-based, slot 0-based.
struct BlockRef {
  std::uint32_t slot = 0;
  std::uint32_t block = 1;

  auto operator<=>(const BlockRef &) const = default;
};

struct SlotCell {
  std::uint32_t slot = 0;
  std::uint64_t cell = 0;

  auto operator<=>(const SlotCell &) const = default;
};

/// Active trunk of a block, how many lines it holds (1..capacity) and its
/// byte length. Bytes past `bytes` are orphans of an interrupted load.
struct TrunkState {
  std::uint32_t trunk = 0;
  std::uint32_t fill = 0;
  std::uint64_t bytes = 0;
};

/// Decision of where a record goes; the trunk is chosen at append time.
struct Placement {
  std::uint32_t slot = 0;
  std::uint32_t block = 1;
  std::uint64_t cell = 0;
};

inline constexpr int kFormatVersion = 1;

struct Manifest {
  TableSchema schema;
  PlacementConfig cfg;
  /// omega per (slot, cell); only non-zero entries are stored.
  std::map<SlotCell, std::uint64_t> counts;
  /// Only blocks that hold at least one record appear.
  std::map<BlockRef, TrunkState> trunk_state;
  std::string created;
  std::string modified;
  int format_version = kFormatVersion;

  std::uint64_t total_records() const;
  std::uint64_t omega(std::uint32_t slot, std::uint64_t cell) const;
  /// Records in a block as implied by its trunk state.
  std::uint64_t block_records(const BlockRef &ref) const;

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json &j);

  /// Write-temp-then-rename.
  void save(const std::filesystem::path &file) const;
  static Manifest load(const std::filesystem::path &file);
};

nlohmann::json schema_to_json(const TableSchema &schema);
TableSchema schema_from_json(const nlohmann::json &j);
nlohmann::json config_to_json(const PlacementConfig &cfg);
/// Missing keys keep their defaults; `mu` defaults to lambda / 2.
PlacementConfig config_from_json(const nlohmann::json &j);

/// Reads the attribute list from a schema object without requiring
/// segment boundaries (used before a sample is available).
std::vector<AttributeDef> attributes_from_json(const nlohmann::json &j);

/// Builds a schema from a creation config. Query attributes may give
/// `boundaries` directly or `segments: k`, in which case the boundaries are
/// computed from `sample` (records in attribute order).
TableSchema schema_from_config(const nlohmann::json &schema_json,
                               std::span<const Record> sample);

std::string utc_timestamp();

}  // namespace probery
