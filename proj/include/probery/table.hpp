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
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "probery/kernels.hpp"
#include "probery/manifest.hpp"
#include "probery/probability.hpp"
#include "probery/rng.hpp"

namespace probery {

struct TrunkPosition {
  std::uint32_t trunk = 0;
  std::uint32_t line = 0;
};

struct LoadStats {
  std::uint64_t count = 0;
  double placement_seconds = 0.0;
  double write_seconds = 0.0;
};

struct BalanceStats {
  std::uint32_t slots = 0;
  std::uint32_t blocks = 0;
  /// Slot-major: counts[slot * blocks + (block - 1)].
  std::vector<std::uint64_t> counts;
  std::vector<double> mean;
  std::vector<double> stddev;
  std::uint64_t total = 0;

  double coefficient_of_variation(std::uint32_t slot) const {
    return mean[slot] > 0.0 ? stddev[slot] / mean[slot] : 0.0;
  }
};

struct VerifyReport {
  std::uint64_t lines = 0;
  std::uint64_t orphan_lines = 0;
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
};

struct ScanResult {
  std::vector<Record> records;
  std::uint64_t lines_examined = 0;
  std::uint64_t trunks_read = 0;
};

/// Anything a query can be executed against.
class RecordSource {
 public:
  virtual ~RecordSource() = default;

  virtual const Manifest &manifest() const = 0;

  /// Records in `blocks` whose line header is one of `cells` (sorted).
  /// Output order is trunk order within ascending blocks.
  virtual ScanResult scan_blocks(std::span<const BlockRef> blocks,
                                 std::span<const std::uint64_t> cells,
                                 Exec exec = Exec::kParallel) const = 0;

  /// Blocks holding at least one record of any of `cells` (sorted).
  virtual std::vector<BlockRef> blocks_containing(
      std::span<const std::uint64_t> cells) const = 0;
};

/// A table on the local filesystem:
/// `<dir>/manifest.json` and `<dir>/slot_<s>/block_<j>/trunk_<t>.dat`.
class Table : public RecordSource {
 public:
  static Table create(TableSchema schema, PlacementConfig cfg,
                      const std::filesystem::path &directory);
  static Table open(const std::filesystem::path &directory);

  const std::filesystem::path &directory() const { return dir_; }
  const Manifest &manifest() const override { return manifest_; }
  const ProbTable &prob_table() const { return table_; }

  /// Chooses slot and block and counts the record against (slot, cell).
  /// No I/O.
  Placement place_record(const Record &record, Rng &rng);

  /// Writes one line to the block's active trunk, opening a new trunk when
  /// the active one is full. Does not persist the manifest.
  TrunkPosition append_record(const Placement &placement,
                              const Record &record);

  /// Places then writes every record; the manifest is persisted once at the
  /// end, or with only the blocks that were fully written if a write fails.
  LoadStats load_batch(std::span<const Record> records, Rng &rng,
                       Exec exec = Exec::kParallel);

  ScanResult scan_blocks(std::span<const BlockRef> blocks,
                         std::span<const std::uint64_t> cells,
                         Exec exec = Exec::kParallel) const override;
  std::vector<BlockRef> blocks_containing(
      std::span<const std::uint64_t> cells) const override;

  /// Appends every line of a block as (header cell, record), trunk order.
  void read_block(const BlockRef &ref,
                  std::vector<std::pair<std::uint64_t, Record>> &out) const;

  /// Every block of every slot.
  std::vector<BlockRef> all_blocks() const;

  BalanceStats balance_stats() const;
  VerifyReport verify() const;
  void persist();

  std::filesystem::path trunk_path(const BlockRef &ref,
                                   std::uint32_t trunk) const;

 private:
  Table(std::filesystem::path dir, Manifest manifest);

  std::filesystem::path dir_;
  Manifest manifest_;
  ProbTable table_;
};

BalanceStats compute_balance(const Manifest &manifest);

}  // namespace probery
