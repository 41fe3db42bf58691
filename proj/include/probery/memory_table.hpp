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
#include <utility>
#include <vector>

#include "probery/table.hpp"

namespace probery {

/// Read-only in-memory copy of a table, used by the validation harness to
/// run thousands of queries without re-reading trunks. Scans honour the
/// same header filter and ordering as the on-disk table.
class MemoryTable : public RecordSource {
 public:
  static MemoryTable load(const Table &table);

  const Manifest &manifest() const override { return manifest_; }
  ScanResult scan_blocks(std::span<const BlockRef> blocks,
                         std::span<const std::uint64_t> cells,
                         Exec exec = Exec::kParallel) const override;
  std::vector<BlockRef> blocks_containing(
      std::span<const std::uint64_t> cells) const override;

  std::uint64_t size() const { return size_; }

 private:
  std::size_t index_of(const BlockRef &ref) const {
    return static_cast<std::size_t>(ref.slot) * manifest_.cfg.n +
           (ref.block - 1);
  }

  Manifest manifest_;
  /// Per block, lines in trunk order as (cell, record).
  std::vector<std::vector<std::pair<std::uint64_t, Record>>> blocks_;
  /// Per cell, sorted block indexes that hold it.
  std::vector<std::vector<std::uint32_t>> cell_blocks_;
  std::uint64_t size_ = 0;
};

}  // namespace probery
