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

#include "probery/memory_table.hpp"

#include <algorithm>

#include "probery/error.hpp"

namespace probery {

MemoryTable MemoryTable::load(const Table &table) {
  MemoryTable mt;
  mt.manifest_ = table.manifest();
  const auto &cfg = mt.manifest_.cfg;
  mt.blocks_.resize(static_cast<std::size_t>(cfg.slots) * cfg.n);
  mt.cell_blocks_.resize(cfg.m);

  for (const auto &[ref, st] : mt.manifest_.trunk_state) {
    auto &lines = mt.blocks_[mt.index_of(ref)];
    table.read_block(ref, lines);
    mt.size_ += lines.size();
  }
  for (std::size_t b = 0; b < mt.blocks_.size(); ++b) {
    for (const auto &[cell, rec] : mt.blocks_[b]) {
      if (cell >= cfg.m) {
        throw Error(ErrorCode::kCorruption,
                    "line header names cell " + std::to_string(cell) +
                        " beyond m = " + std::to_string(cfg.m));
      }
      auto &list = mt.cell_blocks_[cell];
      if (list.empty() || list.back() != b) {
        list.push_back(static_cast<std::uint32_t>(b));
      }
    }
  }
  return mt;
}

ScanResult MemoryTable::scan_blocks(std::span<const BlockRef> blocks,
                                    std::span<const std::uint64_t> cells,
                                    Exec exec) const {
  const auto &cfg = manifest_.cfg;
  std::vector<std::size_t> order;
  order.reserve(blocks.size());
  for (const auto &ref : blocks) {
    if (ref.slot >= cfg.slots || ref.block < 1 || ref.block > cfg.n) {
      throw Error(ErrorCode::kInvalidArgument, "block reference out of range");
    }
    order.push_back(index_of(ref));
  }
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  std::vector<char> wanted(cfg.m, 0);
  for (auto c : cells) {
    if (c < wanted.size()) wanted[c] = 1;
  }

  std::vector<std::vector<Record>> outputs(order.size());
  std::vector<std::uint64_t> examined(order.size(), 0);
  auto scan_one = [&](std::size_t k) {
    for (const auto &[cell, rec] : blocks_[order[k]]) {
      if (wanted[cell]) outputs[k].push_back(rec);
    }
    examined[k] = blocks_[order[k]].size();
  };
  const auto n = static_cast<std::int64_t>(order.size());
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t k = 0; k < n; ++k) scan_one(k);
  } else {
    for (std::int64_t k = 0; k < n; ++k) scan_one(k);
  }

  ScanResult result;
  for (std::size_t k = 0; k < order.size(); ++k) {
    result.lines_examined += examined[k];
    for (auto &r : outputs[k]) result.records.push_back(std::move(r));
  }
  return result;
}

std::vector<BlockRef> MemoryTable::blocks_containing(
    std::span<const std::uint64_t> cells) const {
  std::vector<std::uint32_t> idx;
  for (auto c : cells) {
    if (c >= cell_blocks_.size()) continue;
    idx.insert(idx.end(), cell_blocks_[c].begin(), cell_blocks_[c].end());
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  std::vector<BlockRef> out;
  out.reserve(idx.size());
  for (auto b : idx) out.push_back({b / manifest_.cfg.n, b % manifest_.cfg.n + 1});
  return out;
}

}  // namespace probery
