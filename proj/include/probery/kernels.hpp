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

// Data-parallel loops of the engine. Every kernel has a serial reference
// path; tests check the OpenMP path against it and bench/ times both.

#include <cstdint>
#include <span>
#include <vector>

#include "probery/manifest.hpp"
#include "probery/probability.hpp"
#include "probery/rng.hpp"
#include "probery/tablespace.hpp"

namespace probery {

enum class Exec { kSerial, kParallel };

/// Counter-based engine for per-record streams.
class SplitMixEngine {
 public:
  using result_type = std::uint64_t;
  explicit SplitMixEngine(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return UINT64_MAX; }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Uniform slot, then the cell's offset-shifted row of F_DPA by
/// inverse-CDF sampling on the shared table.
template <class Engine>
Placement decide_placement(const TableSchema &schema,
                           const PlacementConfig &cfg, const ProbTable &table,
                           const Record &record, Engine &rng) {
  Placement p;
  p.cell = locate_cell_flat(schema, record);
  p.slot = cfg.slots == 1
               ? 0
               : static_cast<std::uint32_t>(uniform_index(rng, cfg.slots));
  const std::uint32_t x = table.sample_unit(uniform_unit(rng));
  p.block = block_for_offset(p.cell, x, cfg);
  return p;
}

namespace kernels {

struct PlacementContext {
  const TableSchema &schema;
  const PlacementConfig &cfg;
  const ProbTable &table;
  std::uint64_t seed;
  /// Ordinal of records[0] within the table's load history.
  std::uint64_t first_ordinal;
};

/// Placement of records[i] uses the stream derive_seed(seed, ordinal).
void place_serial(const PlacementContext &ctx, std::span<const Record> records,
                  std::span<Placement> out);
void place_parallel(const PlacementContext &ctx,
                    std::span<const Record> records, std::span<Placement> out);
void place(Exec exec, const PlacementContext &ctx,
           std::span<const Record> records, std::span<Placement> out);

/// Sum over all m cells of F_DPA(i, b) for every block b (index b - 1).
/// The serial reference evaluates dpa_prob directly; the parallel path
/// accumulates shifted copies of the table per block.
std::vector<double> column_sums_serial(const PlacementConfig &cfg);
std::vector<double> column_sums_parallel(const PlacementConfig &cfg,
                                         const ProbTable &table);

/// Row sums of F_DPA for every cell.
std::vector<double> row_sums(Exec exec, const PlacementConfig &cfg,
                             const ProbTable &table);

}  // namespace kernels
}  // namespace probery
