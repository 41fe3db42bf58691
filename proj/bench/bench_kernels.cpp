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

// Serial reference vs OpenMP path for each data-parallel kernel.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <optional>

#include <unistd.h>

#include "probery/datagen.hpp"
#include "probery/kernels.hpp"
#include "probery/memory_table.hpp"
#include "probery/table.hpp"

namespace probery {
namespace {

struct PlacementData {
  std::vector<Record> records;
  TableSchema schema;
  PlacementConfig cfg;
  ProbTable table;

  PlacementData() {
    Rng rng(1);
    records = generate_uniform(200000, 3, rng);
    schema = synthetic_schema("t", 3, 5, records);
    cfg = PlacementConfig::with_blocks(500, schema.cell_count());
    table = ProbTable(cfg);
  }
};

const PlacementData &placement_data() {
  static const PlacementData data;
  return data;
}

void BM_Placement(benchmark::State &state, Exec exec) {
  const auto &d = placement_data();
  std::vector<Placement> out(d.records.size());
  for (auto _ : state) {
    kernels::place(exec, {d.schema, d.cfg, d.table, 7, 0}, d.records, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(d.records.size()));
}
BENCHMARK_CAPTURE(BM_Placement, serial, Exec::kSerial);
BENCHMARK_CAPTURE(BM_Placement, parallel, Exec::kParallel);

void BM_ColumnSumsSerial(benchmark::State &state) {
  const PlacementConfig cfg = PlacementConfig::with_blocks(4000, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::column_sums_serial(cfg));
}
BENCHMARK(BM_ColumnSumsSerial)->Unit(benchmark::kMillisecond);

void BM_ColumnSumsParallel(benchmark::State &state) {
  const PlacementConfig cfg = PlacementConfig::with_blocks(4000, 1000);
  const ProbTable table(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::column_sums_parallel(cfg, table));
  }
}
BENCHMARK(BM_ColumnSumsParallel)->Unit(benchmark::kMillisecond);

// A loaded on-disk table shared by the scan benchmarks.
struct ScanData {
  std::filesystem::path dir;
  std::optional<Table> table;
  std::optional<MemoryTable> memory;
  std::vector<BlockRef> blocks;
  std::vector<std::uint64_t> cells;

  ScanData() {
    dir = std::filesystem::temp_directory_path() /
          ("probery_bench_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    const auto &d = placement_data();
    table.emplace(Table::create(d.schema, d.cfg, dir / "t"));
    Rng rng(2);
    table->load_batch(d.records, rng);
    memory.emplace(MemoryTable::load(*table));
    blocks = table->all_blocks();
    for (std::uint64_t c = 0; c < 25; ++c) cells.push_back(c);
  }
  ~ScanData() {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
  }
};

ScanData &scan_data() {
  static ScanData data;
  return data;
}

void BM_TrunkScan(benchmark::State &state, Exec exec) {
  auto &d = scan_data();
  for (auto _ : state) {
    benchmark::DoNotOptimize(d.table->scan_blocks(d.blocks, d.cells, exec));
  }
}
BENCHMARK_CAPTURE(BM_TrunkScan, serial, Exec::kSerial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_TrunkScan, parallel, Exec::kParallel)->Unit(benchmark::kMillisecond);

void BM_MemoryScan(benchmark::State &state, Exec exec) {
  auto &d = scan_data();
  for (auto _ : state) {
    benchmark::DoNotOptimize(d.memory->scan_blocks(d.blocks, d.cells, exec));
  }
}
BENCHMARK_CAPTURE(BM_MemoryScan, serial, Exec::kSerial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MemoryScan, parallel, Exec::kParallel)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace probery

BENCHMARK_MAIN();
