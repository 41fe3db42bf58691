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

#include "probery/kernels.hpp"

#include <exception>

namespace probery::kernels {

namespace {

Placement place_at(const PlacementContext &ctx, const Record &record,
                   std::uint64_t ordinal) {
  SplitMixEngine eng(derive_seed(ctx.seed, ordinal));
  return decide_placement(ctx.schema, ctx.cfg, ctx.table, record, eng);
}

}  // namespace

void place_serial(const PlacementContext &ctx, std::span<const Record> records,
                  std::span<Placement> out) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    out[i] = place_at(ctx, records[i], ctx.first_ordinal + i);
  }
}

void place_parallel(const PlacementContext &ctx,
                    std::span<const Record> records, std::span<Placement> out) {
  const auto count = static_cast<std::int64_t>(records.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      out[i] = place_at(ctx, records[i], ctx.first_ordinal + i);
    } catch (...) {
#pragma omp critical(probery_place_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void place(Exec exec, const PlacementContext &ctx,
           std::span<const Record> records, std::span<Placement> out) {
  if (exec == Exec::kParallel) {
    place_parallel(ctx, records, out);
  } else {
    place_serial(ctx, records, out);
  }
}

std::vector<double> column_sums_serial(const PlacementConfig &cfg) {
  std::vector<double> sums(cfg.n, 0.0);
  for (std::uint32_t b = 1; b <= cfg.n; ++b) {
    double acc = 0.0;
    for (std::uint64_t i = 1; i <= cfg.m; ++i) acc += dpa_prob(i, b, cfg);
    sums[b - 1] = acc;
  }
  return sums;
}

std::vector<double> column_sums_parallel(const PlacementConfig &cfg,
                                         const ProbTable &table) {
  std::vector<double> sums(cfg.n, 0.0);
  const auto pp = table.pp();
  const std::uint64_t n = cfg.n;
  const std::uint64_t step = cfg.offset_step();
  const auto blocks = static_cast<std::int64_t>(cfg.n);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    double acc = 0.0;
    for (std::uint64_t i = 0; i < cfg.m; ++i) {
      acc += pp[(static_cast<std::uint64_t>(b) + i * step) % n];
    }
    sums[b] = acc;
  }
  return sums;
}

std::vector<double> row_sums(Exec exec, const PlacementConfig &cfg,
                             const ProbTable &table) {
  std::vector<double> sums(cfg.m, 0.0);
  const auto pp = table.pp();
  const std::uint64_t n = cfg.n;
  const std::uint64_t step = cfg.offset_step();
  auto row = [&](std::uint64_t i) {
    double acc = 0.0;
    for (std::uint64_t j = 0; j < n; ++j) acc += pp[(j + i * step) % n];
    sums[i] = acc;
  };
  const auto cells = static_cast<std::int64_t>(cfg.m);
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < cells; ++i) row(i);
  } else {
    for (std::int64_t i = 0; i < cells; ++i) row(i);
  }
  return sums;
}

}  // namespace probery::kernels
