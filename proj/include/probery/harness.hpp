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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "probery/kernels.hpp"
#include "probery/query.hpp"
#include "probery/table.hpp"

namespace probery {

struct PCRow {
  double confidence = 0.0;
  /// Trials counted (non-empty oracle).
  std::uint64_t trials = 0;
  std::uint64_t complete = 0;
  std::uint64_t excluded = 0;
  double opc = 0.0;
  /// Mean extent of completeness over incomplete trials; NaN if none.
  double mean_ec_incomplete = 0.0;
  double mean_expected_pc = 0.0;
  /// Any row returned that the oracle did not.
  std::uint64_t spurious_trials = 0;
};

struct QERow {
  double confidence = 0.0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  double mean = 0.0;
  std::uint64_t trials = 0;
};

struct DpaBenchRow {
  std::uint32_t n = 0;
  std::uint64_t count = 0;
  double seconds = 0.0;
  double per_second = 0.0;
  double table_build_seconds = 0.0;
};

struct MuSweepRow {
  double mu = 0.0;
  double frac_below_001 = 0.0;
  double frac_above_099 = 0.0;
  double gini = 0.0;
  double mass = 0.0;
  std::vector<double> g;
};

/// `select * ... where` one random value segment per query dimension.
std::string random_segment_query(const TableSchema &schema, Rng &rng);

/// Observed PC per confidence: each trial runs a random one-segment query
/// at the confidence and at 1.0 (oracle) and compares row multisets.
std::vector<PCRow> validate_pc(const RecordSource &source,
                               std::span<const double> confidences,
                               std::uint64_t trials, std::uint64_t seed,
                               Exec exec = Exec::kParallel);

/// Query efficiency qe = matched blocks / searched blocks per trial,
/// summarized by five-number summary per confidence.
std::vector<QERow> measure_qe(const RecordSource &source,
                              std::span<const double> confidences,
                              std::uint64_t trials, std::uint64_t seed,
                              Exec exec = Exec::kParallel);

/// In-memory placement throughput (cell lookup + categorical sample), no I/O.
DpaBenchRow bench_dpa(const TableSchema &schema, const PlacementConfig &cfg,
                      std::uint64_t count, std::uint64_t seed);

/// Shape of g(x) = 1 - (1 - f(x))^omega across peak positions mu.
std::vector<MuSweepRow> sweep_mu(const PlacementConfig &cfg,
                                 std::span<const double> mus,
                                 std::uint64_t omega);

/// Five-number summary (linear interpolation between order statistics).
std::vector<double> five_numbers(std::vector<double> values);

void write_pc_csv(std::ostream &out, std::span<const PCRow> rows);
void write_qe_csv(std::ostream &out, std::span<const QERow> rows);
void write_balance_csv(std::ostream &out, const BalanceStats &stats);
void write_dpa_csv(std::ostream &out, std::span<const DpaBenchRow> rows);

}  // namespace probery
