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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "probery/manifest.hpp"
#include "probery/rng.hpp"
#include "probery/table.hpp"

namespace probery {

enum class LiteralKind { kInteger, kDecimal, kDate, kString };

struct Literal {
  LiteralKind kind = LiteralKind::kInteger;
  std::string text;
};

/// Untyped condition as written; typed against the schema when planning.
/// `kRange` comes from merging `a >= lo and a < hi` on one attribute.
struct QueryCondition {
  std::string attribute;
  CompareOp op = CompareOp::kEq;
  Literal value;
  Literal upper;
};

enum class AggregateKind { kNone, kCount, kSum, kAvg };

struct QuerySpec {
  std::string table;
  bool select_all = false;
  std::vector<std::string> columns;
  AggregateKind aggregate = AggregateKind::kNone;
  std::string aggregate_attribute;
  std::vector<QueryCondition> conditions;
  double confidence = 1.0;
};

/// select targets from ident [where pred (and pred)*] [with number]
QuerySpec parse_query(std::string_view text);

// --- block selection -------------------------------------------------------

inline constexpr double kMinConfidence = 0.01;
inline constexpr double kClosureTolerance = 1e-9;

/// Forced closure: confidences are clamped into [0.01, 1].
double clamp_confidence(double p0);

struct UniverseEntry {
  BlockRef block;
  /// Probability that the block holds none of the cell's records.
  double pne = 1.0;
};

struct SelectionResult {
  std::uint64_t cell = 0;
  double requested = 1.0;
  std::vector<BlockRef> selected;  // sorted
  std::vector<UniverseEntry> skipped;
  /// Product of skipped PNE.
  double expected_pc = 1.0;
  /// requested / expected_pc at termination.
  double budget = 1.0;
  std::size_t examined = 0;
};

/// Randomized heuristic block selection: draws unexamined blocks uniformly,
/// skips a block whenever its PNE exceeds the remaining budget and divides
/// the budget by that PNE, and stops once the budget reaches 1.
SelectionResult h_selection(std::span<const UniverseEntry> universe, double p0,
                            Rng &rng);

// --- planning and execution ------------------------------------------------

struct CellPlan {
  std::uint64_t cell = 0;
  std::vector<UniverseEntry> universe;
  SelectionResult selection;
};

struct QueryPlan {
  QuerySpec spec;
  /// Every condition, typed against the schema; all are re-checked per row.
  std::vector<Predicate> predicates;
  std::vector<std::size_t> predicate_columns;
  std::vector<std::uint64_t> cells;
  double confidence = 1.0;
  double per_cell_confidence = 1.0;
  std::vector<CellPlan> cell_plans;
  /// Union of per-cell selections, sorted.
  std::vector<BlockRef> scan_blocks;
  /// Union of per-cell universes.
  std::size_t universe_blocks = 0;
  double combined_expected_pc = 1.0;

  std::vector<std::size_t> projection;
  std::vector<std::string> column_names;
  AggregateKind aggregate = AggregateKind::kNone;
  std::size_t aggregate_column = 0;
};

QueryPlan plan_query(const QuerySpec &spec, const Manifest &manifest,
                     Rng &rng);
/// Same, reusing a lookup table already built for `manifest.cfg`.
QueryPlan plan_query(const QuerySpec &spec, const Manifest &manifest,
                     const ProbTable &table, Rng &rng);

struct ResultMetadata {
  double combined_expected_pc = 1.0;
  std::size_t cells_matched = 0;
  std::size_t blocks_scanned = 0;
  std::size_t blocks_skipped = 0;
  std::uint64_t records_scanned = 0;
};

struct ResultSet {
  std::vector<std::string> columns;
  std::vector<ValueKind> kinds;
  std::vector<Record> rows;
  /// Set for aggregate queries; `rows` is then empty.
  std::optional<Value> aggregate;
  ValueKind aggregate_kind = ValueKind::kInteger;
  ResultMetadata metadata;
};

ResultSet execute(const QueryPlan &plan, const RecordSource &source,
                  Exec exec = Exec::kParallel);

/// parse + plan + execute.
ResultSet run_query(std::string_view text, const RecordSource &source,
                    Rng &rng, Exec exec = Exec::kParallel);

/// Typed predicate for a condition; throws planning errors for unknown
/// attributes or literal/attribute kind mismatches.
Predicate resolve_condition(const QueryCondition &cond,
                            const TableSchema &schema);

/// Human-readable plan summary (matched cells, selected/skipped per cell,
/// expected PC).
std::string explain(const QueryPlan &plan);

/// Tab-separated rows, one per line.
std::string format_rows(const ResultSet &result);

}  // namespace probery
