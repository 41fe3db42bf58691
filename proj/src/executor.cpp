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

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "probery/error.hpp"
#include "probery/query.hpp"
#include "probery/record_codec.hpp"

namespace probery {

namespace {

bool row_matches(const QueryPlan &plan, const Record &r) {
  for (std::size_t i = 0; i < plan.predicates.size(); ++i) {
    if (!plan.predicates[i].matches(r[plan.predicate_columns[i]])) return false;
  }
  return true;
}

Value aggregate_rows(const QueryPlan &plan, ValueKind kind,
                     const std::vector<const Record *> &rows) {
  if (plan.aggregate == AggregateKind::kCount) {
    return static_cast<std::int64_t>(rows.size());
  }
  std::int64_t isum = 0;
  double dsum = 0.0;
  std::size_t present = 0;
  for (const Record *r : rows) {
    const Value &v = (*r)[plan.aggregate_column];
    if (is_empty(v)) continue;
    ++present;
    if (kind == ValueKind::kInteger) {
      isum += std::get<std::int64_t>(v);
    }
    dsum += to_double(v);
  }
  if (present == 0) return std::monostate{};
  if (plan.aggregate == AggregateKind::kAvg) {
    return dsum / static_cast<double>(present);
  }
  if (kind == ValueKind::kInteger) return isum;
  return dsum;
}

}  // namespace

ResultSet execute(const QueryPlan &plan, const RecordSource &source,
                  Exec exec) {
  const TableSchema &schema = source.manifest().schema;
  ScanResult scan = source.scan_blocks(plan.scan_blocks, plan.cells, exec);

  std::vector<const Record *> hits;
  for (const Record &r : scan.records) {
    if (row_matches(plan, r)) hits.push_back(&r);
  }

  ResultSet result;
  result.columns = plan.column_names;
  result.metadata.combined_expected_pc = plan.combined_expected_pc;
  result.metadata.cells_matched = plan.cells.size();
  result.metadata.blocks_scanned = plan.scan_blocks.size();
  result.metadata.blocks_skipped =
      plan.universe_blocks - std::min(plan.universe_blocks, plan.scan_blocks.size());
  result.metadata.records_scanned = scan.lines_examined;

  if (plan.aggregate != AggregateKind::kNone) {
    const ValueKind kind = schema.attributes()[plan.aggregate_column].kind;
    result.aggregate = aggregate_rows(plan, kind, hits);
    if (plan.aggregate == AggregateKind::kCount) {
      result.aggregate_kind = ValueKind::kInteger;
    } else if (plan.aggregate == AggregateKind::kAvg) {
      result.aggregate_kind = ValueKind::kFloat;
    } else {
      result.aggregate_kind = kind;
    }
    result.kinds.push_back(result.aggregate_kind);
    return result;
  }

  for (const std::size_t c : plan.projection) {
    result.kinds.push_back(schema.attributes()[c].kind);
  }
  result.rows.reserve(hits.size());
  for (const Record *r : hits) {
    Record out;
    out.reserve(plan.projection.size());
    for (const std::size_t c : plan.projection) out.push_back((*r)[c]);
    result.rows.push_back(std::move(out));
  }
  return result;
}

ResultSet run_query(std::string_view text, const RecordSource &source,
                    Rng &rng, Exec exec) {
  const QueryPlan plan = plan_query(parse_query(text), source.manifest(), rng);
  return execute(plan, source, exec);
}

std::string explain(const QueryPlan &plan) {
  std::ostringstream out;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  out << "table " << plan.spec.table << "\n";
  out << "confidence " << num(plan.confidence) << ", per cell "
      << num(plan.per_cell_confidence) << "\n";
  out << "matched cells " << plan.cells.size() << "\n";
  for (const auto &cp : plan.cell_plans) {
    out << "  cell " << cp.cell << ": universe " << cp.universe.size()
        << ", selected " << cp.selection.selected.size() << ", skipped "
        << cp.selection.skipped.size() << ", expected pc "
        << num(cp.selection.expected_pc) << "\n";
  }
  out << "scan " << plan.scan_blocks.size() << " of " << plan.universe_blocks
      << " blocks\n";
  out << "combined expected pc " << num(plan.combined_expected_pc) << "\n";
  return out.str();
}

std::string format_rows(const ResultSet &result) {
  std::string out;
  if (result.aggregate) {
    out += is_empty(*result.aggregate)
               ? std::string()
               : format_value(result.aggregate_kind, *result.aggregate);
    out += '\n';
    return out;
  }
  for (const Record &row : result.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += '\t';
      if (!is_empty(row[i])) {
        out += escape_field(format_value(result.kinds[i], row[i]));
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace probery
