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
#include <cmath>
#include <set>

#include "probery/error.hpp"
#include "probery/query.hpp"

namespace probery {

namespace {

Value literal_for(const Literal &lit, const AttributeDef &attr) {
  auto mismatch = [&] {
    return Error(ErrorCode::kPlanning,
                 "literal '" + lit.text + "' does not fit attribute '" +
                     attr.name + "' of kind " +
                     std::string(kind_name(attr.kind)));
  };
  try {
    switch (attr.kind) {
      case ValueKind::kInteger:
        if (lit.kind == LiteralKind::kInteger) {
          return parse_value(ValueKind::kInteger, lit.text);
        }
        if (lit.kind == LiteralKind::kDecimal) {
          return parse_value(ValueKind::kFloat, lit.text);
        }
        break;
      case ValueKind::kFloat:
        if (lit.kind == LiteralKind::kInteger || lit.kind == LiteralKind::kDecimal) {
          return parse_value(ValueKind::kFloat, lit.text);
        }
        break;
      case ValueKind::kString:
        if (lit.kind == LiteralKind::kString) return Value(lit.text);
        break;
      case ValueKind::kDate:
        if (lit.kind == LiteralKind::kDate ||
            lit.kind == LiteralKind::kString) {
          return parse_value(ValueKind::kDate, lit.text);
        }
        break;
    }
  } catch (const Error &e) {
    throw Error(ErrorCode::kPlanning, e.what());
  }
  throw mismatch();
}

std::size_t column_of(const TableSchema &schema, const std::string &name) {
  const auto idx = schema.attribute_index(name);
  if (!idx) {
    throw Error(ErrorCode::kPlanning, "unknown attribute '" + name + "'");
  }
  return *idx;
}

/// Smallest per-cell confidence c with c^k >= p0 under sequential
/// floating-point multiplication.
double per_cell_confidence(double p0, std::size_t k) {
  if (k <= 1) return p0;
  double c = std::pow(p0, 1.0 / static_cast<double>(k));
  auto power = [&](double v) {
    double acc = 1.0;
    for (std::size_t i = 0; i < k; ++i) acc *= v;
    return acc;
  };
  while (c < 1.0 && power(c) < p0) c = std::nextafter(c, 2.0);
  return std::min(c, 1.0);
}

}  // namespace

Predicate resolve_condition(const QueryCondition &cond,
                            const TableSchema &schema) {
  const std::size_t col = column_of(schema, cond.attribute);
  const AttributeDef &attr = schema.attributes()[col];
  Predicate p;
  p.attribute = cond.attribute;
  p.op = cond.op;
  p.literal = literal_for(cond.value, attr);
  if (cond.op == CompareOp::kRange) {
    p.upper = literal_for(cond.upper, attr);
    if (compare_values(p.literal, p.upper) >= 0) {
      throw Error(ErrorCode::kPlanning, "range on '" + cond.attribute +
                                            "' has lower >= upper bound");
    }
  }
  return p;
}

QueryPlan plan_query(const QuerySpec &spec, const Manifest &manifest,
                     Rng &rng) {
  return plan_query(spec, manifest, build_prob_table(manifest.cfg), rng);
}

QueryPlan plan_query(const QuerySpec &spec, const Manifest &manifest,
                     const ProbTable &table, Rng &rng) {
  const TableSchema &schema = manifest.schema;
  const PlacementConfig &cfg = manifest.cfg;
  if (spec.table != schema.name()) {
    throw Error(ErrorCode::kPlanning, "unknown table '" + spec.table + "'");
  }
  if (!(spec.confidence > 0.0 && spec.confidence <= 1.0)) {
    throw Error(ErrorCode::kRange, "confidence is outside (0, 1]");
  }

  QueryPlan plan;
  plan.spec = spec;
  for (const auto &cond : spec.conditions) {
    plan.predicates.push_back(resolve_condition(cond, schema));
    plan.predicate_columns.push_back(column_of(schema, cond.attribute));
  }

  plan.aggregate = spec.aggregate;
  if (spec.aggregate != AggregateKind::kNone) {
    plan.aggregate_column = column_of(schema, spec.aggregate_attribute);
    const ValueKind kind = schema.attributes()[plan.aggregate_column].kind;
    if (spec.aggregate != AggregateKind::kCount && kind != ValueKind::kInteger &&
        kind != ValueKind::kFloat) {
      throw Error(ErrorCode::kPlanning, "sum/avg need a numeric attribute, '" +
                                            spec.aggregate_attribute +
                                            "' is " +
                                            std::string(kind_name(kind)));
    }
    static constexpr const char *kNames[] = {"", "count", "sum", "avg"};
    plan.column_names.push_back(
        std::string(kNames[static_cast<int>(spec.aggregate)]) + "(" +
        spec.aggregate_attribute + ")");
  } else if (spec.select_all) {
    for (std::size_t i = 0; i < schema.attributes().size(); ++i) {
      plan.projection.push_back(i);
      plan.column_names.push_back(schema.attributes()[i].name);
    }
  } else {
    for (const auto &c : spec.columns) {
      plan.projection.push_back(column_of(schema, c));
      plan.column_names.push_back(c);
    }
  }

  plan.cells = cells_matching(schema, plan.predicates);
  plan.confidence = clamp_confidence(spec.confidence);

  const auto pp = table.pp();
  std::set<BlockRef> universe_union;
  std::size_t with_data = 0;
  for (const std::uint64_t cell : plan.cells) {
    CellPlan cp;
    cp.cell = cell;
    for (std::uint32_t s = 0; s < cfg.slots; ++s) {
      const std::uint64_t omega = manifest.omega(s, cell);
      if (omega == 0) continue;
      for (std::uint32_t j = 1; j <= cfg.n; ++j) {
        const double p = pp[offset_index(cell + 1, j, cfg) - 1];
        cp.universe.push_back({{s, j}, non_existence_prob(p, omega)});
        universe_union.insert({s, j});
      }
    }
    if (!cp.universe.empty()) ++with_data;
    plan.cell_plans.push_back(std::move(cp));
  }
  plan.universe_blocks = universe_union.size();
  plan.per_cell_confidence = per_cell_confidence(plan.confidence, with_data);

  std::set<BlockRef> selected;
  double combined = 1.0;
  for (auto &cp : plan.cell_plans) {
    cp.selection = h_selection(cp.universe, plan.per_cell_confidence, rng);
    cp.selection.cell = cp.cell;
    combined *= cp.selection.expected_pc;
    selected.insert(cp.selection.selected.begin(), cp.selection.selected.end());
  }
  plan.combined_expected_pc = combined;
  plan.scan_blocks.assign(selected.begin(), selected.end());
  return plan;
}

}  // namespace probery
