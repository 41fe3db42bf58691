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

#include "probery/tablespace.hpp"

#include <algorithm>
#include <set>

#include "probery/error.hpp"

namespace probery {

namespace {

bool value_less(const Value &a, const Value &b) {
  return compare_values(a, b) < 0;
}

}  // namespace

void SegmentSpec::validate() const {
  for (const auto &b : boundaries) {
    if (is_empty(b)) {
      throw Error(ErrorCode::kInvalidConfig, "segment boundary is empty");
    }
  }
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (compare_values(boundaries[i - 1], boundaries[i]) >= 0) {
      throw Error(ErrorCode::kInvalidConfig,
                  "segment boundaries must be strictly increasing");
    }
  }
}

TableSchema::TableSchema(std::string name, std::vector<AttributeDef> attributes,
                         std::vector<QueryAttribute> query_attributes)
    : name_(std::move(name)),
      attributes_(std::move(attributes)),
      query_attributes_(std::move(query_attributes)) {
  if (name_.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "table name is empty");
  }
  std::set<std::string_view> seen;
  for (const auto &a : attributes_) {
    if (a.name.empty() || !seen.insert(a.name).second) {
      throw Error(ErrorCode::kInvalidConfig,
                  "attribute names must be unique and non-empty: '" + a.name +
                      "'");
    }
  }
  if (query_attributes_.empty()) {
    throw Error(ErrorCode::kInvalidConfig,
                "at least one query attribute is required");
  }
  std::set<std::string_view> dims;
  cell_count_ = 1;
  for (auto &qa : query_attributes_) {
    const auto col = attribute_index(qa.name);
    if (!col) {
      throw Error(ErrorCode::kInvalidConfig,
                  "query attribute '" + qa.name + "' is not an attribute");
    }
    if (!dims.insert(qa.name).second) {
      throw Error(ErrorCode::kInvalidConfig,
                  "duplicate query attribute '" + qa.name + "'");
    }
    const ValueKind kind = attributes_[*col].kind;
    for (auto &b : qa.segments.boundaries) b = coerce_value(kind, b);
    qa.segments.validate();
    dim_columns_.push_back(*col);
    extents_.push_back(qa.segments.segment_count());
    cell_count_ *= qa.segments.segment_count();
  }
}

std::optional<std::size_t> TableSchema::attribute_index(
    std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> TableSchema::dimension_of(
    std::string_view name) const {
  for (std::size_t d = 0; d < query_attributes_.size(); ++d) {
    if (query_attributes_[d].name == name) return d;
  }
  return std::nullopt;
}

std::string_view op_symbol(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kLt: return "<";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGt: return ">";
    case CompareOp::kGe: return ">=";
    case CompareOp::kRange: return "range";
  }
  return "?";
}

bool Predicate::matches(const Value &v) const {
  if (is_empty(v)) return false;
  const int c = compare_values(v, literal);
  switch (op) {
    case CompareOp::kEq: return c == 0;
    case CompareOp::kLt: return c < 0;
    case CompareOp::kLe: return c <= 0;
    case CompareOp::kGt: return c > 0;
    case CompareOp::kGe: return c >= 0;
    case CompareOp::kRange: return c >= 0 && compare_values(v, upper) < 0;
  }
  return false;
}

SegmentSpec build_segments(std::span<const Value> values, std::size_t k) {
  if (k < 1) {
    throw Error(ErrorCode::kInvalidArgument, "segment count must be >= 1");
  }
  std::vector<Value> sorted;
  sorted.reserve(values.size());
  for (const auto &v : values) {
    if (!is_empty(v)) sorted.push_back(v);
  }
  if (sorted.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "segment sample is empty");
  }
  std::sort(sorted.begin(), sorted.end(), value_less);

  std::size_t distinct = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (compare_values(sorted[i - 1], sorted[i]) != 0) ++distinct;
  }
  if (distinct < k) throw DegenerateSegmentationError(k, distinct);

  SegmentSpec spec;
  const std::size_t n = sorted.size();
  for (std::size_t j = 1; j < k; ++j) {
    const std::size_t rank = (j * n + k - 1) / k;  // ceil(j*n/k), 1-based
    const Value &b = sorted[rank - 1];
    if (spec.boundaries.empty() ||
        compare_values(spec.boundaries.back(), b) < 0) {
      spec.boundaries.push_back(b);
    }
  }
  return spec;
}

std::size_t locate_segment(const SegmentSpec &spec, const Value &value) {
  if (is_empty(value)) {
    if (!spec.includes_empty) {
      throw Error(ErrorCode::kMissingValue,
                  "missing value for a query attribute without an empty "
                  "segment");
    }
    return 0;
  }
  const auto it = std::upper_bound(spec.boundaries.begin(),
                                   spec.boundaries.end(), value, value_less);
  return spec.first_value_segment() +
         static_cast<std::size_t>(it - spec.boundaries.begin());
}

std::uint64_t flatten(std::span<const std::size_t> extents,
                      std::span<const std::uint32_t> coords) {
  std::uint64_t flat = 0;
  for (std::size_t d = 0; d < extents.size(); ++d) {
    flat = flat * extents[d] + coords[d];
  }
  return flat;
}

std::vector<std::uint32_t> unflatten(std::span<const std::size_t> extents,
                                     std::uint64_t flat) {
  std::vector<std::uint32_t> coords(extents.size());
  for (std::size_t d = extents.size(); d-- > 0;) {
    coords[d] = static_cast<std::uint32_t>(flat % extents[d]);
    flat /= extents[d];
  }
  return coords;
}

CellId locate_cell(const TableSchema &schema, const Record &record) {
  CellId id;
  id.coords.resize(schema.dimensions());
  for (std::size_t d = 0; d < schema.dimensions(); ++d) {
    id.coords[d] = static_cast<std::uint32_t>(
        locate_segment(schema.query_attributes()[d].segments,
                       record.at(schema.dimension_column(d))));
  }
  id.flat = flatten(schema.extents(), id.coords);
  return id;
}

std::uint64_t locate_cell_flat(const TableSchema &schema,
                               const Record &record) {
  std::uint64_t flat = 0;
  const auto &qas = schema.query_attributes();
  for (std::size_t d = 0; d < qas.size(); ++d) {
    flat = flat * schema.extents()[d] +
           locate_segment(qas[d].segments, record[schema.dimension_column(d)]);
  }
  return flat;
}

std::vector<std::uint32_t> segments_matching(
    const SegmentSpec &spec, std::span<const Predicate> preds) {
  std::vector<std::uint32_t> out;
  const std::size_t k = spec.value_segments();
  const auto &b = spec.boundaries;
  if (preds.empty() && spec.includes_empty) out.push_back(0);
  for (std::size_t j = 0; j < k; ++j) {
    const Value *lo = j == 0 ? nullptr : &b[j - 1];
    const Value *hi = j + 1 == k ? nullptr : &b[j];
    // lo == nullptr is -inf, hi == nullptr is +inf.
    auto lo_lt = [&](const Value &v) { return !lo || compare_values(*lo, v) < 0; };
    auto lo_le = [&](const Value &v) { return !lo || compare_values(*lo, v) <= 0; };
    auto hi_gt = [&](const Value &v) { return !hi || compare_values(*hi, v) > 0; };
    bool possible = true;
    for (const auto &p : preds) {
      switch (p.op) {
        case CompareOp::kEq: possible = lo_le(p.literal) && hi_gt(p.literal); break;
        case CompareOp::kLt: possible = lo_lt(p.literal); break;
        case CompareOp::kLe: possible = lo_le(p.literal); break;
        case CompareOp::kGt:
        case CompareOp::kGe: possible = hi_gt(p.literal); break;
        case CompareOp::kRange:
          possible = lo_lt(p.upper) && hi_gt(p.literal);
          break;
      }
      if (!possible) break;
    }
    if (possible) {
      out.push_back(static_cast<std::uint32_t>(j + spec.first_value_segment()));
    }
  }
  return out;
}

std::vector<std::uint64_t> cells_matching(const TableSchema &schema,
                                          std::span<const Predicate> preds) {
  const std::size_t dims = schema.dimensions();
  std::vector<std::vector<std::uint32_t>> per_dim(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    std::vector<Predicate> mine;
    for (const auto &p : preds) {
      if (p.attribute == schema.query_attributes()[d].name) mine.push_back(p);
    }
    per_dim[d] = segments_matching(schema.query_attributes()[d].segments, mine);
    if (per_dim[d].empty()) return {};
  }

  std::vector<std::uint64_t> cells;
  std::vector<std::size_t> pos(dims, 0);
  std::vector<std::uint32_t> coords(dims);
  while (true) {
    for (std::size_t d = 0; d < dims; ++d) coords[d] = per_dim[d][pos[d]];
    cells.push_back(flatten(schema.extents(), coords));
    std::size_t d = dims;
    while (d > 0) {
      --d;
      if (++pos[d] < per_dim[d].size()) break;
      pos[d] = 0;
      if (d == 0) return cells;
    }
  }
}

}  // namespace probery
