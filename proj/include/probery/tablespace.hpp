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
#include <vector>

#include "probery/value.hpp"

namespace probery {

struct AttributeDef {
  std::string name;
  ValueKind kind = ValueKind::kInteger;
};

/// Equal-frequency segmentation of one query attribute.
///
/// Value segments are half-open and lower-inclusive: (-inf, b1), [b1, b2),
/// ..., [b_{k-1}, +inf). With `includes_empty` an extra segment at index 0
/// holds records whose value is missing and the value segments shift by one.
struct SegmentSpec {
  std::vector<Value> boundaries;
  bool includes_empty = false;

  std::size_t value_segments() const { return boundaries.size() + 1; }
  std::size_t segment_count() const {
    return value_segments() + (includes_empty ? 1 : 0);
  }
  /// Index of the first value segment.
  std::size_t first_value_segment() const { return includes_empty ? 1 : 0; }

  void validate() const;
};

struct QueryAttribute {
  std::string name;
  SegmentSpec segments;
};

class TableSchema {
 public:
  TableSchema() = default;
  TableSchema(std::string name, std::vector<AttributeDef> attributes,
              std::vector<QueryAttribute> query_attributes);

  const std::string &name() const { return name_; }
  const std::vector<AttributeDef> &attributes() const { return attributes_; }
  const std::vector<QueryAttribute> &query_attributes() const {
    return query_attributes_;
  }

  std::optional<std::size_t> attribute_index(std::string_view name) const;
  /// Dimension index of a query attribute, if `name` is one.
  std::optional<std::size_t> dimension_of(std::string_view name) const;
  /// Record column for dimension `d`.
  std::size_t dimension_column(std::size_t d) const { return dim_columns_[d]; }

  std::size_t dimensions() const { return query_attributes_.size(); }
  /// Per-dimension segment counts.
  const std::vector<std::size_t> &extents() const { return extents_; }
  /// m: total number of cells.
  std::uint64_t cell_count() const { return cell_count_; }

 private:
  std::string name_;
  std::vector<AttributeDef> attributes_;
  std::vector<QueryAttribute> query_attributes_;
  std::vector<std::size_t> dim_columns_;
  std::vector<std::size_t> extents_;
  std::uint64_t cell_count_ = 0;
};

struct CellId {
  std::vector<std::uint32_t> coords;
  std::uint64_t flat = 0;
};

enum class CompareOp { kEq, kLt, kLe, kGt, kGe, kRange };

std::string_view op_symbol(CompareOp op);

/// A typed conjunct. `kRange` is [literal, upper).
struct Predicate {
  std::string attribute;
  CompareOp op = CompareOp::kEq;
  Value literal;
  Value upper;

  /// Empty values never satisfy a predicate.
  bool matches(const Value &v) const;
};

/// Equal-frequency boundaries from a sample: the values at 1-based ranks
/// ceil(j*N/k), j = 1..k-1, with duplicates collapsed.
SegmentSpec build_segments(std::span<const Value> values, std::size_t k);

std::size_t locate_segment(const SegmentSpec &spec, const Value &value);

std::uint64_t flatten(std::span<const std::size_t> extents,
                      std::span<const std::uint32_t> coords);
std::vector<std::uint32_t> unflatten(std::span<const std::size_t> extents,
                                     std::uint64_t flat);

CellId locate_cell(const TableSchema &schema, const Record &record);
/// locate_cell without materializing coordinates; hot path for placement.
std::uint64_t locate_cell_flat(const TableSchema &schema, const Record &record);

/// Segments of one dimension whose interval may hold values satisfying every
/// predicate in `preds` (all on that dimension's attribute).
std::vector<std::uint32_t> segments_matching(const SegmentSpec &spec,
                                             std::span<const Predicate> preds);

/// Cartesian product of matched segments, as sorted flat indexes.
/// Predicates on non-query attributes are ignored here.
std::vector<std::uint64_t> cells_matching(const TableSchema &schema,
                                          std::span<const Predicate> preds);

}  // namespace probery
