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

#include "probery/datagen.hpp"

namespace probery {

std::vector<AttributeDef> synthetic_attributes(std::size_t count) {
  std::vector<AttributeDef> attrs;
  for (std::size_t i = 0; i < count; ++i) {
    attrs.push_back({std::string("key_") + static_cast<char>('a' + i % 26) +
                         (i >= 26 ? std::to_string(i / 26) : ""),
                     ValueKind::kInteger});
  }
  return attrs;
}

std::vector<Record> generate_uniform(std::uint64_t count,
                                     std::size_t attributes, Rng &rng,
                                     std::int64_t max) {
  std::vector<Record> out;
  out.reserve(count);
  const auto span = static_cast<std::uint64_t>(max) + 1;
  for (std::uint64_t i = 0; i < count; ++i) {
    Record r;
    r.reserve(attributes);
    for (std::size_t a = 0; a < attributes; ++a) {
      r.emplace_back(static_cast<std::int64_t>(uniform_index(rng, span)));
    }
    out.push_back(std::move(r));
  }
  return out;
}

TableSchema synthetic_schema(const std::string &name, std::size_t attributes,
                             std::size_t segments,
                             const std::vector<Record> &sample) {
  auto attrs = synthetic_attributes(attributes);
  std::vector<QueryAttribute> qas;
  for (std::size_t a = 0; a < attributes; ++a) {
    std::vector<Value> column;
    column.reserve(sample.size());
    for (const auto &r : sample) column.push_back(r[a]);
    qas.push_back({attrs[a].name, build_segments(column, segments)});
  }
  return TableSchema(name, std::move(attrs), std::move(qas));
}

}  // namespace probery
