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

#include "probery/manifest.hpp"

#include <ctime>
#include <fstream>

#include "probery/error.hpp"

namespace probery {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json value_to_json(ValueKind kind, const Value &v) {
  if (is_empty(v)) return nullptr;
  switch (kind) {
    case ValueKind::kInteger:
      if (const auto *i = std::get_if<std::int64_t>(&v)) return *i;
      return to_double(v);
    case ValueKind::kFloat: return to_double(v);
    case ValueKind::kString: return std::get<std::string>(v);
    case ValueKind::kDate: return format_date(std::get<std::int64_t>(v));
  }
  return nullptr;
}

Value value_from_json(ValueKind kind, const json &j) {
  if (j.is_null()) return std::monostate{};
  switch (kind) {
    case ValueKind::kInteger:
      if (j.is_number_integer()) return j.get<std::int64_t>();
      break;
    case ValueKind::kFloat:
      if (j.is_number()) return j.get<double>();
      break;
    case ValueKind::kString:
      if (j.is_string()) return j.get<std::string>();
      break;
    case ValueKind::kDate:
      if (j.is_string()) return parse_date(j.get<std::string>());
      break;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "boundary " + j.dump() + " does not match kind " +
                  std::string(kind_name(kind)));
}

const AttributeDef &find_attribute(const std::vector<AttributeDef> &attrs,
                                   const std::string &name) {
  for (const auto &a : attrs) {
    if (a.name == name) return a;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "query attribute '" + name + "' is not an attribute");
}

template <class T>
T get_or(const json &j, const char *key, T fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

}  // namespace

std::vector<AttributeDef> attributes_from_json(const json &j) {
  std::vector<AttributeDef> attrs;
  try {
    for (const auto &a : j.at("attributes")) {
      attrs.push_back({a.at("name").get<std::string>(),
                       parse_kind(a.at("kind").get<std::string>())});
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("bad schema: ") + e.what());
  }
  return attrs;
}

json schema_to_json(const TableSchema &schema) {
  json attrs = json::array();
  for (const auto &a : schema.attributes()) {
    attrs.push_back({{"name", a.name}, {"kind", kind_name(a.kind)}});
  }
  json qas = json::array();
  for (const auto &qa : schema.query_attributes()) {
    const ValueKind kind =
        schema.attributes()[*schema.attribute_index(qa.name)].kind;
    json bounds = json::array();
    for (const auto &b : qa.segments.boundaries) {
      bounds.push_back(value_to_json(kind, b));
    }
    qas.push_back({{"name", qa.name},
                   {"boundaries", bounds},
                   {"includes_empty", qa.segments.includes_empty}});
  }
  return {{"name", schema.name()},
          {"attributes", attrs},
          {"query_attributes", qas}};
}

TableSchema schema_from_config(const json &j, std::span<const Record> sample) {
  auto attrs = attributes_from_json(j);
  std::vector<QueryAttribute> qas;
  try {
    for (const auto &q : j.at("query_attributes")) {
      QueryAttribute qa;
      qa.name = q.at("name").get<std::string>();
      qa.segments.includes_empty = get_or(q, "includes_empty", false);
      const AttributeDef &attr = find_attribute(attrs, qa.name);
      if (q.contains("boundaries")) {
        for (const auto &b : q.at("boundaries")) {
          qa.segments.boundaries.push_back(value_from_json(attr.kind, b));
        }
      } else if (q.contains("segments")) {
        if (sample.empty()) {
          throw Error(ErrorCode::kInvalidConfig,
                      "query attribute '" + qa.name +
                          "' gives a segment count but no sample was "
                          "supplied");
        }
        std::size_t col = 0;
        while (attrs[col].name != qa.name) ++col;
        std::vector<Value> column;
        column.reserve(sample.size());
        for (const auto &r : sample) column.push_back(r.at(col));
        auto built = build_segments(column, q.at("segments").get<std::size_t>());
        qa.segments.boundaries = std::move(built.boundaries);
      } else {
        throw Error(ErrorCode::kInvalidConfig,
                    "query attribute '" + qa.name +
                        "' needs 'boundaries' or 'segments'");
      }
      qas.push_back(std::move(qa));
    }
    return TableSchema(j.at("name").get<std::string>(), std::move(attrs),
                       std::move(qas));
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("bad schema: ") + e.what());
  }
}

TableSchema schema_from_json(const json &j) { return schema_from_config(j, {}); }

json config_to_json(const PlacementConfig &cfg) {
  return {{"lambda", cfg.lambda}, {"sigma", cfg.sigma},
          {"mu", cfg.mu},         {"n", cfg.n},
          {"m", cfg.m},           {"slots", cfg.slots},
          {"trunk_capacity", cfg.trunk_capacity}};
}

PlacementConfig config_from_json(const json &j) {
  PlacementConfig cfg;
  try {
    cfg.lambda = get_or(j, "lambda", cfg.lambda);
    cfg.sigma = get_or(j, "sigma", cfg.sigma);
    cfg.mu = get_or(j, "mu", 0.5 * cfg.lambda);
    cfg.n = get_or(j, "n", cfg.n);
    cfg.m = get_or(j, "m", std::uint64_t{0});
    cfg.slots = get_or(j, "slots", cfg.slots);
    cfg.trunk_capacity = get_or(j, "trunk_capacity", cfg.trunk_capacity);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("bad config: ") + e.what());
  }
  return cfg;
}

std::uint64_t Manifest::total_records() const {
  std::uint64_t total = 0;
  for (const auto &[key, c] : counts) total += c;
  return total;
}

std::uint64_t Manifest::omega(std::uint32_t slot, std::uint64_t cell) const {
  const auto it = counts.find({slot, cell});
  return it == counts.end() ? 0 : it->second;
}

std::uint64_t Manifest::block_records(const BlockRef &ref) const {
  const auto it = trunk_state.find(ref);
  if (it == trunk_state.end()) return 0;
  return static_cast<std::uint64_t>(it->second.trunk) * cfg.trunk_capacity +
         it->second.fill;
}

json Manifest::to_json() const {
  json c = json::object();
  for (const auto &[key, v] : counts) {
    c[std::to_string(key.slot) + ":" + std::to_string(key.cell)] = v;
  }
  json ts = json::array();
  for (const auto &[ref, st] : trunk_state) {
    ts.push_back({{"slot", ref.slot},
                  {"block", ref.block},
                  {"trunk", st.trunk},
                  {"fill", st.fill},
                  {"bytes", st.bytes}});
  }
  return {{"format_version", format_version},
          {"created", created},
          {"modified", modified},
          {"schema", schema_to_json(schema)},
          {"cfg", config_to_json(cfg)},
          {"total_records", total_records()},
          {"counts", c},
          {"trunk_state", ts}};
}

Manifest Manifest::from_json(const json &j) {
  Manifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kFormatVersion) {
      throw Error(ErrorCode::kCorruption,
                  "unsupported manifest format version " +
                      std::to_string(m.format_version));
    }
    m.created = j.value("created", "");
    m.modified = j.value("modified", "");
    m.schema = schema_from_json(j.at("schema"));
    m.cfg = config_from_json(j.at("cfg"));
    for (const auto &[key, v] : j.at("counts").items()) {
      const auto colon = key.find(':');
      if (colon == std::string::npos) {
        throw Error(ErrorCode::kCorruption, "bad counts key '" + key + "'");
      }
      SlotCell sc{static_cast<std::uint32_t>(std::stoul(key.substr(0, colon))),
                  std::stoull(key.substr(colon + 1))};
      m.counts[sc] = v.get<std::uint64_t>();
    }
    for (const auto &t : j.at("trunk_state")) {
      BlockRef ref{t.at("slot").get<std::uint32_t>(),
                   t.at("block").get<std::uint32_t>()};
      m.trunk_state[ref] = {t.at("trunk").get<std::uint32_t>(),
                            t.at("fill").get<std::uint32_t>(),
                            t.at("bytes").get<std::uint64_t>()};
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kCorruption, std::string("bad manifest: ") + e.what());
  }
  return m;
}

void Manifest::save(const fs::path &file) const {
  const fs::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << to_json().dump(2) << '\n';
    out.flush();
    if (!out) {
      throw StorageError(ErrorCode::kStorage, tmp.string(),
                         "cannot write manifest");
    }
  }
  std::error_code ec;
  fs::rename(tmp, file, ec);
  if (ec) {
    throw StorageError(ErrorCode::kStorage, file.string(),
                       "cannot replace manifest (" + ec.message() + ")");
  }
}

Manifest Manifest::load(const fs::path &file) {
  std::ifstream in(file);
  if (!in) {
    throw StorageError(ErrorCode::kStorage, file.string(),
                       "cannot open manifest");
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    throw StorageError(ErrorCode::kCorruption, file.string(),
                       std::string("manifest is not valid JSON (") + e.what() +
                           ")");
  }
  return from_json(j);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace probery
