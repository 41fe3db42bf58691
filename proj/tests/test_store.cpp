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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "probery/dsv.hpp"
#include "probery/error.hpp"
#include "probery/record_codec.hpp"
#include "test_util.hpp"

namespace probery {
namespace {

using testing::TempDir;

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::filesystem::path &p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

TableSchema mixed_schema() {
  SegmentSpec a;
  a.boundaries = {Value(std::int64_t{0}), Value(std::int64_t{100})};
  SegmentSpec d;
  d.boundaries = {parse_value(ValueKind::kDate, "2020-01-01")};
  d.includes_empty = true;
  return TableSchema("mixed",
                     {{"a", ValueKind::kInteger},
                      {"x", ValueKind::kFloat},
                      {"s", ValueKind::kString},
                      {"d", ValueKind::kDate}},
                     {{"a", a}, {"d", d}});
}

struct Loaded {
  std::vector<Record> records;
  TableSchema schema;
};

Loaded uniform(std::uint64_t count, std::uint64_t seed = 1) {
  Rng rng(seed);
  Loaded l;
  l.records = generate_uniform(count, 3, rng);
  l.schema = testing::default_schema(l.records);
  return l;
}

PlacementConfig defaults_for(const TableSchema &schema) {
  return PlacementConfig::with_blocks(500, schema.cell_count());
}

std::multiset<std::string> as_lines(const TableSchema &schema,
                                    const std::vector<Record> &records) {
  std::multiset<std::string> out;
  for (const auto &r : records) out.insert(encode_line(0, schema, r));
  return out;
}

TEST(CreateTable, ConsistencyChecks) {
  const Loaded l = uniform(2000);
  TempDir dir;
  EXPECT_NO_THROW(Table::create(l.schema, defaults_for(l.schema), dir / "ok"));

  PlacementConfig bad_m = defaults_for(l.schema);
  bad_m.m = 100;
  try {
    Table::create(l.schema, bad_m, dir / "bad_m");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
  }

  PlacementConfig bad_n = defaults_for(l.schema);
  bad_n.n = 10;
  try {
    Table::create(l.schema, bad_n, dir / "bad_n");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
  }

  try {
    Table::create(l.schema, defaults_for(l.schema), dir / "ok");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kAlreadyExists);
  }

  PlacementConfig derive = defaults_for(l.schema);
  derive.m = 0;
  EXPECT_EQ(Table::create(l.schema, derive, dir / "derived").manifest().cfg.m,
            125u);
}

TEST(CreateTable, OpenMissingTableIsCorruption) {
  TempDir dir;
  try {
    Table::open(dir / "absent");
    FAIL();
  } catch (const Error &e) {
    EXPECT_FALSE(is_user_error(e.code()));
  }
}

TEST(AppendRecord, RotatesAtCapacity) {
  const Loaded l = uniform(1001);
  PlacementConfig cfg = defaults_for(l.schema);
  TempDir dir;
  Table t = Table::create(l.schema, cfg, dir / "t");
  const TrunkPosition first =
      t.append_record({0, 7, locate_cell_flat(l.schema, l.records[0])}, l.records[0]);
  EXPECT_EQ(first.trunk, 0u);
  EXPECT_EQ(first.line, 0u);
  TrunkPosition last{};
  for (std::size_t i = 1; i < l.records.size(); ++i) {
    last = t.append_record({0, 7, locate_cell_flat(l.schema, l.records[i])},
                           l.records[i]);
  }
  EXPECT_EQ(last.trunk, 1u);
  EXPECT_EQ(last.line, 0u);
  EXPECT_EQ(count_lines(t.trunk_path({0, 7}, 0)), 1000u);
  EXPECT_EQ(count_lines(t.trunk_path({0, 7}, 1)), 1u);
  EXPECT_THROW(t.append_record({0, 0, 0}, l.records[0]), Error);
  EXPECT_THROW(t.append_record({1, 1, 0}, l.records[0]), Error);
}

TEST(AppendRecord, LineFormatIsBitExact) {
  const TableSchema schema = mixed_schema();
  const Record r{Value(std::int64_t{42}), Value(2.5),
                 Value(std::string("a\tb\\c\nd")),
                 parse_value(ValueKind::kDate, "2021-06-30")};
  EXPECT_EQ(encode_line(5, schema, r), "5\t42\t2.5\ta\\tb\\\\c\\nd\t2021-06-30\n");
  const Record e{Value(std::int64_t{-1}), Value{}, Value(std::string()), Value{}};
  EXPECT_EQ(encode_line(0, schema, e), "0\t-1\t\\N\t\t\\N\n");
}

TEST(RecordCodec, RoundTripAndMalformedHeaders) {
  const TableSchema schema = mixed_schema();
  const Record r{Value(std::int64_t{-7}), Value(1e-300),
                 Value(std::string("\\N literal \t tab")), Value{}};
  const std::string line = encode_line(3, schema, r);
  std::string_view rest;
  const auto cell = parse_header(std::string_view(line).substr(0, line.size() - 1), &rest);
  ASSERT_TRUE(cell);
  EXPECT_EQ(*cell, 3u);
  EXPECT_EQ(decode_fields(schema, rest), r);
  EXPECT_FALSE(parse_header("x\t1"));
  EXPECT_FALSE(parse_header("\t1"));
  EXPECT_FALSE(parse_header("12"));
  EXPECT_THROW(decode_fields(schema, "1\t2"), Error);
  for (const std::string raw : {"", "\\", "\t\n\\", "plain", "\\N"}) {
    EXPECT_EQ(unescape_field(escape_field(raw)), raw);
  }
}

TEST(LoadBatch, RoundTripMixedValues) {
  const TableSchema schema = mixed_schema();
  std::vector<Record> records;
  for (int i = 0; i < 300; ++i) {
    Record r{Value(std::int64_t{i * 3 - 200}),
             i % 7 ? Value(i / 7.0) : Value{},
             Value(std::string("row\t") + std::to_string(i) + (i % 5 ? "\n" : "\\")),
             i % 4 ? parse_value(ValueKind::kDate, i % 2 ? "2019-05-05" : "2022-02-02")
                   : Value{}};
    records.push_back(r);
  }
  TempDir dir;
  PlacementConfig cfg = PlacementConfig::with_blocks(36, schema.cell_count());
  cfg.trunk_capacity = 3;
  Table t = Table::create(schema, cfg, dir / "t");
  Rng rng(4);
  t.load_batch(records, rng);
  const Table reopened = Table::open(dir / "t");
  std::vector<std::uint64_t> all(schema.cell_count());
  for (std::uint64_t c = 0; c < all.size(); ++c) all[c] = c;
  const auto scan = reopened.scan_blocks(reopened.all_blocks(), all);
  EXPECT_EQ(as_lines(schema, scan.records), as_lines(schema, records));
  EXPECT_TRUE(reopened.verify().ok());
}

TEST(LoadBatch, EmptyBatchLeavesManifestUntouched) {
  const Loaded l = uniform(100);
  TempDir dir;
  Table t = Table::create(l.schema, defaults_for(l.schema), dir / "t");
  const std::string before = slurp(dir / "t" / "manifest.json");
  Rng rng(1);
  const LoadStats s = t.load_batch({}, rng);
  EXPECT_EQ(s.count, 0u);
  EXPECT_EQ(s.placement_seconds, 0.0);
  EXPECT_EQ(s.write_seconds, 0.0);
  EXPECT_EQ(slurp(dir / "t" / "manifest.json"), before);
}

TEST(LoadBatch, DurableAcrossReopen) {
  const Loaded l = uniform(100000, 9);
  TempDir dir;
  Table t = Table::create(l.schema, defaults_for(l.schema), dir / "t");
  Rng rng(10);
  const LoadStats s = t.load_batch(l.records, rng);
  EXPECT_EQ(s.count, 100000u);

  const Table r = Table::open(dir / "t");
  EXPECT_EQ(r.manifest().total_records(), 100000u);
  EXPECT_EQ(r.manifest().counts, t.manifest().counts);
  std::vector<std::uint64_t> all(125);
  for (std::uint64_t c = 0; c < 125; ++c) all[c] = c;
  const auto scan = r.scan_blocks(r.all_blocks(), all);
  EXPECT_EQ(scan.records.size(), 100000u);
  EXPECT_EQ(scan.records, t.scan_blocks(t.all_blocks(), all).records);

  const VerifyReport v = r.verify();
  EXPECT_TRUE(v.ok());
  EXPECT_EQ(v.lines, 100000u);
  // Trunk cap invariant.
  for (const auto &[ref, st] : r.manifest().trunk_state) {
    EXPECT_LE(st.fill, r.manifest().cfg.trunk_capacity);
    EXPECT_GE(st.fill, 1u);
  }
}

TEST(LoadBatch, AppendsAcrossBatchesAndSeedsReproduce) {
  const Loaded l = uniform(6000, 12);
  TempDir dir;
  PlacementConfig cfg = defaults_for(l.schema);
  cfg.trunk_capacity = 4;
  Table a = Table::create(l.schema, cfg, dir / "a");
  Table b = Table::create(l.schema, cfg, dir / "b");
  Rng ra(3), rb(3);
  const std::span<const Record> all(l.records);
  a.load_batch(all.subspan(0, 2500), ra);
  a.load_batch(all.subspan(2500), ra);
  b.load_batch(all.subspan(0, 2500), rb);
  b.load_batch(all.subspan(2500), rb);
  EXPECT_EQ(a.manifest().counts, b.manifest().counts);
  EXPECT_EQ(a.manifest().total_records(), 6000u);
  EXPECT_TRUE(a.verify().ok());
  for (const auto &[ref, st] : a.manifest().trunk_state) {
    EXPECT_EQ(slurp(a.trunk_path(ref, st.trunk)), slurp(b.trunk_path(ref, st.trunk)));
  }
}

TEST(ScanBlocks, OracleEquivalences) {
  const Loaded l = uniform(20000, 2);
  TempDir dir;
  Table t = Table::create(l.schema, defaults_for(l.schema), dir / "t");
  Rng rng(6);
  t.load_batch(l.records, rng);

  std::vector<std::uint64_t> all(125);
  for (std::uint64_t c = 0; c < 125; ++c) all[c] = c;
  const auto full = t.scan_blocks(t.all_blocks(), all);
  EXPECT_EQ(as_lines(l.schema, full.records), as_lines(l.schema, l.records));

  const std::uint64_t c = 42;
  std::vector<Record> filtered;
  for (const auto &r : full.records) {
    if (locate_cell_flat(l.schema, r) == c) filtered.push_back(r);
  }
  const std::vector<std::uint64_t> one{c};
  EXPECT_EQ(t.scan_blocks(t.all_blocks(), one).records, filtered);
  EXPECT_EQ(t.manifest().omega(0, c), filtered.size());

  EXPECT_TRUE(t.scan_blocks({}, all).records.empty());
  EXPECT_TRUE(t.scan_blocks(t.all_blocks(), {}).records.empty());

  // blocks_containing agrees with a header scan of every block.
  std::set<BlockRef> expect;
  for (const auto &ref : t.all_blocks()) {
    const BlockRef one_block[] = {ref};
    if (!t.scan_blocks(one_block, one).records.empty()) expect.insert(ref);
  }
  const auto got = t.blocks_containing(one);
  EXPECT_EQ(std::vector<BlockRef>(expect.begin(), expect.end()), got);
}

TEST(ScanBlocks, MissingTrunkIsCorruption) {
  const Loaded l = uniform(3000, 2);
  TempDir dir;
  Table t = Table::create(l.schema, defaults_for(l.schema), dir / "t");
  Rng rng(6);
  t.load_batch(l.records, rng);
  const BlockRef victim = t.manifest().trunk_state.begin()->first;
  std::filesystem::remove(t.trunk_path(victim, 0));
  const BlockRef blocks[] = {victim};
  std::vector<std::uint64_t> all(125);
  for (std::uint64_t c = 0; c < 125; ++c) all[c] = c;
  try {
    t.scan_blocks(blocks, all);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorruption);
  }
  EXPECT_FALSE(t.verify().ok());
}

TEST(Verify, DetectsOrphansAndNextLoadTruncatesThem) {
  const Loaded l = uniform(4000, 5);
  TempDir dir;
  Table t = Table::create(l.schema, defaults_for(l.schema), dir / "t");
  Rng rng(6);
  t.load_batch(std::span<const Record>(l.records).subspan(0, 2000), rng);
  ASSERT_TRUE(t.verify().ok());

  // Simulate a crash: lines written after the last manifest save.
  const auto [ref, st] = *t.manifest().trunk_state.begin();
  {
    std::ofstream out(t.trunk_path(ref, st.trunk), std::ios::app | std::ios::binary);
    out << encode_line(locate_cell_flat(l.schema, l.records[0]), l.schema,
                       l.records[0]);
    out << encode_line(locate_cell_flat(l.schema, l.records[1]), l.schema,
                       l.records[1]);
  }
  {
    std::ofstream out(t.trunk_path({0, 1}, 57), std::ios::binary);
    out << encode_line(0, l.schema, l.records[2]);
  }
  const VerifyReport bad = Table::open(dir / "t").verify();
  EXPECT_FALSE(bad.ok());
  EXPECT_EQ(bad.orphan_lines, 3u);
  EXPECT_EQ(bad.lines, 2000u);

  // Scans ignore the orphans.
  std::vector<std::uint64_t> all(125);
  for (std::uint64_t c = 0; c < 125; ++c) all[c] = c;
  Table reopened = Table::open(dir / "t");
  EXPECT_EQ(reopened.scan_blocks(reopened.all_blocks(), all).records.size(), 2000u);

  std::filesystem::remove(reopened.trunk_path({0, 1}, 57));
  reopened.load_batch(std::span<const Record>(l.records).subspan(2000), rng);
  const VerifyReport good = reopened.verify();
  EXPECT_TRUE(good.ok()) << (good.problems.empty() ? "" : good.problems[0]);
  EXPECT_EQ(good.lines, 4000u);
}

TEST(Verify, DetectsHeaderTampering) {
  const Loaded l = uniform(2000, 5);
  TempDir dir;
  Table t = Table::create(l.schema, defaults_for(l.schema), dir / "t");
  Rng rng(6);
  t.load_batch(l.records, rng);
  const auto [ref, st] = *t.manifest().trunk_state.begin();
  const auto path = t.trunk_path(ref, 0);
  std::string body = slurp(path);
  const auto tab = body.find('\t');
  const std::uint64_t cell = std::stoull(body.substr(0, tab));
  body = std::to_string((cell + 1) % 125) + body.substr(tab);
  std::ofstream(path, std::ios::binary | std::ios::trunc) << body;
  EXPECT_FALSE(t.verify().ok());
}

TEST(Balance, EmptyAndConservation) {
  const Loaded l = uniform(50000, 5);
  TempDir dir;
  Table t = Table::create(l.schema, defaults_for(l.schema), dir / "t");
  BalanceStats empty = t.balance_stats();
  EXPECT_EQ(empty.mean[0], 0.0);
  EXPECT_EQ(empty.stddev[0], 0.0);
  EXPECT_EQ(empty.total, 0u);

  Rng rng(6);
  t.load_batch(l.records, rng);
  const BalanceStats b = t.balance_stats();
  std::uint64_t sum = 0;
  for (auto c : b.counts) sum += c;
  EXPECT_EQ(sum, 50000u);
  EXPECT_EQ(b.total, 50000u);
  EXPECT_DOUBLE_EQ(b.mean[0], 100.0);
}

TEST(Balance, MultipleSlotsSplitUniformly) {
  const Loaded l = uniform(60000, 5);
  TempDir dir;
  PlacementConfig cfg = defaults_for(l.schema);
  cfg.slots = 3;
  Table t = Table::create(l.schema, cfg, dir / "t");
  Rng rng(6);
  t.load_batch(l.records, rng);
  const BalanceStats b = t.balance_stats();
  ASSERT_EQ(b.slots, 3u);
  for (std::uint32_t s = 0; s < 3; ++s) {
    EXPECT_NEAR(b.mean[s] * 500, 20000.0, 6 * std::sqrt(20000.0));
  }
  EXPECT_TRUE(t.verify().ok());
}

TEST(ManifestTest, JsonRoundTrip) {
  const TableSchema schema = mixed_schema();
  Manifest m;
  m.schema = schema;
  m.cfg = PlacementConfig::with_blocks(40, schema.cell_count());
  m.cfg.slots = 2;
  m.counts[{1, 5}] = 17;
  m.trunk_state[{1, 3}] = {2, 9, 321};
  m.created = "2026-01-01T00:00:00Z";
  const Manifest back = Manifest::from_json(m.to_json());
  EXPECT_EQ(back.to_json(), m.to_json());
  EXPECT_EQ(back.schema.cell_count(), schema.cell_count());
  EXPECT_EQ(back.schema.query_attributes()[1].segments.boundaries,
            schema.query_attributes()[1].segments.boundaries);
  EXPECT_EQ(back.omega(1, 5), 17u);
  EXPECT_EQ(back.omega(0, 5), 0u);
  EXPECT_EQ(back.block_records({1, 3}), 2u * m.cfg.trunk_capacity + 9);
}

TEST(Dsv, HeaderMappingAndErrors) {
  const std::vector<AttributeDef> attrs{{"a", ValueKind::kInteger},
                                        {"s", ValueKind::kString},
                                        {"x", ValueKind::kFloat}};
  std::istringstream in("s\ta\nhello\t3\n\t-4\n");
  const auto recs = read_dsv(in, attrs);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0], (Record{Value(std::int64_t{3}), Value(std::string("hello")),
                             Value{}}));
  EXPECT_EQ(recs[1], (Record{Value(std::int64_t{-4}), Value{}, Value{}}));

  std::istringstream unknown("a\tzzz\n1\t2\n");
  EXPECT_THROW(read_dsv(unknown, attrs), Error);
  std::istringstream short_row("a\ts\n1\n");
  EXPECT_THROW(read_dsv(short_row, attrs), Error);
  std::istringstream bad_int("a\nabc\n");
  EXPECT_THROW(read_dsv(bad_int, attrs), Error);

  std::ostringstream out;
  write_dsv(out, attrs, recs);
  std::istringstream again(out.str());
  EXPECT_EQ(read_dsv(again, attrs), recs);
}

}  // namespace
}  // namespace probery
