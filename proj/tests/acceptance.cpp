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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "probery/datagen.hpp"
#include "probery/harness.hpp"
#include "probery/kernels.hpp"
#include "probery/memory_table.hpp"
#include "probery/query.hpp"
#include "probery/record_codec.hpp"
#include "probery/table.hpp"

namespace probery {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class ScratchDir {
 public:
  ScratchDir() {
    path_ = fs::temp_directory_path() /
            ("probery_accept_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path &path() const { return path_; }

 private:
  fs::path path_;
};

std::string num(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

// Default desk-scale table: 3 x 5 segments, n = 500, one slot, 250k records.
struct DefaultTable {
  Table table;
  MemoryTable memory;
};

DefaultTable build_default(const fs::path &dir) {
  Rng rng(20260101);
  const auto records = generate_uniform(250000, 3, rng);
  const TableSchema schema = synthetic_schema("t", 3, 5, records);
  Table t = Table::create(schema, PlacementConfig::with_blocks(500, schema.cell_count()),
                          dir / "default");
  t.load_batch(records, rng);
  MemoryTable mt = MemoryTable::load(t);
  return {std::move(t), std::move(mt)};
}

Outcome pc_guarantee(const MemoryTable &source) {
  std::vector<double> cs;
  for (int i = 1; i <= 9; ++i) cs.push_back(i / 10.0);
  const auto rows = validate_pc(source, cs, 400, 1001);
  Outcome o{true, ""};
  for (const auto &r : rows) {
    const double c = r.confidence;
    const double floor = c - 3.0 * std::sqrt(c * (1.0 - c) / 400.0);
    if (r.opc < floor || r.spurious_trials > 0) o.pass = false;
    o.detail += "c=" + num(c, 2) + ":" + num(r.opc, 4) + "(>=" + num(floor, 3) + ") ";
  }
  return o;
}

Outcome positive_error_only() {
  Rng gen(424242);
  std::uint64_t violations = 0;
  const int invocations = 20000;
  double worst = 1.0;
  for (int t = 0; t < invocations; ++t) {
    const std::size_t size = 1 + uniform_index(gen, 200);
    std::vector<UniverseEntry> u(size);
    const int shape = t % 4;
    for (std::uint32_t b = 0; b < size; ++b) {
      const double x = uniform_unit(gen);
      double pne = x;
      if (shape == 1) pne = 1.0 - std::pow(x, 6.0);
      if (shape == 2) pne = x < 0.3 ? 1.0 : std::pow(x, 0.05);
      if (shape == 3) pne = 1.0 - 1e-6 * x;
      u[b] = {{0, b + 1}, pne};
    }
    const double p0 = 0.01 + 0.99 * uniform_unit(gen);
    Rng rng(derive_seed(7, t));
    const SelectionResult r = h_selection(u, p0, rng);
    if (!(r.expected_pc >= p0)) ++violations;
    worst = std::min(worst, r.expected_pc - p0);
  }
  return {violations == 0, std::to_string(invocations) + " invocations, " +
                               std::to_string(violations) +
                               " violations, min error " + num(worst)};
}

std::string condition_text(const std::string &attr, CompareOp op, std::int64_t v) {
  return attr + " " + std::string(op_symbol(op)) + " " + std::to_string(v);
}

Outcome confidence_one_exact(const Table &table) {
  const TableSchema &schema = table.manifest().schema;
  Rng rng(31337);
  const CompareOp ops[] = {CompareOp::kLt, CompareOp::kLe, CompareOp::kGt,
                           CompareOp::kGe, CompareOp::kEq};
  // One full read of every block, reused as the oracle for each query.
  std::vector<Record> all;
  std::vector<std::pair<std::uint64_t, Record>> lines;
  for (const auto &ref : table.all_blocks()) {
    lines.clear();
    table.read_block(ref, lines);
    for (auto &[cell, r] : lines) all.push_back(std::move(r));
  }

  int mismatches = 0;
  std::uint64_t rows_compared = 0;
  for (int q = 0; q < 100; ++q) {
    std::string text;
    if (q % 2 == 0) {
      text = random_segment_query(schema, rng);
    } else {
      text = "select * from t";
      const std::size_t conds = 1 + uniform_index(rng, 3);
      for (std::size_t c = 0; c < conds; ++c) {
        const std::string attr = schema.attributes()[uniform_index(rng, 3)].name;
        const CompareOp op = ops[uniform_index(rng, 4)];
        const auto v = static_cast<std::int64_t>(uniform_index(rng, kSyntheticMax));
        text += (c ? " and " : " where ") + condition_text(attr, op, v);
      }
    }
    text += " with 1.0";
    Rng qrng(q);
    const QueryPlan plan =
        plan_query(parse_query(text), table.manifest(), table.prob_table(), qrng);
    const ResultSet got = execute(plan, table);

    std::multiset<std::string> want, have;
    for (const auto &r : all) {
      bool ok = true;
      for (std::size_t i = 0; ok && i < plan.predicates.size(); ++i) {
        ok = plan.predicates[i].matches(r[plan.predicate_columns[i]]);
      }
      if (ok) want.insert(encode_line(0, schema, r));
    }
    for (const auto &r : got.rows) have.insert(encode_line(0, schema, r));
    rows_compared += want.size();
    if (want != have) ++mismatches;
  }
  return {mismatches == 0, "100 queries, " + std::to_string(rows_compared) +
                               " oracle rows, " + std::to_string(mismatches) +
                               " mismatches"};
}

Outcome qe_dominance(const MemoryTable &source) {
  const std::vector<double> cs{0.2, 0.5, 0.8, 1.0};
  const auto rows = measure_qe(source, cs, 200, 2002);
  const double full = rows[3].mean;
  bool pass = rows[0].mean > full && rows[1].mean > full && rows[2].mean > full &&
              rows[0].mean >= rows[2].mean;
  std::string detail;
  for (const auto &r : rows) {
    detail += "qe(" + num(r.confidence, 2) + ")=" + num(r.mean, 4) + " ";
  }
  return {pass, detail};
}

Outcome sum_structure() {
  const PlacementConfig cfg = PlacementConfig::with_blocks(4000, 1000);
  const ProbTable table(cfg);
  const double mass = cdf(cfg.lambda, cfg) - cdf(0.0, cfg);
  const auto rows = kernels::row_sums(Exec::kParallel, cfg, table);
  double worst_row = 0.0;
  for (double r : rows) worst_row = std::max(worst_row, std::abs(r - mass));
  const auto cols = kernels::column_sums_parallel(cfg, table);
  const auto [lo, hi] = std::minmax_element(cols.begin(), cols.end());
  const double ratio = *hi / *lo;
  const double target = 0.25 * mass / (1.0 - cfg.epsilon_tail());
  double worst_col = 0.0;
  for (double c : cols) worst_col = std::max(worst_col, std::abs(c - target) / target);
  return {worst_row <= 1e-9 && ratio < 1.01 && worst_col < 0.01,
          "max |row - mass| " + num(worst_row) + ", col max/min " +
              num(ratio, 10) + ", max col rel dev " + num(worst_col)};
}

Outcome sampling_fidelity() {
  PlacementConfig cfg = PlacementConfig::with_blocks(400, 4);
  const ProbTable table(cfg);
  Rng rng(606);
  const int draws = 100000;
  std::vector<double> observed(cfg.n, 0.0);
  for (int i = 0; i < draws; ++i) {
    ++observed[sample_block(table, uniform_unit(rng) * table.total()) - 1];
  }
  // Pool adjacent bins until each expects at least 5 draws.
  double stat = 0.0, obs = 0.0, exp = 0.0;
  int bins = 0;
  for (std::uint32_t a = 0; a < cfg.n; ++a) {
    obs += observed[a];
    exp += draws * table.pp()[a] / table.total();
    if (exp >= 5.0) {
      stat += (obs - exp) * (obs - exp) / exp;
      ++bins;
      obs = exp = 0.0;
    }
  }
  if (exp > 0.0) {
    stat += (obs - exp) * (obs - exp) / exp;
    ++bins;
  }
  const boost::math::chi_squared dist(bins - 1);
  const double p = boost::math::cdf(boost::math::complement(dist, stat));

  int disagreements = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform_unit(rng) * table.total();
    std::uint32_t linear = cfg.n;
    double acc = 0.0;
    for (std::uint32_t a = 0; a < cfg.n; ++a) {
      acc += table.pp()[a];
      if (acc > u) {
        linear = a + 1;
        break;
      }
    }
    if (linear != sample_block(table, u)) ++disagreements;
  }
  return {p > 0.001 && disagreements == 0,
          "chi2 " + num(stat) + " on " + std::to_string(bins - 1) + " df, p " +
              num(p) + "; linear-scan disagreements " +
              std::to_string(disagreements) + "/10000"};
}

Outcome placement_balance() {
  Rng rng(77);
  const auto records = generate_uniform(1000000, 3, rng);
  const TableSchema schema = synthetic_schema("t", 3, 5, records);
  const PlacementConfig cfg = PlacementConfig::with_blocks(500, schema.cell_count());
  const ProbTable table(cfg);
  std::vector<Placement> out(records.size());
  kernels::place_parallel({schema, cfg, table, 78, 0}, records, out);
  std::vector<std::uint64_t> counts(cfg.n, 0);
  for (const auto &p : out) ++counts[p.block - 1];
  std::uint64_t total = 0;
  double sq = 0.0;
  for (auto c : counts) total += c;
  const double mean = static_cast<double>(total) / cfg.n;
  for (auto c : counts) sq += (c - mean) * (c - mean);
  const double cv = std::sqrt(sq / cfg.n) / mean;
  return {cv < 0.05 && total == records.size(),
          "cv " + num(cv) + ", total " + std::to_string(total)};
}

Outcome dpa_throughput() {
  Rng rng(5);
  const auto sample = generate_uniform(10000, 3, rng);
  const TableSchema schema = synthetic_schema("t", 3, 5, sample);
  const PlacementConfig cfg = PlacementConfig::with_blocks(500, schema.cell_count());
  const DpaBenchRow r = bench_dpa(schema, cfg, 5000000, 5);
  const std::string note = r.per_second >= 1e6 ? "" : " (below 1e6/s target)";
  return {r.per_second >= 2e5, num(r.per_second, 4) + " placements/s" + note};
}

Outcome existence_algebra() {
  Rng rng(99);
  double worst = 0.0;
  std::uint64_t monotone_breaks = 0;
  std::uint64_t checks = 0;
  for (int i = 0; i < 200; ++i) {
    const double p = std::pow(10.0, -12.0 * uniform_unit(rng));
    for (int j = 0; j < 50; ++j) {
      const std::uint64_t w1 = 1 + uniform_index(rng, 100000);
      const std::uint64_t w2 = 1 + uniform_index(rng, 100000);
      const double lhs = existence_prob(p, w1 + w2);
      const double rhs =
          1.0 - (1.0 - existence_prob(p, w1)) * (1.0 - existence_prob(p, w2));
      worst = std::max(worst, std::abs(lhs - rhs));
      if (existence_prob(p, w1) > existence_prob(p, w1 + 1)) ++monotone_breaks;
      const double q = std::min(1.0, p * (1.0 + uniform_unit(rng)));
      if (existence_prob(p, w1) > existence_prob(q, w1)) ++monotone_breaks;
      ++checks;
    }
  }
  return {worst <= 1e-12 && monotone_breaks == 0,
          std::to_string(checks) + " grid points, max deviation " + num(worst) +
              ", monotonicity breaks " + std::to_string(monotone_breaks)};
}

struct Snapshot {
  std::uint64_t lines = 0;
  std::vector<std::string> scanned;
  std::string counts;
  std::string query;
};

Snapshot snapshot(const Table &t) {
  Snapshot s;
  std::vector<std::uint64_t> cells(t.manifest().cfg.m);
  for (std::uint64_t i = 0; i < cells.size(); ++i) cells[i] = i;
  const ScanResult r = t.scan_blocks(t.all_blocks(), cells);
  s.lines = r.lines_examined;
  for (const auto &rec : r.records) s.scanned.push_back(encode_line(0, t.manifest().schema, rec));
  for (const auto &[key, c] : t.manifest().counts) s.counts += std::to_string(c) + ",";
  Rng rng(555);
  s.query = format_rows(run_query(
      "select * from t where key_a >= 20000000 and key_a < 70000000 and "
      "key_c < 50000000 with 0.5",
      t, rng));
  return s;
}

Outcome round_trip(const fs::path &dir) {
  Rng rng(1234);
  const auto records = generate_uniform(100000, 3, rng);
  const TableSchema schema = synthetic_schema("t", 3, 5, records);
  Snapshot before;
  {
    Table t = Table::create(schema, PlacementConfig::with_blocks(500, schema.cell_count()),
                            dir / "durable");
    t.load_batch(records, rng);
    before = snapshot(t);
  }
  const Table reopened = Table::open(dir / "durable");
  const Snapshot after = snapshot(reopened);
  const bool pass = before.lines == records.size() && before.lines == after.lines &&
                    before.scanned == after.scanned && before.counts == after.counts &&
                    before.query == after.query && !before.query.empty();
  return {pass, std::to_string(after.lines) + " lines, " +
                    std::to_string(after.scanned.size()) + " scanned records, query " +
                    std::to_string(before.query.size()) + " bytes, identical: " +
                    (pass ? "yes" : "no")};
}

}  // namespace
}  // namespace probery

int main() {
  using namespace probery;
  ScratchDir scratch;
  int failures = 0;
  auto report = [&](int id, const char *name, const std::function<Outcome()> &fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };

  std::optional<DefaultTable> def;
  try {
    def.emplace(build_default(scratch.path()));
  } catch (const std::exception &e) {
    std::printf("default table setup failed: %s\n", e.what());
  }
  auto with_default = [&](auto fn) {
    return [&, fn]() -> Outcome {
      if (!def) return {false, "default table unavailable"};
      return fn(*def);
    };
  };

  report(1, "pc guarantee", with_default([](DefaultTable &d) { return pc_guarantee(d.memory); }));
  report(2, "positive error only", positive_error_only);
  report(3, "confidence-1 exactness",
         with_default([](DefaultTable &d) { return confidence_one_exact(d.table); }));
  report(4, "qe dominance", with_default([](DefaultTable &d) { return qe_dominance(d.memory); }));
  report(5, "row/column sum structure", sum_structure);
  report(6, "sampling fidelity", sampling_fidelity);
  report(7, "placement balance", placement_balance);
  report(8, "dpa throughput", dpa_throughput);
  report(9, "existence-prob algebra", existence_algebra);
  report(10, "round-trip durability", [&] { return round_trip(scratch.path()); });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
