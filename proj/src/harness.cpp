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

#include "probery/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "probery/datagen.hpp"
#include "probery/error.hpp"
#include "probery/record_codec.hpp"

namespace probery {

namespace {

std::string quote_literal(ValueKind kind, const Value &v) {
  std::string text = format_value(kind, v);
  if (kind != ValueKind::kString) return text;
  std::string out = "'";
  for (char c : text) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

std::vector<std::string> row_keys(const std::vector<Record> &rows,
                                  const std::vector<ValueKind> &kinds) {
  std::vector<std::string> keys;
  keys.reserve(rows.size());
  for (const auto &r : rows) {
    std::string k;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) k += '\t';
      k += is_empty(r[i]) ? std::string("\\N")
                          : escape_field(format_value(kinds[i], r[i]));
    }
    keys.push_back(std::move(k));
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

template <class Body>
void for_trials(std::uint64_t trials, Exec exec, Body &&body) {
  const auto n = static_cast<std::int64_t>(trials);
  std::exception_ptr failure;
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t t = 0; t < n; ++t) {
      try {
        body(static_cast<std::uint64_t>(t));
      } catch (...) {
#pragma omp critical(probery_trial_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  } else {
    for (std::int64_t t = 0; t < n; ++t) body(static_cast<std::uint64_t>(t));
  }
  if (failure) std::rethrow_exception(failure);
}

constexpr std::uint64_t kQueryStream = 0x71;
constexpr std::uint64_t kPlanStream = 0x72;

}  // namespace

std::string random_segment_query(const TableSchema &schema, Rng &rng) {
  std::string where;
  for (std::size_t d = 0; d < schema.dimensions(); ++d) {
    const auto &qa = schema.query_attributes()[d];
    const auto &b = qa.segments.boundaries;
    const ValueKind kind =
        schema.attributes()[schema.dimension_column(d)].kind;
    if (b.empty()) continue;
    const auto seg = static_cast<std::size_t>(uniform_index(rng, b.size() + 1));
    auto add = [&](const std::string &cond) {
      where += where.empty() ? " where " : " and ";
      where += cond;
    };
    if (seg > 0) add(qa.name + " >= " + quote_literal(kind, b[seg - 1]));
    if (seg < b.size()) add(qa.name + " < " + quote_literal(kind, b[seg]));
  }
  return "select * from " + schema.name() + where;
}

std::vector<PCRow> validate_pc(const RecordSource &source,
                               std::span<const double> confidences,
                               std::uint64_t trials, std::uint64_t seed,
                               Exec exec) {
  const Manifest &manifest = source.manifest();
  const ProbTable table(manifest.cfg);
  const std::size_t nc = confidences.size();

  struct Outcome {
    bool counted = false;
    bool complete = false;
    bool spurious = false;
    double ec = 1.0;
    double expected_pc = 1.0;
  };
  std::vector<Outcome> outcomes(trials * nc);

  for_trials(trials, exec, [&](std::uint64_t t) {
    Rng qrng(derive_seed(seed, kQueryStream, t));
    const QuerySpec spec = parse_query(random_segment_query(manifest.schema, qrng));

    QuerySpec full = spec;
    full.confidence = 1.0;
    Rng unused(0);
    const QueryPlan oracle_plan = plan_query(full, manifest, table, unused);
    const ResultSet oracle = execute(oracle_plan, source, Exec::kSerial);
    if (oracle.rows.empty()) return;
    const auto oracle_keys = row_keys(oracle.rows, oracle.kinds);

    for (std::size_t ci = 0; ci < nc; ++ci) {
      QuerySpec q = spec;
      q.confidence = confidences[ci];
      Rng prng(derive_seed(seed, kPlanStream, t * nc + ci));
      const QueryPlan plan = plan_query(q, manifest, table, prng);
      const ResultSet got = execute(plan, source, Exec::kSerial);
      const auto keys = row_keys(got.rows, got.kinds);
      Outcome &o = outcomes[t * nc + ci];
      o.counted = true;
      o.spurious = !std::includes(oracle_keys.begin(), oracle_keys.end(),
                                  keys.begin(), keys.end());
      o.complete = !o.spurious && keys.size() == oracle_keys.size();
      o.ec = static_cast<double>(keys.size()) /
             static_cast<double>(oracle_keys.size());
      o.expected_pc = plan.combined_expected_pc;
    }
  });

  std::vector<PCRow> rows;
  for (std::size_t ci = 0; ci < nc; ++ci) {
    PCRow row;
    row.confidence = confidences[ci];
    double ec_sum = 0.0;
    double epc_sum = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      const Outcome &o = outcomes[t * nc + ci];
      if (!o.counted) {
        ++row.excluded;
        continue;
      }
      ++row.trials;
      epc_sum += o.expected_pc;
      if (o.spurious) ++row.spurious_trials;
      if (o.complete) {
        ++row.complete;
      } else {
        ec_sum += o.ec;
      }
    }
    const std::uint64_t incomplete = row.trials - row.complete;
    row.opc = row.trials ? static_cast<double>(row.complete) /
                               static_cast<double>(row.trials)
                         : 0.0;
    row.mean_ec_incomplete =
        incomplete ? ec_sum / static_cast<double>(incomplete)
                   : std::numeric_limits<double>::quiet_NaN();
    row.mean_expected_pc =
        row.trials ? epc_sum / static_cast<double>(row.trials) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::vector<QERow> measure_qe(const RecordSource &source,
                              std::span<const double> confidences,
                              std::uint64_t trials, std::uint64_t seed,
                              Exec exec) {
  const Manifest &manifest = source.manifest();
  const ProbTable table(manifest.cfg);
  const std::size_t nc = confidences.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> qe(trials * nc, nan);

  for_trials(trials, exec, [&](std::uint64_t t) {
    Rng qrng(derive_seed(seed, kQueryStream, t));
    const QuerySpec spec = parse_query(random_segment_query(manifest.schema, qrng));
    for (std::size_t ci = 0; ci < nc; ++ci) {
      QuerySpec q = spec;
      q.confidence = confidences[ci];
      Rng prng(derive_seed(seed, kPlanStream, t * nc + ci));
      const QueryPlan plan = plan_query(q, manifest, table, prng);
      const std::size_t matched = source.blocks_containing(plan.cells).size();
      const std::size_t searched = plan.scan_blocks.size();
      if (matched == 0 || searched == 0) continue;
      qe[t * nc + ci] =
          static_cast<double>(matched) / static_cast<double>(searched);
    }
  });

  std::vector<QERow> rows;
  for (std::size_t ci = 0; ci < nc; ++ci) {
    std::vector<double> values;
    for (std::uint64_t t = 0; t < trials; ++t) {
      if (!std::isnan(qe[t * nc + ci])) values.push_back(qe[t * nc + ci]);
    }
    QERow row;
    row.confidence = confidences[ci];
    row.trials = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    row.mean = values.empty() ? nan : sum / static_cast<double>(values.size());
    const auto five = five_numbers(std::move(values));
    row.min = five[0];
    row.q1 = five[1];
    row.median = five[2];
    row.q3 = five[3];
    row.max = five[4];
    rows.push_back(row);
  }
  return rows;
}

DpaBenchRow bench_dpa(const TableSchema &schema, const PlacementConfig &cfg,
                      std::uint64_t count, std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  DpaBenchRow row;
  row.n = cfg.n;
  row.count = count;

  const auto t0 = Clock::now();
  const ProbTable table(cfg);
  row.table_build_seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  if (count == 0) return row;

  // A fixed pool of records is cycled so memory stays bounded.
  Rng data_rng(seed);
  std::vector<Record> pool(generate_uniform(
      std::min<std::uint64_t>(count, 1 << 16), schema.attributes().size(),
      data_rng));
  std::vector<Placement> out(pool.size());

  const auto start = Clock::now();
  std::uint64_t done = 0;
  while (done < count) {
    const std::size_t len =
        static_cast<std::size_t>(std::min<std::uint64_t>(pool.size(), count - done));
    const kernels::PlacementContext ctx{schema, cfg, table, seed, done};
    kernels::place(Exec::kParallel, ctx,
                   std::span<const Record>(pool.data(), len),
                   std::span<Placement>(out.data(), len));
    done += len;
  }
  row.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  row.per_second = row.seconds > 0.0 ? static_cast<double>(count) / row.seconds
                                     : std::numeric_limits<double>::infinity();
  return row;
}

std::vector<MuSweepRow> sweep_mu(const PlacementConfig &cfg,
                                 std::span<const double> mus,
                                 std::uint64_t omega) {
  std::vector<MuSweepRow> rows;
  for (const double mu : mus) {
    PlacementConfig c = cfg;
    c.mu = mu;
    c.validate();
    const ProbTable table(c);
    MuSweepRow row;
    row.mu = mu;
    row.mass = table.total();
    std::size_t below = 0;
    std::size_t above = 0;
    for (const double p : table.pp()) {
      const double g = existence_prob(p, omega);
      row.g.push_back(g);
      if (g < 0.01) ++below;
      if (g > 0.99) ++above;
    }
    const auto n = static_cast<double>(row.g.size());
    row.frac_below_001 = static_cast<double>(below) / n;
    row.frac_above_099 = static_cast<double>(above) / n;

    std::vector<double> sorted = row.g;
    std::sort(sorted.begin(), sorted.end());
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * sorted[i];
      total += sorted[i];
    }
    row.gini = total > 0.0 ? weighted / (n * total) : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> five_numbers(std::vector<double> values) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (values.empty()) return {nan, nan, nan, nan, nan};
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {values.front(), quantile(0.25), quantile(0.5), quantile(0.75),
          values.back()};
}

namespace {

std::string csv_number(double v) {
  if (std::isnan(v)) return {};
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

}  // namespace

void write_pc_csv(std::ostream &out, std::span<const PCRow> rows) {
  out << "confidence,trials,complete,opc,mean_ec_incomplete,mean_expected_pc\n";
  for (const auto &r : rows) {
    out << csv_number(r.confidence) << ',' << r.trials << ',' << r.complete
        << ',' << csv_number(r.opc) << ',' << csv_number(r.mean_ec_incomplete)
        << ',' << csv_number(r.mean_expected_pc) << '\n';
  }
}

void write_qe_csv(std::ostream &out, std::span<const QERow> rows) {
  out << "confidence,min,q1,median,q3,max,trials\n";
  for (const auto &r : rows) {
    out << csv_number(r.confidence) << ',' << csv_number(r.min) << ','
        << csv_number(r.q1) << ',' << csv_number(r.median) << ','
        << csv_number(r.q3) << ',' << csv_number(r.max) << ',' << r.trials
        << '\n';
  }
}

void write_balance_csv(std::ostream &out, const BalanceStats &stats) {
  out << "slot,block,count\n";
  for (std::uint32_t s = 0; s < stats.slots; ++s) {
    for (std::uint32_t b = 0; b < stats.blocks; ++b) {
      out << s << ',' << (b + 1) << ','
          << stats.counts[static_cast<std::size_t>(s) * stats.blocks + b]
          << '\n';
    }
  }
}

void write_dpa_csv(std::ostream &out, std::span<const DpaBenchRow> rows) {
  out << "n,count,seconds,per_second\n";
  for (const auto &r : rows) {
    out << r.n << ',' << r.count << ',' << csv_number(r.seconds) << ','
        << csv_number(r.per_second) << '\n';
  }
}

}  // namespace probery
