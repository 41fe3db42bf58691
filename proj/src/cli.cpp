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

#include "probery/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "probery/datagen.hpp"
#include "probery/dsv.hpp"
#include "probery/error.hpp"
#include "probery/harness.hpp"
#include "probery/memory_table.hpp"
#include "probery/query.hpp"
#include "probery/table.hpp"

namespace probery {

namespace {

using nlohmann::json;

struct Options {
  std::string table;
  std::string config;
  std::string sample;
  std::string input;
  std::string out;
  std::string config_out;
  std::string query;
  std::string name = "t";
  std::optional<std::uint64_t> seed;
  std::vector<double> confidences;
  std::vector<std::uint32_t> blocks{500};
  std::uint64_t trials = 400;
  std::uint64_t count = 0;
  std::size_t attributes = 3;
  std::size_t segments = 5;
  bool explain = false;
  bool serial = false;
};

std::uint64_t seed_of(const Options &o) {
  return o.seed ? *o.seed : entropy_seed();
}

Exec exec_of(const Options &o) {
  return o.serial ? Exec::kSerial : Exec::kParallel;
}

json read_json(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kInvalidConfig, path + ": " + e.what());
  }
}

/// Writes to `path`, or to `fallback` when the path is empty.
template <class Fn>
void write_output(const std::string &path, std::ostream &fallback, Fn &&fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  fn(f);
  if (!f) throw StorageError(ErrorCode::kStorage, path, "write failed");
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int cmd_create(const Options &o, std::ostream &out) {
  const json cfg_json = read_json(o.config);
  if (!cfg_json.contains("schema")) {
    throw Error(ErrorCode::kInvalidConfig, "config has no 'schema' object");
  }
  std::vector<Record> sample;
  if (!o.sample.empty()) {
    sample = read_dsv(o.sample, attributes_from_json(cfg_json.at("schema")));
  }
  TableSchema schema = schema_from_config(cfg_json.at("schema"), sample);
  PlacementConfig cfg = config_from_json(
      cfg_json.contains("cfg") ? cfg_json.at("cfg") : json::object());
  const Table t = Table::create(std::move(schema), cfg, o.table);
  out << "created " << t.directory().string() << ": m = " << t.manifest().cfg.m
      << ", n = " << t.manifest().cfg.n << ", slots = "
      << t.manifest().cfg.slots << "\n";
  return 0;
}

int cmd_gen(const Options &o, std::ostream &out) {
  Rng rng(seed_of(o));
  const auto records = generate_uniform(o.count, o.attributes, rng);
  const auto attrs = synthetic_attributes(o.attributes);
  write_output(o.out, out, [&](std::ostream &s) { write_dsv(s, attrs, records); });
  if (!o.config_out.empty()) {
    const TableSchema schema =
        synthetic_schema(o.name, o.attributes, o.segments, records);
    PlacementConfig cfg = PlacementConfig::with_blocks(o.blocks.front(), schema.cell_count());
    json j = {{"schema", schema_to_json(schema)}, {"cfg", config_to_json(cfg)}};
    write_output(o.config_out, out,
                 [&](std::ostream &s) { s << j.dump(2) << "\n"; });
  }
  return 0;
}

int cmd_load(const Options &o, std::ostream &out) {
  Table t = Table::open(o.table);
  const auto records = read_dsv(o.input, t.manifest().schema.attributes());
  Rng rng(seed_of(o));
  const LoadStats stats = t.load_batch(records, rng, exec_of(o));
  out << "loaded " << stats.count << " records (placement "
      << fmt(stats.placement_seconds) << " s, write " << fmt(stats.write_seconds)
      << " s)\n";
  return 0;
}

int cmd_query(const Options &o, std::ostream &out, std::ostream &err) {
  const Table t = Table::open(o.table);
  Rng rng(seed_of(o));
  const QueryPlan plan = plan_query(parse_query(o.query), t.manifest(),
                                    t.prob_table(), rng);
  if (o.explain) {
    out << explain(plan);
    return 0;
  }
  const ResultSet result = execute(plan, t, exec_of(o));
  for (std::size_t i = 0; i < result.columns.size(); ++i) {
    out << (i ? "\t" : "") << result.columns[i];
  }
  out << "\n" << format_rows(result);
  const auto &md = result.metadata;
  err << "expected_pc " << fmt(md.combined_expected_pc) << ", cells "
      << md.cells_matched << ", blocks scanned " << md.blocks_scanned
      << ", skipped " << md.blocks_skipped << ", records scanned "
      << md.records_scanned << "\n";
  return 0;
}

int cmd_validate_pc(const Options &o, std::ostream &out) {
  const Table t = Table::open(o.table);
  const MemoryTable mt = MemoryTable::load(t);
  const auto rows = validate_pc(mt, o.confidences, o.trials, seed_of(o), exec_of(o));
  write_output(o.out, out, [&](std::ostream &s) { write_pc_csv(s, rows); });
  return 0;
}

int cmd_measure_qe(const Options &o, std::ostream &out) {
  const Table t = Table::open(o.table);
  const MemoryTable mt = MemoryTable::load(t);
  const auto rows = measure_qe(mt, o.confidences, o.trials, seed_of(o), exec_of(o));
  write_output(o.out, out, [&](std::ostream &s) { write_qe_csv(s, rows); });
  return 0;
}

int cmd_bench_dpa(const Options &o, std::ostream &out) {
  const std::uint64_t seed = seed_of(o);
  Rng rng(seed);
  const auto sample = generate_uniform(10000, o.attributes, rng);
  const TableSchema schema =
      synthetic_schema(o.name, o.attributes, o.segments, sample);
  std::vector<DpaBenchRow> rows;
  for (const std::uint32_t n : o.blocks) {
    PlacementConfig cfg = PlacementConfig::with_blocks(n, schema.cell_count());
    cfg.validate();
    rows.push_back(bench_dpa(schema, cfg, o.count, seed));
  }
  write_output(o.out, out, [&](std::ostream &s) { write_dpa_csv(s, rows); });
  return 0;
}

int cmd_stats(const Options &o, std::ostream &out) {
  const Table t = Table::open(o.table);
  const Manifest &m = t.manifest();
  const BalanceStats b = t.balance_stats();
  out << "table " << m.schema.name() << "\n";
  out << "records " << m.total_records() << "\n";
  out << "cells " << m.cfg.m << ", blocks " << m.cfg.n << ", slots "
      << m.cfg.slots << ", trunk capacity " << m.cfg.trunk_capacity << "\n";
  out << "lambda " << fmt(m.cfg.lambda) << ", mu " << fmt(m.cfg.mu)
      << ", sigma " << fmt(m.cfg.sigma) << "\n";
  std::uint64_t trunks = 0;
  for (const auto &[ref, st] : m.trunk_state) trunks += st.trunk + 1;
  out << "trunks " << trunks << "\n";
  for (std::uint32_t s = 0; s < b.slots; ++s) {
    out << "slot " << s << ": mean " << fmt(b.mean[s]) << ", stddev "
        << fmt(b.stddev[s]) << ", cv " << fmt(b.coefficient_of_variation(s))
        << "\n";
  }
  if (!o.out.empty()) {
    write_output(o.out, out, [&](std::ostream &s) { write_balance_csv(s, b); });
  }
  return 0;
}

int cmd_verify(const Options &o, std::ostream &out) {
  const Table t = Table::open(o.table);
  const VerifyReport r = t.verify();
  out << "lines " << r.lines << ", orphan lines " << r.orphan_lines << "\n";
  for (const auto &p : r.problems) out << "problem: " << p << "\n";
  out << (r.ok() ? "ok" : "corrupt") << "\n";
  return r.ok() ? 0 : 2;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream &out,
            std::ostream &err) {
  CLI::App app{"Probabilistic block-placement table engine"};
  app.require_subcommand(1, 1);
  Options o;

  auto table_opt = [&](CLI::App *c) {
    c->add_option("--table", o.table, "Table directory")->required();
  };
  auto seed_opt = [&](CLI::App *c) {
    c->add_option("--seed", o.seed, "RNG seed (default: entropy)");
  };
  auto serial_opt = [&](CLI::App *c) {
    c->add_flag("--serial", o.serial, "Use the serial reference kernels");
  };

  auto *create = app.add_subcommand("create", "Create an empty table");
  table_opt(create);
  create->add_option("--config", o.config, "JSON with 'schema' and 'cfg'")->required();
  create->add_option("--sample", o.sample, "TSV sample for segment boundaries");

  auto *gen = app.add_subcommand("gen", "Generate uniform synthetic records");
  gen->add_option("--count", o.count, "Records")->required();
  gen->add_option("--out", o.out, "Output TSV (default stdout)");
  gen->add_option("--attributes", o.attributes, "Integer attributes");
  gen->add_option("--config-out", o.config_out, "Also write a create config");
  gen->add_option("--segments", o.segments, "Segments per query attribute");
  gen->add_option("--blocks", o.blocks, "Blocks n for the config")->delimiter(',');
  gen->add_option("--name", o.name, "Table name for the config");
  seed_opt(gen);

  auto *load = app.add_subcommand("load", "Append records from a TSV file");
  table_opt(load);
  load->add_option("--input", o.input, "TSV with a header row")->required();
  seed_opt(load);
  serial_opt(load);

  auto *query = app.add_subcommand("query", "Run a query");
  table_opt(query);
  query->add_option("text", o.query, "Query text")->required();
  query->add_flag("--explain", o.explain, "Print the plan without executing");
  seed_opt(query);
  serial_opt(query);

  auto *vpc = app.add_subcommand("validate-pc", "Observed completeness report");
  auto *mqe = app.add_subcommand("measure-qe", "Query efficiency report");
  for (auto *c : {vpc, mqe}) {
    table_opt(c);
    c->add_option("--confidences", o.confidences, "Comma-separated list")
        ->delimiter(',')
        ->required();
    c->add_option("--trials", o.trials, "Trials per confidence");
    c->add_option("--out", o.out, "CSV path (default stdout)");
    seed_opt(c);
    serial_opt(c);
  }

  auto *bench = app.add_subcommand("bench-dpa", "In-memory placement throughput");
  bench->add_option("--count", o.count, "Placements per configuration")->required();
  bench->add_option("--blocks", o.blocks, "Comma-separated block counts")
      ->delimiter(',');
  bench->add_option("--out", o.out, "CSV path (default stdout)");
  seed_opt(bench);

  auto *stats = app.add_subcommand("stats", "Table statistics");
  table_opt(stats);
  stats->add_option("--out", o.out, "Per-block balance CSV");

  auto *verify = app.add_subcommand("verify", "Check trunks against the manifest");
  table_opt(verify);

  std::vector<std::string> argv_store(args.begin(), args.end());
  if (argv_store.empty()) argv_store.push_back("probery");
  std::vector<char *> argv;
  for (auto &s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError &e) {
    err << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    for (double c : o.confidences) {
      if (!(c > 0.0 && c <= 1.0)) {
        throw Error(ErrorCode::kRange, "confidence " + fmt(c) + " is outside (0, 1]");
      }
    }
    if (create->parsed()) return cmd_create(o, out);
    if (gen->parsed()) return cmd_gen(o, out);
    if (load->parsed()) return cmd_load(o, out);
    if (query->parsed()) return cmd_query(o, out, err);
    if (vpc->parsed()) return cmd_validate_pc(o, out);
    if (mqe->parsed()) return cmd_measure_qe(o, out);
    if (bench->parsed()) return cmd_bench_dpa(o, out);
    if (stats->parsed()) return cmd_stats(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
  } catch (const Error &e) {
    err << error_code_name(e.code()) << ": " << e.what() << "\n";
    return is_user_error(e.code()) ? 1 : 2;
  } catch (const std::exception &e) {
    err << "internal: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

int run_cli(int argc, char **argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace probery
