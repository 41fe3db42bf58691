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

#include "probery/table.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>

#include "probery/error.hpp"
#include "probery/record_codec.hpp"

namespace probery {

namespace fs = std::filesystem;

namespace {

constexpr const char *kManifestFile = "manifest.json";

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string padded(const char *prefix, std::uint64_t index, int width,
                   const char *suffix = "") {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%0*llu%s", prefix, width,
                static_cast<unsigned long long>(index), suffix);
  return buf;
}

/// Appends `data` to a trunk. A fresh trunk is truncated first; an existing
/// one is cut back to its recorded length so orphan lines are dropped.
void write_trunk(const fs::path &path, bool fresh, std::uint64_t recorded_bytes,
                 const std::string &data) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) {
    throw StorageError(ErrorCode::kStorage, path.parent_path().string(),
                       "cannot create block directory (" + ec.message() + ")");
  }
  if (!fresh) {
    const auto size = fs::file_size(path, ec);
    if (ec) {
      throw StorageError(ErrorCode::kCorruption, path.string(),
                         "missing trunk file");
    }
    if (size < recorded_bytes) {
      throw StorageError(ErrorCode::kCorruption, path.string(),
                         "trunk shorter than recorded");
    }
    if (size > recorded_bytes) fs::resize_file(path, recorded_bytes, ec);
    if (ec) {
      throw StorageError(ErrorCode::kStorage, path.string(),
                         "cannot truncate orphan lines");
    }
  }
  std::ofstream out(path, std::ios::binary |
                              (fresh ? std::ios::trunc : std::ios::app));
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) {
    throw StorageError(ErrorCode::kStorage, path.string(),
                       "cannot write trunk");
  }
}

struct TrunkTask {
  fs::path path;
  std::uint32_t expected_lines = 0;
  /// Only the active trunk is limited; completed trunks are read whole.
  std::uint64_t byte_limit = UINT64_MAX;
};

std::string read_trunk(const TrunkTask &task) {
  std::ifstream in(task.path, std::ios::binary);
  if (!in) {
    throw StorageError(ErrorCode::kCorruption, task.path.string(),
                       "missing trunk file");
  }
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::uint64_t>(in.tellg());
  if (task.byte_limit != UINT64_MAX && size < task.byte_limit) {
    throw StorageError(ErrorCode::kCorruption, task.path.string(),
                       "trunk shorter than recorded");
  }
  const std::uint64_t len = std::min(size, task.byte_limit);
  std::string data(len, '\0');
  in.seekg(0);
  in.read(data.data(), static_cast<std::streamsize>(len));
  if (!in) {
    throw StorageError(ErrorCode::kStorage, task.path.string(),
                       "cannot read trunk");
  }
  return data;
}

/// Visits each line header; `on_line(cell, rest)` is called for every line.
template <class OnLine>
std::uint32_t for_each_line(const TrunkTask &task, const std::string &data,
                            OnLine &&on_line) {
  std::uint32_t lines = 0;
  std::size_t pos = 0;
  while (pos < data.size()) {
    std::size_t nl = data.find('\n', pos);
    if (nl == std::string::npos) {
      throw StorageError(ErrorCode::kCorruption, task.path.string(),
                         "unterminated trunk line");
    }
    std::string_view line(data.data() + pos, nl - pos);
    std::string_view rest;
    const auto cell = parse_header(line, &rest);
    if (!cell) {
      throw StorageError(ErrorCode::kCorruption, task.path.string(),
                         "malformed line header");
    }
    on_line(*cell, rest);
    ++lines;
    pos = nl + 1;
  }
  if (lines != task.expected_lines) {
    throw StorageError(ErrorCode::kCorruption, task.path.string(),
                       "trunk holds " + std::to_string(lines) +
                           " lines, manifest records " +
                           std::to_string(task.expected_lines));
  }
  return lines;
}

}  // namespace

Table::Table(fs::path dir, Manifest manifest)
    : dir_(std::move(dir)), manifest_(std::move(manifest)) {
  table_ = build_prob_table(manifest_.cfg);
}

Table Table::create(TableSchema schema, PlacementConfig cfg,
                    const fs::path &directory) {
  if (cfg.m == 0) cfg.m = schema.cell_count();
  if (cfg.m != schema.cell_count()) {
    throw Error(ErrorCode::kInvalidConfig,
                "config m = " + std::to_string(cfg.m) + " but the schema has " +
                    std::to_string(schema.cell_count()) + " cells");
  }
  cfg.validate();
  std::error_code ec;
  if (fs::exists(directory, ec) && !fs::is_empty(directory, ec)) {
    throw StorageError(ErrorCode::kAlreadyExists, directory.string(),
                       "table directory is not empty");
  }
  fs::create_directories(directory, ec);
  if (ec) {
    throw StorageError(ErrorCode::kStorage, directory.string(),
                       "cannot create table directory (" + ec.message() + ")");
  }
  Manifest m;
  m.schema = std::move(schema);
  m.cfg = cfg;
  m.created = m.modified = utc_timestamp();
  Table t(directory, std::move(m));
  t.manifest_.save(directory / kManifestFile);
  return t;
}

Table Table::open(const fs::path &directory) {
  Manifest m = Manifest::load(directory / kManifestFile);
  try {
    m.cfg.validate();
  } catch (const Error &e) {
    throw StorageError(ErrorCode::kCorruption, directory.string(),
                       std::string("manifest config invalid: ") + e.what());
  }
  if (m.cfg.m != m.schema.cell_count()) {
    throw StorageError(ErrorCode::kCorruption, directory.string(),
                       "manifest m disagrees with schema");
  }
  return Table(directory, std::move(m));
}

fs::path Table::trunk_path(const BlockRef &ref, std::uint32_t trunk) const {
  return dir_ / padded("slot_", ref.slot, 4) / padded("block_", ref.block, 6) /
         padded("trunk_", trunk, 6, ".dat");
}

Placement Table::place_record(const Record &record, Rng &rng) {
  const Placement p =
      decide_placement(manifest_.schema, manifest_.cfg, table_, record, rng);
  ++manifest_.counts[{p.slot, p.cell}];
  return p;
}

TrunkPosition Table::append_record(const Placement &placement,
                                   const Record &record) {
  const auto &cfg = manifest_.cfg;
  if (placement.slot >= cfg.slots || placement.block < 1 ||
      placement.block > cfg.n || placement.cell >= cfg.m) {
    throw Error(ErrorCode::kInvalidArgument, "placement out of range");
  }
  const BlockRef ref{placement.slot, placement.block};
  TrunkState st{};
  const auto it = manifest_.trunk_state.find(ref);
  if (it != manifest_.trunk_state.end()) st = it->second;
  bool fresh = it == manifest_.trunk_state.end();
  if (st.fill == cfg.trunk_capacity) {
    ++st.trunk;
    st.fill = 0;
    st.bytes = 0;
    fresh = true;
  }
  const std::string line = encode_line(placement.cell, manifest_.schema, record);
  write_trunk(trunk_path(ref, st.trunk), fresh, st.bytes, line);
  const TrunkPosition pos{st.trunk, st.fill};
  ++st.fill;
  st.bytes += line.size();
  manifest_.trunk_state[ref] = st;
  return pos;
}

LoadStats Table::load_batch(std::span<const Record> records, Rng &rng,
                            Exec exec) {
  LoadStats stats;
  if (records.empty()) return stats;
  const auto &cfg = manifest_.cfg;

  auto t0 = std::chrono::steady_clock::now();
  std::vector<Placement> placements(records.size());
  const kernels::PlacementContext ctx{manifest_.schema, cfg, table_,
                                      static_cast<std::uint64_t>(rng()),
                                      manifest_.total_records()};
  kernels::place(exec, ctx, records, placements);
  stats.placement_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  // Bucket record indexes by block, preserving input order within a block.
  const std::size_t universe = static_cast<std::size_t>(cfg.slots) * cfg.n;
  std::vector<std::uint32_t> offsets(universe + 1, 0);
  for (const auto &p : placements) {
    ++offsets[static_cast<std::size_t>(p.slot) * cfg.n + p.block];
  }
  for (std::size_t b = 0; b < universe; ++b) offsets[b + 1] += offsets[b];
  std::vector<std::uint32_t> order(records.size());
  {
    std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::uint32_t i = 0; i < records.size(); ++i) {
      const auto &p = placements[i];
      order[cursor[static_cast<std::size_t>(p.slot) * cfg.n + p.block - 1]++] = i;
    }
  }
  std::vector<std::uint32_t> touched;
  for (std::uint32_t b = 0; b < universe; ++b) {
    if (offsets[b + 1] > offsets[b]) touched.push_back(b);
  }

  std::vector<TrunkState> new_state(touched.size());
  std::vector<std::exception_ptr> failures(touched.size());
  auto write_block = [&](std::size_t k) {
    const std::uint32_t b = touched[k];
    const BlockRef ref{b / cfg.n, b % cfg.n + 1};
    TrunkState st{};
    const auto it = manifest_.trunk_state.find(ref);
    bool fresh = it == manifest_.trunk_state.end();
    if (!fresh) st = it->second;
    std::string chunk;
    std::uint64_t recorded = st.bytes;
    auto flush = [&] {
      if (chunk.empty()) return;
      write_trunk(trunk_path(ref, st.trunk), fresh, recorded, chunk);
      chunk.clear();
    };
    for (std::uint32_t r = offsets[b]; r < offsets[b + 1]; ++r) {
      if (st.fill == cfg.trunk_capacity) {
        flush();
        ++st.trunk;
        st.fill = 0;
        st.bytes = 0;
        recorded = 0;
        fresh = true;
      }
      const std::size_t before = chunk.size();
      const auto i = order[r];
      append_line(chunk, placements[i].cell, manifest_.schema, records[i]);
      st.bytes += chunk.size() - before;
      ++st.fill;
    }
    flush();
    new_state[k] = st;
  };

  const auto blocks = static_cast<std::int64_t>(touched.size());
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t k = 0; k < blocks; ++k) {
      try {
        write_block(k);
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  } else {
    for (std::int64_t k = 0; k < blocks; ++k) {
      try {
        write_block(k);
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  }

  std::exception_ptr first_failure;
  for (std::size_t k = 0; k < touched.size(); ++k) {
    if (failures[k]) {
      if (!first_failure) first_failure = failures[k];
      continue;
    }
    const std::uint32_t b = touched[k];
    manifest_.trunk_state[{b / cfg.n, b % cfg.n + 1}] = new_state[k];
    for (std::uint32_t r = offsets[b]; r < offsets[b + 1]; ++r) {
      const auto &p = placements[order[r]];
      ++manifest_.counts[{p.slot, p.cell}];
      ++stats.count;
    }
  }
  persist();
  stats.write_seconds = seconds_since(t0);
  if (first_failure) std::rethrow_exception(first_failure);
  return stats;
}

namespace {

std::vector<TrunkTask> trunk_tasks(const Table &table,
                                   std::span<const BlockRef> blocks) {
  const auto &m = table.manifest();
  std::vector<BlockRef> sorted(blocks.begin(), blocks.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<TrunkTask> tasks;
  for (const auto &ref : sorted) {
    if (ref.slot >= m.cfg.slots || ref.block < 1 || ref.block > m.cfg.n) {
      throw Error(ErrorCode::kInvalidArgument, "block reference out of range");
    }
    const auto it = m.trunk_state.find(ref);
    if (it == m.trunk_state.end()) continue;
    for (std::uint32_t t = 0; t <= it->second.trunk; ++t) {
      TrunkTask task;
      task.path = table.trunk_path(ref, t);
      if (t < it->second.trunk) {
        task.expected_lines = m.cfg.trunk_capacity;
      } else {
        task.expected_lines = it->second.fill;
        task.byte_limit = it->second.bytes;
      }
      tasks.push_back(std::move(task));
    }
  }
  return tasks;
}

template <class PerTask>
void run_tasks(Exec exec, std::size_t count, PerTask &&per_task) {
  std::vector<std::exception_ptr> failures(count);
  const auto n = static_cast<std::int64_t>(count);
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < n; ++k) {
      try {
        per_task(k);
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  } else {
    for (std::int64_t k = 0; k < n; ++k) per_task(k);
  }
  for (auto &f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

}  // namespace

ScanResult Table::scan_blocks(std::span<const BlockRef> blocks,
                              std::span<const std::uint64_t> cells,
                              Exec exec) const {
  ScanResult result;
  const auto tasks = trunk_tasks(*this, blocks);
  std::vector<char> wanted(manifest_.cfg.m, 0);
  for (auto c : cells) {
    if (c < wanted.size()) wanted[c] = 1;
  }
  std::vector<std::vector<Record>> outputs(tasks.size());
  std::vector<std::uint64_t> lines(tasks.size(), 0);
  run_tasks(exec, tasks.size(), [&](std::size_t k) {
    const std::string data = read_trunk(tasks[k]);
    lines[k] = for_each_line(tasks[k], data, [&](std::uint64_t cell,
                                                 std::string_view rest) {
      if (cell < wanted.size() && wanted[cell]) {
        outputs[k].push_back(decode_fields(manifest_.schema, rest));
      }
    });
  });
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    result.lines_examined += lines[k];
    for (auto &r : outputs[k]) result.records.push_back(std::move(r));
  }
  result.trunks_read = tasks.size();
  return result;
}

std::vector<BlockRef> Table::blocks_containing(
    std::span<const std::uint64_t> cells) const {
  std::vector<char> wanted(manifest_.cfg.m, 0);
  for (auto c : cells) {
    if (c < wanted.size()) wanted[c] = 1;
  }
  std::vector<BlockRef> out;
  for (const auto &[ref, st] : manifest_.trunk_state) {
    const BlockRef one[] = {ref};
    const auto tasks = trunk_tasks(*this, one);
    bool found = false;
    for (const auto &task : tasks) {
      const std::string data = read_trunk(task);
      for_each_line(task, data, [&](std::uint64_t cell, std::string_view) {
        if (cell < wanted.size() && wanted[cell]) found = true;
      });
      if (found) break;
    }
    if (found) out.push_back(ref);
  }
  return out;
}

void Table::read_block(
    const BlockRef &ref,
    std::vector<std::pair<std::uint64_t, Record>> &out) const {
  const BlockRef one[] = {ref};
  for (const auto &task : trunk_tasks(*this, one)) {
    const std::string data = read_trunk(task);
    for_each_line(task, data, [&](std::uint64_t cell, std::string_view rest) {
      out.emplace_back(cell, decode_fields(manifest_.schema, rest));
    });
  }
}

std::vector<BlockRef> Table::all_blocks() const {
  std::vector<BlockRef> out;
  out.reserve(static_cast<std::size_t>(manifest_.cfg.slots) * manifest_.cfg.n);
  for (std::uint32_t s = 0; s < manifest_.cfg.slots; ++s) {
    for (std::uint32_t b = 1; b <= manifest_.cfg.n; ++b) out.push_back({s, b});
  }
  return out;
}

BalanceStats compute_balance(const Manifest &manifest) {
  BalanceStats stats;
  stats.slots = manifest.cfg.slots;
  stats.blocks = manifest.cfg.n;
  stats.counts.assign(static_cast<std::size_t>(stats.slots) * stats.blocks, 0);
  for (const auto &[ref, st] : manifest.trunk_state) {
    stats.counts[static_cast<std::size_t>(ref.slot) * stats.blocks + ref.block -
                 1] = manifest.block_records(ref);
  }
  stats.mean.assign(stats.slots, 0.0);
  stats.stddev.assign(stats.slots, 0.0);
  for (std::uint32_t s = 0; s < stats.slots; ++s) {
    const auto begin = stats.counts.begin() + static_cast<std::ptrdiff_t>(s) * stats.blocks;
    double sum = 0.0;
    for (auto it = begin; it != begin + stats.blocks; ++it) sum += *it;
    const double mean = sum / stats.blocks;
    double ss = 0.0;
    for (auto it = begin; it != begin + stats.blocks; ++it) {
      ss += (*it - mean) * (*it - mean);
    }
    stats.mean[s] = mean;
    stats.stddev[s] = std::sqrt(ss / stats.blocks);
    stats.total += static_cast<std::uint64_t>(sum);
  }
  return stats;
}

BalanceStats Table::balance_stats() const { return compute_balance(manifest_); }

VerifyReport Table::verify() const {
  VerifyReport report;
  const auto &cfg = manifest_.cfg;
  std::map<SlotCell, std::uint64_t> seen;
  for (const auto &[ref, st] : manifest_.trunk_state) {
    if (st.fill == 0 || st.fill > cfg.trunk_capacity) {
      report.problems.push_back("block " + std::to_string(ref.slot) + "/" +
                                std::to_string(ref.block) +
                                " has invalid fill " + std::to_string(st.fill));
      continue;
    }
    const BlockRef one[] = {ref};
    for (const auto &task : trunk_tasks(*this, one)) {
      try {
        const std::string data = read_trunk(task);
        report.lines += for_each_line(task, data, [&](std::uint64_t cell,
                                                      std::string_view rest) {
          const Record r = decode_fields(manifest_.schema, rest);
          if (cell >= cfg.m || locate_cell_flat(manifest_.schema, r) != cell) {
            throw StorageError(ErrorCode::kCorruption, task.path.string(),
                               "line header disagrees with its record");
          }
          ++seen[{ref.slot, cell}];
        });
        if (task.byte_limit != UINT64_MAX) {
          const auto size = fs::file_size(task.path);
          if (size > task.byte_limit) {
            std::ifstream in(task.path, std::ios::binary);
            in.seekg(static_cast<std::streamoff>(task.byte_limit));
            std::string tail((std::istreambuf_iterator<char>(in)), {});
            const auto extra = static_cast<std::uint64_t>(
                std::count(tail.begin(), tail.end(), '\n'));
            report.orphan_lines += extra;
            report.problems.push_back(task.path.string() + ": " +
                                      std::to_string(extra) +
                                      " orphan line(s) past recorded length");
          }
        }
      } catch (const Error &e) {
        report.problems.push_back(e.what());
      }
    }
  }
  // Trunk files the manifest does not reference belong to an interrupted
  // load (a rotation or a block's first trunk).
  std::error_code ec;
  for (fs::recursive_directory_iterator it(dir_, ec), end; !ec && it != end;
       it.increment(ec)) {
    const auto &path = it->path();
    if (!it->is_regular_file() || path.extension() != ".dat") continue;
    unsigned slot = 0, block = 0, trunk = 0;
    const auto rel = fs::relative(path, dir_).string();
    if (std::sscanf(rel.c_str(), "slot_%u/block_%u/trunk_%u.dat", &slot, &block,
                    &trunk) != 3) {
      continue;
    }
    const auto st = manifest_.trunk_state.find({slot, block});
    if (st != manifest_.trunk_state.end() && trunk <= st->second.trunk) continue;
    std::ifstream in(path, std::ios::binary);
    std::string body((std::istreambuf_iterator<char>(in)), {});
    const auto extra =
        static_cast<std::uint64_t>(std::count(body.begin(), body.end(), '\n'));
    report.orphan_lines += extra;
    report.problems.push_back(path.string() + ": unreferenced trunk with " +
                              std::to_string(extra) + " line(s)");
  }
  if (seen != manifest_.counts) {
    report.problems.push_back(
        "per-(slot, cell) line counts disagree with manifest counts");
  }
  if (report.lines != manifest_.total_records()) {
    report.problems.push_back("trunks hold " + std::to_string(report.lines) +
                              " lines but manifest counts " +
                              std::to_string(manifest_.total_records()));
  }
  return report;
}

void Table::persist() {
  manifest_.modified = utc_timestamp();
  manifest_.save(dir_ / kManifestFile);
}

}  // namespace probery
