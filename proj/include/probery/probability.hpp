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

#include <cstdint>
#include <span>
#include <vector>

namespace probery {

/// Parameters of the placement distribution.
///
/// The density is N(mu, sigma^2) restricted to [0, lambda]; the n blocks of a
/// slot tile that interval with width lambda / n. Cells are shifted against
/// each other by `offset_step() = n / m` blocks.
struct PlacementConfig {
  double lambda = 4.0;
  double sigma = 0.3989;
  double mu = 2.0;
  std::uint32_t n = 500;
  std::uint64_t m = 125;
  std::uint32_t slots = 1;
  std::uint32_t trunk_capacity = 1000;

  double delta_x() const { return lambda / n; }
  std::uint64_t offset_step() const { return n / m; }
  double epsilon_tail() const;

  /// Throws invalid-config when n <= lambda, lambda is not integral,
  /// n % lambda != 0, n % m != 0, or any count is zero.
  void validate() const;

  /// Default parameters for a given block/cell count (mu = lambda / 2).
  static PlacementConfig with_blocks(std::uint32_t n, std::uint64_t m);
};

double density(double x, const PlacementConfig &cfg);
double cdf(double x, const PlacementConfig &cfg);

/// f(a) for block a in 1..n: mass of the density over block a's interval,
/// floored at the smallest normal double so no block has zero probability.
double block_pp(std::uint32_t a, const PlacementConfig &cfg);

/// offset(i, j) for cell i in 1..m and block j in 1..n, wrapping past n.
std::uint32_t offset_index(std::uint64_t i, std::uint32_t j,
                           const PlacementConfig &cfg);

/// F_DPA(i, j) = f(offset(i, j)), 1-based indexes.
double dpa_prob(std::uint64_t i, std::uint32_t j, const PlacementConfig &cfg);

/// 1 - (1 - p)^omega evaluated in the log domain.
double existence_prob(double p, std::uint64_t omega);
/// (1 - p)^omega.
double non_existence_prob(double p, std::uint64_t omega);

/// Lookup table over f for inverse-CDF sampling by binary search.
class ProbTable {
 public:
  ProbTable() = default;
  explicit ProbTable(const PlacementConfig &cfg);

  std::uint32_t size() const { return static_cast<std::uint32_t>(pp_.size()); }
  /// pp[a] = f(a + 1).
  std::span<const double> pp() const { return pp_; }
  std::span<const double> cum() const { return cum_; }
  double total() const { return total_; }

  /// Smallest 1-based block a with cum[a-1] > u; u must lie in [0, total).
  std::uint32_t sample(double u) const;
  /// Sample from a unit uniform in [0, 1), scaled onto [0, total).
  std::uint32_t sample_unit(double unit) const;

 private:
  std::vector<double> pp_;
  std::vector<double> cum_;
  double total_ = 0.0;
};

ProbTable build_prob_table(const PlacementConfig &cfg);
std::uint32_t sample_block(const ProbTable &table, double u);

/// Block j (1-based) of cell i (0-based) that maps onto table block x; the
/// inverse of offset_index for a fixed cell.
inline std::uint32_t block_for_offset(std::uint64_t cell0, std::uint32_t x,
                                      const PlacementConfig &cfg) {
  const std::uint64_t n = cfg.n;
  const std::uint64_t shift = (cell0 * cfg.offset_step()) % n;
  return static_cast<std::uint32_t>((x - 1 + n - shift) % n + 1);
}

}  // namespace probery
