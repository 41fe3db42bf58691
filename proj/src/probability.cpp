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

#include "probery/probability.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <string>

#include "probery/error.hpp"

namespace probery {

namespace {

// Standardized argument (x - mu) / (sigma * sqrt2) at x = a * lambda / n,
// formed as (a*lambda - mu*n) / (n*sigma*sqrt2) so mirrored blocks get
// arguments of exactly opposite sign when mu = lambda / 2.
double block_edge_z(std::uint32_t a, const PlacementConfig &cfg) {
  const double n = cfg.n;
  return (a * cfg.lambda - cfg.mu * n) / (n * cfg.sigma * std::numbers::sqrt2);
}

double z_of(double x, const PlacementConfig &cfg) {
  return (x - cfg.mu) / (cfg.sigma * std::numbers::sqrt2);
}

}  // namespace

double PlacementConfig::epsilon_tail() const {
  return 0.5 * std::erfc(-z_of(0.0, *this)) + 0.5 * std::erfc(z_of(lambda, *this));
}

void PlacementConfig::validate() const {
  auto fail = [](const std::string &msg) {
    throw Error(ErrorCode::kInvalidConfig, msg);
  };
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail("lambda must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail("sigma must be positive");
  if (!std::isfinite(mu)) fail("mu must be finite");
  if (n == 0 || m == 0) fail("n and m must be positive");
  if (slots == 0) fail("slot count must be >= 1");
  if (trunk_capacity == 0) fail("trunk capacity must be >= 1");
  if (std::floor(lambda) != lambda) fail("lambda must be an integer");
  if (!(static_cast<double>(n) > lambda)) fail("n must exceed lambda");
  if (n % static_cast<std::uint64_t>(lambda) != 0) {
    fail("n must be a multiple of lambda");
  }
  if (n % m != 0) fail("n must be a multiple of m");
}

PlacementConfig PlacementConfig::with_blocks(std::uint32_t n, std::uint64_t m) {
  PlacementConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.mu = 0.5 * cfg.lambda;
  return cfg;
}

double density(double x, const PlacementConfig &cfg) {
  const double t = (x - cfg.mu) / cfg.sigma;
  return std::exp(-0.5 * t * t) / (cfg.sigma * std::sqrt(2.0 * std::numbers::pi));
}

double cdf(double x, const PlacementConfig &cfg) {
  return 0.5 * std::erfc(-z_of(x, cfg));
}

double block_pp(std::uint32_t a, const PlacementConfig &cfg) {
  if (a < 1 || a > cfg.n) {
    throw Error(ErrorCode::kInvalidArgument,
                "block index " + std::to_string(a) + " out of range");
  }
  const double zlo = block_edge_z(a - 1, cfg);
  const double zhi = block_edge_z(a, cfg);
  double f;
  if (zhi <= 0.0) {
    f = 0.5 * (std::erfc(-zhi) - std::erfc(-zlo));
  } else if (zlo >= 0.0) {
    f = 0.5 * (std::erfc(zlo) - std::erfc(zhi));
  } else {
    f = 1.0 - 0.5 * (std::erfc(-zlo) + std::erfc(zhi));
  }
  return f < 1e-300 ? DBL_MIN : f;
}

std::uint32_t offset_index(std::uint64_t i, std::uint32_t j,
                           const PlacementConfig &cfg) {
  if (i < 1 || i > cfg.m || j < 1 || j > cfg.n) {
    throw Error(ErrorCode::kInvalidArgument,
                "offset index (" + std::to_string(i) + ", " +
                    std::to_string(j) + ") out of range");
  }
  const std::uint64_t n = cfg.n;
  return static_cast<std::uint32_t>(((j - 1) + (i - 1) * cfg.offset_step()) % n +
                                    1);
}

double dpa_prob(std::uint64_t i, std::uint32_t j, const PlacementConfig &cfg) {
  return block_pp(offset_index(i, j, cfg), cfg);
}

double non_existence_prob(double p, std::uint64_t omega) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "probability outside [0, 1]");
  }
  if (omega == 0) return 1.0;
  if (p == 1.0) return 0.0;
  return std::exp(static_cast<double>(omega) * std::log1p(-p));
}

double existence_prob(double p, std::uint64_t omega) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "probability outside [0, 1]");
  }
  if (omega == 0) return 0.0;
  if (p == 1.0) return 1.0;
  return -std::expm1(static_cast<double>(omega) * std::log1p(-p));
}

ProbTable::ProbTable(const PlacementConfig &cfg) {
  pp_.resize(cfg.n);
  cum_.resize(cfg.n);
  double acc = 0.0;
  for (std::uint32_t a = 0; a < cfg.n; ++a) {
    pp_[a] = block_pp(a + 1, cfg);
    acc += pp_[a];
    cum_[a] = acc;
  }
  total_ = acc;
}

std::uint32_t ProbTable::sample(double u) const {
  if (!(u >= 0.0 && u < total_)) {
    throw Error(ErrorCode::kInvalidArgument, "sample point outside [0, total)");
  }
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  return static_cast<std::uint32_t>(it - cum_.begin()) + 1;
}

std::uint32_t ProbTable::sample_unit(double unit) const {
  double u = unit * total_;
  if (u >= total_) u = std::nextafter(total_, 0.0);
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  return static_cast<std::uint32_t>(it - cum_.begin()) + 1;
}

ProbTable build_prob_table(const PlacementConfig &cfg) { return ProbTable(cfg); }

std::uint32_t sample_block(const ProbTable &table, double u) {
  return table.sample(u);
}

}  // namespace probery
