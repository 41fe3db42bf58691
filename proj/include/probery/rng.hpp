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
#include <random>

namespace probery {

/// Engine used wherever a caller-owned random stream is needed (query
/// selection, data generation). Distributions below are hand-rolled so
/// sequences are identical across standard library implementations.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent child seed for (seed, a, b); used for per-record and
/// per-trial streams so parallel and serial paths agree.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return splitmix64(splitmix64(seed ^ splitmix64(a)) + b);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double bits_to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

template <class Engine>
double uniform_unit(Engine &rng) {
  return bits_to_unit(static_cast<std::uint64_t>(rng()));
}

/// Uniform integer in [0, bound) by rejection; bound must be > 0.
template <class Engine>
std::uint64_t uniform_index(Engine &rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = static_cast<std::uint64_t>(rng());
  } while (x >= limit);
  return x % bound;
}

/// Seed from the OS when the user did not pass one.
inline std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace probery
