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

#include <algorithm>
#include <numeric>

#include "probery/error.hpp"
#include "probery/query.hpp"

namespace probery {

double clamp_confidence(double p0) {
  return std::clamp(p0, kMinConfidence, 1.0);
}

SelectionResult h_selection(std::span<const UniverseEntry> universe, double p0,
                            Rng &rng) {
  for (const auto &e : universe) {
    if (!(e.pne >= 0.0 && e.pne <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "PNE outside [0, 1]");
    }
  }
  SelectionResult result;
  result.requested = clamp_confidence(p0);

  // Unexamined blocks live in pool[0, remaining); a draw swaps the pick to
  // the end of that range.
  std::vector<std::size_t> pool(universe.size());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::size_t remaining = pool.size();
  double product = 1.0;
  double budget = result.requested;

  while (budget < 1.0 - kClosureTolerance && remaining > 0) {
    const auto k = static_cast<std::size_t>(uniform_index(rng, remaining));
    const std::size_t x = pool[k];
    std::swap(pool[k], pool[remaining - 1]);
    --remaining;
    ++result.examined;
    const double pne = universe[x].pne;
    // pne > budget  <=>  product * pne > requested; the product form keeps
    // expected_pc >= requested exact in floating point.
    const double next = product * pne;
    if (next > result.requested) {
      product = next;
      budget = result.requested / product;
      result.skipped.push_back(universe[x]);
    } else {
      result.selected.push_back(universe[x].block);
    }
  }
  for (std::size_t k = 0; k < remaining; ++k) {
    result.selected.push_back(universe[pool[k]].block);
  }
  std::sort(result.selected.begin(), result.selected.end());
  result.expected_pc = product;
  result.budget = budget;
  return result;
}

}  // namespace probery
