// Copyright 2026 The Bargain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BARGAIN_SCENARIO_H_
#define BARGAIN_SCENARIO_H_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bargain {

inline constexpr int kNumIssues = 3;
// Maximum points any player can score in a valid scenario.
inline constexpr int kMaxPoints = 10;

using IssueVector = std::array<int, kNumIssues>;

enum class Role { kA = 0, kB = 1 };

constexpr Role Other(Role r) { return r == Role::kA ? Role::kB : Role::kA; }
constexpr int Index(Role r) { return static_cast<int>(r); }
const char* RoleName(Role r);

// Item counts for books, hats and balls plus each side's private values.
struct Scenario {
  IssueVector counts{};
  IssueVector values_a{};
  IssueVector values_b{};
  std::string id;

  const IssueVector& values(Role r) const {
    return r == Role::kA ? values_a : values_b;
  }
  int TotalItems() const;
  bool operator==(const Scenario&) const = default;
};

// Items one side claims. The other side's share is the complement.
struct Division {
  IssueVector take{};
  bool operator==(const Division&) const = default;
  auto operator<=>(const Division&) const = default;
};

bool IsFeasible(const Division& d, const IssueVector& counts);
Division Complement(const Division& d, const IssueVector& counts);

// dot(take, values). Throws ContractError when values is not 3-dimensional.
int Score(const Division& division, std::span<const int> values);

// Every invariant violation; empty means the scenario is valid.
std::vector<std::string> ValidateScenario(const Scenario& s);

// Constraints for the scenario sampler. The total item count is drawn from
// `total_items_weights`; per-issue counts are uniform over compositions that
// respect [min_count, max_count].
struct PoolStats {
  std::map<int, double> total_items_weights;
  int min_count = 1;
  int max_count = 4;
  bool require_each_item_valued = true;

  static PoolStats Default();
};

// Empirical constraints from a scenario pool (histogram of total items and
// observed per-issue count range).
PoolStats PoolStatsFromScenarios(std::span<const Scenario> scenarios);

// Deterministic in `seed`. Throws SamplingError if no valid scenario is found
// after bounded retries.
Scenario SampleScenario(uint64_t seed, const PoolStats& stats);

// All value vectors v with dot(counts, v) == kMaxPoints.
std::vector<IssueVector> ValueVectorsFor(const IssueVector& counts);

// Every Division with 0 <= take[k] <= counts[k], lexicographic order.
std::vector<Division> AllDivisions(const IssueVector& counts);

std::string ToString(const IssueVector& v);

}  // namespace bargain

#endif  // BARGAIN_SCENARIO_H_
