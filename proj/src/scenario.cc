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

#include "bargain/scenario.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "bargain/errors.h"
#include "bargain/random.h"

namespace bargain {

const char* RoleName(Role r) { return r == Role::kA ? "A" : "B"; }

int Scenario::TotalItems() const {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

bool IsFeasible(const Division& d, const IssueVector& counts) {
  for (int k = 0; k < kNumIssues; ++k) {
    if (d.take[k] < 0 || d.take[k] > counts[k]) return false;
  }
  return true;
}

Division Complement(const Division& d, const IssueVector& counts) {
  Division out;
  for (int k = 0; k < kNumIssues; ++k) out.take[k] = counts[k] - d.take[k];
  return out;
}

int Score(const Division& division, std::span<const int> values) {
  if (values.size() != kNumIssues) {
    throw ContractError("Score: expected 3 values, got " +
                        std::to_string(values.size()));
  }
  int total = 0;
  for (int k = 0; k < kNumIssues; ++k) total += division.take[k] * values[k];
  return total;
}

namespace {

int Dot(const IssueVector& a, const IssueVector& b) {
  int total = 0;
  for (int k = 0; k < kNumIssues; ++k) total += a[k] * b[k];
  return total;
}

}  // namespace

std::vector<std::string> ValidateScenario(const Scenario& s) {
  std::vector<std::string> violations;
  auto check_non_negative = [&](const IssueVector& v, const char* what) {
    for (int k = 0; k < kNumIssues; ++k) {
      if (v[k] < 0) {
        violations.push_back(std::string(what) + "[" + std::to_string(k) +
                             "] is negative");
      }
    }
  };
  check_non_negative(s.counts, "counts");
  check_non_negative(s.values_a, "values_a");
  check_non_negative(s.values_b, "values_b");
  if (s.TotalItems() <= 0 ||
      std::all_of(s.counts.begin(), s.counts.end(), [](int c) { return c <= 0; })) {
    violations.push_back("scenario has no items");
  }
  const int dot_a = Dot(s.counts, s.values_a);
  const int dot_b = Dot(s.counts, s.values_b);
  if (dot_a != kMaxPoints) {
    violations.push_back("dot(counts, values_a) = " + std::to_string(dot_a) +
                         " != 10");
  }
  if (dot_b != kMaxPoints) {
    violations.push_back("dot(counts, values_b) = " + std::to_string(dot_b) +
                         " != 10");
  }
  return violations;
}

PoolStats PoolStats::Default() {
  PoolStats stats;
  stats.total_items_weights = {{5, 1.0}, {6, 1.0}, {7, 1.0}};
  return stats;
}

PoolStats PoolStatsFromScenarios(std::span<const Scenario> scenarios) {
  if (scenarios.empty()) throw DomainError("PoolStatsFromScenarios: empty pool");
  PoolStats stats;
  stats.total_items_weights.clear();
  stats.min_count = std::numeric_limits<int>::max();
  stats.max_count = 0;
  bool every_item_valued = true;
  for (const Scenario& s : scenarios) {
    stats.total_items_weights[s.TotalItems()] += 1.0;
    for (int k = 0; k < kNumIssues; ++k) {
      stats.min_count = std::min(stats.min_count, s.counts[k]);
      stats.max_count = std::max(stats.max_count, s.counts[k]);
      if (s.counts[k] > 0 && s.values_a[k] == 0 && s.values_b[k] == 0) {
        every_item_valued = false;
      }
    }
  }
  stats.require_each_item_valued = every_item_valued;
  return stats;
}

std::vector<IssueVector> ValueVectorsFor(const IssueVector& counts) {
  std::vector<IssueVector> out;
  auto limit = [&](int k) {
    return counts[k] == 0 ? 0 : kMaxPoints / counts[k];
  };
  for (int v0 = 0; v0 <= limit(0); ++v0) {
    for (int v1 = 0; v1 <= limit(1); ++v1) {
      for (int v2 = 0; v2 <= limit(2); ++v2) {
        IssueVector v{v0, v1, v2};
        if (Dot(counts, v) == kMaxPoints) out.push_back(v);
      }
    }
  }
  return out;
}

std::vector<Division> AllDivisions(const IssueVector& counts) {
  std::vector<Division> out;
  for (int a = 0; a <= counts[0]; ++a) {
    for (int b = 0; b <= counts[1]; ++b) {
      for (int c = 0; c <= counts[2]; ++c) out.push_back(Division{{a, b, c}});
    }
  }
  return out;
}

Scenario SampleScenario(uint64_t seed, const PoolStats& stats) {
  if (stats.total_items_weights.empty()) {
    throw SamplingError("SampleScenario: no total-item weights");
  }
  if (stats.min_count < 0 || stats.max_count < stats.min_count) {
    throw SamplingError("SampleScenario: bad per-issue count range");
  }
  std::vector<int> totals;
  std::vector<double> weights;
  for (const auto& [total, w] : stats.total_items_weights) {
    totals.push_back(total);
    weights.push_back(w);
  }

  Rng rng(seed);
  constexpr int kMaxAttempts = 200;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const int total = totals[rng.Categorical(weights)];
    std::vector<IssueVector> compositions;
    for (int a = stats.min_count; a <= stats.max_count; ++a) {
      for (int b = stats.min_count; b <= stats.max_count; ++b) {
        const int c = total - a - b;
        if (c >= stats.min_count && c <= stats.max_count) {
          compositions.push_back({a, b, c});
        }
      }
    }
    if (compositions.empty()) continue;
    const IssueVector counts =
        compositions[rng.Below(static_cast<int>(compositions.size()))];
    const std::vector<IssueVector> values = ValueVectorsFor(counts);
    if (values.empty()) continue;
    Scenario s;
    s.counts = counts;
    s.values_a = values[rng.Below(static_cast<int>(values.size()))];
    s.values_b = values[rng.Below(static_cast<int>(values.size()))];
    if (stats.require_each_item_valued) {
      bool ok = true;
      for (int k = 0; k < kNumIssues; ++k) {
        if (counts[k] > 0 && s.values_a[k] == 0 && s.values_b[k] == 0) ok = false;
      }
      if (!ok) continue;
    }
    if (!ValidateScenario(s).empty()) continue;
    std::ostringstream id;
    id << "s" << std::hex << seed;
    s.id = id.str();
    return s;
  }
  throw SamplingError("SampleScenario: constraints infeasible after " +
                      std::to_string(kMaxAttempts) + " attempts");
}

std::string ToString(const IssueVector& v) {
  return "(" + std::to_string(v[0]) + "," + std::to_string(v[1]) + "," +
         std::to_string(v[2]) + ")";
}

}  // namespace bargain
