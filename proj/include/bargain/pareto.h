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

#ifndef BARGAIN_PARETO_H_
#define BARGAIN_PARETO_H_

#include <vector>

#include "bargain/scenario.h"

namespace bargain {

inline constexpr int kMaxEnumerableItems = 20;

struct FrontierPoint {
  int points_a = 0;
  int points_b = 0;
  // A's share for every division reaching this pair, lexicographic order.
  std::vector<Division> witnesses;
};

// Non-dominated (points_a, points_b) pairs over all complementary divisions,
// ordered by decreasing points_a. Throws ContractError on invalid scenarios
// or more than kMaxEnumerableItems items.
std::vector<FrontierPoint> ParetoFrontier(const Scenario& s);

// True when no complementary division weakly improves both sides with at
// least one strict improvement.
bool IsParetoOptimal(const Scenario& s, int points_a, int points_b);

}  // namespace bargain

#endif  // BARGAIN_PARETO_H_
