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

#include "bargain/pareto.h"

#include <algorithm>
#include <map>
#include <string>

#include "bargain/errors.h"

namespace bargain {

std::vector<FrontierPoint> ParetoFrontier(const Scenario& s) {
  const auto violations = ValidateScenario(s);
  if (!violations.empty()) {
    throw ContractError("ParetoFrontier: invalid scenario: " + violations[0]);
  }
  if (s.TotalItems() > kMaxEnumerableItems) {
    throw ContractError("ParetoFrontier: too many items to enumerate");
  }
  // Divisions come out in lexicographic order, so witness lists stay sorted.
  std::map<std::pair<int, int>, std::vector<Division>> by_points;
  for (const Division& d : AllDivisions(s.counts)) {
    const int pa = Score(d, s.values_a);
    const int pb = Score(Complement(d, s.counts), s.values_b);
    by_points[{pa, pb}].push_back(d);
  }
  std::vector<FrontierPoint> frontier;
  // Walk by decreasing points_a; a pair survives iff its points_b beats every
  // pair with strictly larger points_a.
  int best_b = -1;
  for (auto it = by_points.rbegin(); it != by_points.rend();) {
    const int pa = it->first.first;
    // Within one points_a only the largest points_b can survive; map order
    // puts it first when iterating in reverse.
    const int pb = it->first.second;
    if (pb > best_b) {
      frontier.push_back({pa, pb, it->second});
      best_b = pb;
    }
    while (it != by_points.rend() && it->first.first == pa) ++it;
  }
  return frontier;
}

bool IsParetoOptimal(const Scenario& s, int points_a, int points_b) {
  for (const FrontierPoint& p : ParetoFrontier(s)) {
    if (p.points_a == points_a && p.points_b == points_b) return true;
  }
  return false;
}

}  // namespace bargain
