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

#include "bargain/reward.h"

#include <algorithm>

#include "bargain/errors.h"

namespace bargain {

double FehrSchmidtUtility(double own, double other, const RewardConfig& cfg) {
  return own - cfg.a * std::max(0.0, other - own) -
         cfg.b * std::max(0.0, own - other);
}

RewardConfig Preset(std::string_view name) {
  if (name == "selfish") return {0.0, 0.0, "selfish"};
  if (name == "disadvantage_averse") return {1.0, 0.0, "disadvantage_averse"};
  if (name == "envious") return {0.0, -1.0, "envious"};
  if (name == "fair") return {0.75, 0.75, "fair"};
  throw LookupError("unknown reward preset: " + std::string(name));
}

std::vector<std::string> PresetNames() {
  return {"selfish", "disadvantage_averse", "envious", "fair"};
}

double RewardForOutcome(const Outcome& o, Role role, const RewardConfig& cfg) {
  if (!o.agreed()) return 0.0;
  return FehrSchmidtUtility(o.points(role), o.points(Other(role)), cfg);
}

}  // namespace bargain
