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

#ifndef BARGAIN_REWARD_H_
#define BARGAIN_REWARD_H_

#include <string>
#include <string_view>
#include <vector>

#include "bargain/dialogue.h"

namespace bargain {

// Inequity-aversion coefficients. `a` weighs disadvantage (partner ahead),
// `b` weighs advantage (self ahead).
struct RewardConfig {
  double a = 0.0;
  double b = 0.0;
  std::string name;

  // Canonical configs satisfy b <= a and 0 <= b < 1. Others (e.g. the envious
  // preset with b = -1) are accepted but flagged.
  bool outside_fs_constraint() const { return !(b <= a && 0.0 <= b && b < 1.0); }
  bool operator==(const RewardConfig&) const = default;
};

// own - a * max(0, other - own) - b * max(0, own - other)
double FehrSchmidtUtility(double own, double other, const RewardConfig& cfg);

// selfish (0, 0), disadvantage_averse (1, 0), envious (0, -1),
// fair (0.75, 0.75). Unknown names throw LookupError.
RewardConfig Preset(std::string_view name);
std::vector<std::string> PresetNames();

// Zero for anything but an agreement, regardless of cfg.
double RewardForOutcome(const Outcome& o, Role role, const RewardConfig& cfg);

}  // namespace bargain

#endif  // BARGAIN_REWARD_H_
