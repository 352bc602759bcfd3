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

#ifndef BARGAIN_POLICY_H_
#define BARGAIN_POLICY_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bargain/dialogue.h"
#include "bargain/random.h"

namespace bargain {

// Fixed feature sizes of the act-level policy.
inline constexpr int kGoalFeatures = 9;
inline constexpr int kActFeatures = 12;
inline constexpr int kTableFeatures = 8;
inline constexpr int kIssueFeatures = 6;
// Per-issue quantity logits are a linear combination of these basis
// functions of u = q / count: u, u^2, [q == 0], [q == count].
inline constexpr int kQuantityBasis = 4;
// Act-type head covers PROPOSE, ACCEPT, SELECT.
inline constexpr int kActTypes = 3;

struct Architecture {
  int goal_dim = 16;
  int hidden_dim = 64;
  int trunk_dim = 64;
  uint64_t seed = 1;
  double init_range = 0.1;

  int state_dim() const { return goal_dim + hidden_dim + kTableFeatures; }
  bool operator==(const Architecture&) const = default;
};

// Offsets of each tensor inside the flat parameter vector.
struct ParameterLayout {
  explicit ParameterLayout(const Architecture& arch);

  int goal_w, goal_b;
  int gru_wx, gru_wh, gru_bx, gru_bh;
  int trunk_w, trunk_b;
  int act_w, act_b;
  int prop_w, prop_b;
  int out_w, out_b;
  int total;
};

// Flat parameter vector plus the architecture that gives it shape. Copies are
// deep, so a copy is a frozen snapshot.
class PolicyParameters {
 public:
  PolicyParameters() = default;
  PolicyParameters(Architecture arch, Eigen::VectorXd values);

  // Uniform(-init_range, init_range) from arch.seed.
  static PolicyParameters Initialize(const Architecture& arch);

  const Architecture& architecture() const { return arch_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& mutable_values() { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  bool AllFinite() const { return values_.allFinite(); }
  // 16 hex digits over the architecture and the exact parameter bits.
  std::string Hash() const;

 private:
  Architecture arch_;
  Eigen::VectorXd values_;
};

// Everything the heads need about one decision point.
struct StateEncoding {
  Eigen::VectorXd vector;  // [goal ; recurrent state ; table features]
  std::array<Eigen::VectorXd, kNumIssues> issue_features;
  IssueVector counts{};
  ActMask mask;
  // True when the dialogue ended with SELECT (output deal is due).
  bool selection_due = false;
};

// Encodes the dialogue as seen by `self`: goal encoder over counts and own
// values, recurrent encoder over the act history, plus summary features of
// the standing offers. Throws ContractError if history is not a legal
// environment sequence.
StateEncoding EncodeState(const PolicyParameters& params, const Scenario& scenario,
                          Role self, std::span<const DialogueAct> history);

struct ActDistribution {
  std::array<double, kActTypes> act_type{};
  // proposal[k][q]: probability of claiming q items of issue k.
  std::array<std::vector<double>, kNumIssues> proposal;
};

// Masked, normalized distributions. Throws ContractError when the mask
// allows nothing.
ActDistribution ComputeActDistribution(const PolicyParameters& params,
                                       const StateEncoding& state,
                                       double temperature = 1.0);

struct OutputDistribution {
  std::array<std::vector<double>, kNumIssues> share;
  Division argmax;
};

// Throws ContractError unless state.selection_due.
OutputDistribution PredictOutputDeal(const PolicyParameters& params,
                                     const StateEncoding& state);

struct SampledAct {
  DialogueAct act;
  double log_prob = 0.0;  // under the distribution it was drawn from
};

// Draws from the act distribution, or takes the most likely act-type and
// per-issue quantities when greedy.
SampledAct SampleAct(const PolicyParameters& params, const StateEncoding& state,
                     Role speaker, Rng& rng, double temperature, bool greedy);

struct SampledDivision {
  Division division;
  double log_prob = 0.0;
};

SampledDivision SampleOutputDeal(const PolicyParameters& params,
                                 const StateEncoding& state, Rng& rng,
                                 bool greedy);

// Incremental encoder for live play: keeps the recurrent state so each new
// act costs one recurrent step. Produces the same encodings as EncodeState.
class PolicyRunner {
 public:
  PolicyRunner(const PolicyParameters& params, const Scenario& scenario, Role self);

  void Observe(const DialogueAct& act);
  StateEncoding Encode() const;
  const PolicyParameters& params() const { return *params_; }
  Role self() const { return self_; }
  const std::vector<DialogueAct>& history() const { return history_; }

 private:
  const PolicyParameters* params_;
  Scenario scenario_;
  Role self_;
  Eigen::VectorXd goal_;
  Eigen::VectorXd hidden_;
  std::vector<DialogueAct> history_;
};

// A choice made by `self` whose log-probability enters a weighted
// objective. For kAct, history[step] is the chosen act. For kOutput, step
// equals the history length and `output` is the claimed share.
struct Decision {
  enum class Type { kAct, kOutput };
  Type type = Type::kAct;
  int step = 0;
  Division output;
  double weight = 1.0;
};

// Sum over decisions of weight * log p(decision) under `params`, with its
// exact gradient added into *grad when grad is non-null.
double WeightedLogLikelihood(const PolicyParameters& params, const Scenario& scenario,
                             Role self, std::span<const DialogueAct> history,
                             std::span<const Decision> decisions,
                             Eigen::VectorXd* grad);

}  // namespace bargain

#endif  // BARGAIN_POLICY_H_
