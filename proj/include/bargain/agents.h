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

#ifndef BARGAIN_AGENTS_H_
#define BARGAIN_AGENTS_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bargain/dialogue.h"
#include "bargain/policy.h"
#include "bargain/random.h"

namespace bargain {

// One side of one dialogue. Sees every act (its own included) through
// Observe, in order.
class Negotiator {
 public:
  virtual ~Negotiator() = default;
  virtual DialogueAct Act(const DialogueState& state) = 0;
  virtual void Observe(const DialogueAct& act) = 0;
  // Called once after a dialogue that ended with SELECT.
  virtual Division OutputDeal(const DialogueState& state) = 0;
};

// Creates negotiators. Implementations are immutable and safe to share
// between threads.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<Negotiator> Begin(const Scenario& scenario, Role self,
                                            uint64_t seed) const = 0;
};

struct DecodingConfig {
  double temperature = 1.0;
  bool greedy_acts = false;
  bool greedy_output = true;
};

// Policy-driven negotiator. Optionally records its decisions and their
// log-probabilities for REINFORCE.
class PolicyNegotiator : public Negotiator {
 public:
  PolicyNegotiator(const PolicyParameters& params, const Scenario& scenario, Role self,
                   uint64_t seed, DecodingConfig decoding);

  DialogueAct Act(const DialogueState& state) override;
  void Observe(const DialogueAct& act) override;
  Division OutputDeal(const DialogueState& state) override;

  const std::vector<Decision>& decisions() const { return decisions_; }
  const std::vector<double>& log_probs() const { return log_probs_; }

 private:
  PolicyRunner runner_;
  Rng rng_;
  DecodingConfig decoding_;
  std::vector<Decision> decisions_;
  std::vector<double> log_probs_;
};

class PolicyAgent : public Agent {
 public:
  PolicyAgent(std::string name, std::shared_ptr<const PolicyParameters> params,
              DecodingConfig decoding = {});
  std::string name() const override { return name_; }
  std::unique_ptr<Negotiator> Begin(const Scenario& scenario, Role self,
                                    uint64_t seed) const override;
  const PolicyParameters& params() const { return *params_; }

 private:
  std::string name_;
  std::shared_ptr<const PolicyParameters> params_;
  DecodingConfig decoding_;
};

// Division `self` would claim if the last accepted proposal were carried out.
std::optional<Division> AcceptedDivision(const DialogueState& state, Role self);

// Scripted behaviours for tests and baselines.
enum class ScriptKind {
  kProposeEverything,  // always demands every item
  kEqualSplit,         // proposes the split closest to equal points
  kAcceptAnything,     // accepts any standing proposal, selects after ACCEPT
};

class ScriptedAgent : public Agent {
 public:
  explicit ScriptedAgent(ScriptKind kind);
  std::string name() const override;
  std::unique_ptr<Negotiator> Begin(const Scenario& scenario, Role self,
                                    uint64_t seed) const override;

 private:
  ScriptKind kind_;
};

struct PlayedDialogue {
  DialogueState state;
  std::optional<Division> output_a;
  std::optional<Division> output_b;
  Outcome outcome;
};

// Alternates acts between the two negotiators (A opens) until the state is
// terminal, collects output deals after SELECT and resolves the outcome.
// Throws ContractError when a negotiator emits an act the environment
// rejects.
PlayedDialogue PlayDialogue(const Scenario& scenario, Negotiator& a, Negotiator& b,
                            int cutoff = kDefaultCutoff);

}  // namespace bargain

#endif  // BARGAIN_AGENTS_H_
