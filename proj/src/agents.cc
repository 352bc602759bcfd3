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

#include "bargain/agents.h"

#include <cstdlib>
#include <limits>

#include "bargain/errors.h"

namespace bargain {

PolicyNegotiator::PolicyNegotiator(const PolicyParameters& params,
                                   const Scenario& scenario, Role self, uint64_t seed,
                                   DecodingConfig decoding)
    : runner_(params, scenario, self), rng_(seed), decoding_(decoding) {}

DialogueAct PolicyNegotiator::Act(const DialogueState& state) {
  StateEncoding enc = runner_.Encode();
  SampledAct s = SampleAct(runner_.params(), enc, runner_.self(), rng_,
                           decoding_.temperature, decoding_.greedy_acts);
  decisions_.push_back(
      {Decision::Type::kAct, static_cast<int>(state.history.size()), {}, 1.0});
  log_probs_.push_back(s.log_prob);
  return s.act;
}

void PolicyNegotiator::Observe(const DialogueAct& act) { runner_.Observe(act); }

Division PolicyNegotiator::OutputDeal(const DialogueState& state) {
  SampledDivision s =
      SampleOutputDeal(runner_.params(), runner_.Encode(), rng_, decoding_.greedy_output);
  decisions_.push_back({Decision::Type::kOutput, static_cast<int>(state.history.size()),
                        s.division, 1.0});
  log_probs_.push_back(s.log_prob);
  return s.division;
}

PolicyAgent::PolicyAgent(std::string name, std::shared_ptr<const PolicyParameters> params,
                         DecodingConfig decoding)
    : name_(std::move(name)), params_(std::move(params)), decoding_(decoding) {
  if (!params_) throw ContractError("PolicyAgent: null parameters");
}

std::unique_ptr<Negotiator> PolicyAgent::Begin(const Scenario& scenario, Role self,
                                               uint64_t seed) const {
  return std::make_unique<PolicyNegotiator>(*params_, scenario, self, seed, decoding_);
}

std::optional<Division> AcceptedDivision(const DialogueState& state, Role self) {
  for (size_t i = state.history.size(); i-- > 1;) {
    if (state.history[i].kind != ActKind::kAccept) continue;
    const DialogueAct& offer = state.history[i - 1];
    if (offer.kind != ActKind::kPropose) return std::nullopt;
    return offer.speaker == self ? *offer.proposal
                                 : Complement(*offer.proposal, state.scenario.counts);
  }
  return std::nullopt;
}

namespace {

Division EqualPointsSplit(const Scenario& s, Role self) {
  Division best;
  int best_gap = std::numeric_limits<int>::max();
  for (const Division& d : AllDivisions(s.counts)) {
    const int mine = Score(d, s.values(self));
    const int theirs = Score(Complement(d, s.counts), s.values(Other(self)));
    if (std::abs(mine - theirs) < best_gap) {
      best_gap = std::abs(mine - theirs);
      best = d;
    }
  }
  return best;
}

class ScriptedNegotiator : public Negotiator {
 public:
  ScriptedNegotiator(ScriptKind kind, const Scenario& s, Role self)
      : kind_(kind), scenario_(s), self_(self) {}

  DialogueAct Act(const DialogueState& state) override {
    ActMask mask = AgentLegalActs(state);
    if (mask.select) return DialogueAct::Select(self_);
    if (kind_ == ScriptKind::kAcceptAnything && mask.accept) {
      return DialogueAct::Accept(self_);
    }
    if (kind_ == ScriptKind::kEqualSplit) {
      return DialogueAct::Propose(self_, EqualPointsSplit(scenario_, self_).take);
    }
    return DialogueAct::Propose(self_, scenario_.counts);
  }
  void Observe(const DialogueAct&) override {}
  Division OutputDeal(const DialogueState& state) override {
    return AcceptedDivision(state, self_).value_or(Division{scenario_.counts});
  }

 private:
  ScriptKind kind_;
  Scenario scenario_;
  Role self_;
};

}  // namespace

ScriptedAgent::ScriptedAgent(ScriptKind kind) : kind_(kind) {}

std::string ScriptedAgent::name() const {
  switch (kind_) {
    case ScriptKind::kProposeEverything: return "script-propose-everything";
    case ScriptKind::kEqualSplit: return "script-equal-split";
    default: return "script-accept-anything";
  }
}

std::unique_ptr<Negotiator> ScriptedAgent::Begin(const Scenario& scenario, Role self,
                                                 uint64_t) const {
  return std::make_unique<ScriptedNegotiator>(kind_, scenario, self);
}

PlayedDialogue PlayDialogue(const Scenario& scenario, Negotiator& a, Negotiator& b,
                            int cutoff) {
  PlayedDialogue p;
  p.state = DialogueState::Start(scenario, Role::kA);
  while (!p.state.terminal) {
    Negotiator& speaker = p.state.turn == Role::kA ? a : b;
    DialogueAct act = speaker.Act(p.state);
    try {
      p.state = ApplyAct(p.state, act, cutoff);
    } catch (const Error& e) {
      throw ContractError(std::string("negotiator emitted an illegal act: ") + e.what());
    }
    a.Observe(act);
    b.Observe(act);
  }
  const DialogueAct* last = p.state.LastAct();
  if (last && last->kind == ActKind::kSelect) {
    p.output_a = a.OutputDeal(p.state);
    p.output_b = b.OutputDeal(p.state);
  }
  p.outcome = ResolveOutcome(p.state, p.output_a, p.output_b);
  return p;
}

}  // namespace bargain
