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

#include "bargain/dialogue.h"

#include "bargain/errors.h"

namespace bargain {

const char* ActKindName(ActKind k) {
  switch (k) {
    case ActKind::kPropose: return "PROPOSE";
    case ActKind::kAccept: return "ACCEPT";
    case ActKind::kSelect: return "SELECT";
    case ActKind::kWalkaway: return "WALKAWAY";
  }
  return "?";
}

ActKind ActKindFromName(const std::string& name) {
  if (name == "PROPOSE") return ActKind::kPropose;
  if (name == "ACCEPT") return ActKind::kAccept;
  if (name == "SELECT") return ActKind::kSelect;
  if (name == "WALKAWAY") return ActKind::kWalkaway;
  throw LookupError("unknown act kind: " + name);
}

DialogueState DialogueState::Start(Scenario s, Role first) {
  DialogueState state;
  state.scenario = std::move(s);
  state.turn = first;
  return state;
}

const DialogueAct* DialogueState::LastProposalBy(Role speaker) const {
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (it->kind == ActKind::kPropose && it->speaker == speaker) return &*it;
  }
  return nullptr;
}

const DialogueAct* DialogueState::LastProposal() const {
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (it->kind == ActKind::kPropose) return &*it;
  }
  return nullptr;
}

bool ActMask::Allows(ActKind k) const {
  switch (k) {
    case ActKind::kPropose: return propose;
    case ActKind::kAccept: return accept;
    case ActKind::kSelect: return select;
    case ActKind::kWalkaway: return false;
  }
  return false;
}

ActMask AgentLegalActs(const DialogueState& state) {
  ActMask mask;
  if (state.terminal) return mask;
  const DialogueAct* last = state.LastAct();
  if (last == nullptr) {
    mask.propose = true;
  } else if (last->kind == ActKind::kAccept && last->speaker != state.turn) {
    mask.select = true;
  } else if (last->kind == ActKind::kPropose && last->speaker != state.turn) {
    mask.propose = true;
    mask.accept = true;
  } else {
    mask.propose = true;
  }
  return mask;
}

DialogueState ApplyAct(const DialogueState& state, const DialogueAct& act,
                       int cutoff) {
  if (cutoff < 1) throw ContractError("ApplyAct: cutoff must be >= 1");
  if (state.terminal) {
    throw IllegalTransitionError("ApplyAct: dialogue already terminal");
  }
  if (act.speaker != state.turn) {
    throw TurnOrderError(std::string("ApplyAct: ") + RoleName(act.speaker) +
                         " spoke out of turn");
  }
  if (act.kind == ActKind::kPropose) {
    if (!act.proposal || !IsFeasible(*act.proposal, state.scenario.counts)) {
      throw InvalidActError("ApplyAct: proposal missing or exceeds counts");
    }
  } else if (act.proposal) {
    throw InvalidActError(std::string("ApplyAct: ") + ActKindName(act.kind) +
                          " carries a proposal");
  }
  if (act.kind == ActKind::kAccept) {
    const DialogueAct* last = state.LastAct();
    if (last == nullptr || last->kind != ActKind::kPropose ||
        last->speaker == act.speaker) {
      throw InvalidActError("ApplyAct: nothing on the table to accept");
    }
  }

  DialogueState next = state;
  next.history.push_back(act);
  next.utterance_count = static_cast<int>(next.history.size());
  next.turn = Other(state.turn);
  next.terminal = act.kind == ActKind::kSelect ||
                  act.kind == ActKind::kWalkaway ||
                  next.utterance_count >= cutoff;
  return next;
}

const char* OutcomeKindName(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::kAgreement: return "AGREEMENT";
    case OutcomeKind::kWalkaway: return "WALKAWAY";
    case OutcomeKind::kCutoff: return "CUTOFF";
    case OutcomeKind::kMismatch: return "MISMATCH";
  }
  return "?";
}

OutcomeKind OutcomeKindFromName(const std::string& name) {
  if (name == "AGREEMENT") return OutcomeKind::kAgreement;
  if (name == "WALKAWAY") return OutcomeKind::kWalkaway;
  if (name == "CUTOFF") return OutcomeKind::kCutoff;
  if (name == "MISMATCH") return OutcomeKind::kMismatch;
  throw LookupError("unknown outcome kind: " + name);
}

Outcome ResolveOutcome(const DialogueState& state,
                       const std::optional<Division>& output_a,
                       const std::optional<Division>& output_b) {
  if (!state.terminal) throw ContractError("ResolveOutcome: state not terminal");
  const DialogueAct* last = state.LastAct();
  Outcome out;
  if (last != nullptr && last->kind == ActKind::kWalkaway) {
    out.kind = OutcomeKind::kWalkaway;
    return out;
  }
  if (last == nullptr || last->kind != ActKind::kSelect) {
    out.kind = OutcomeKind::kCutoff;
    return out;
  }
  const IssueVector& counts = state.scenario.counts;
  if (!output_a || !output_b) {
    throw InvalidDivisionError("ResolveOutcome: both output deals required");
  }
  if (!IsFeasible(*output_a, counts) || !IsFeasible(*output_b, counts)) {
    throw InvalidDivisionError("ResolveOutcome: output deal exceeds counts");
  }
  out.division_a = output_a;
  out.division_b = output_b;
  bool complementary = true;
  for (int k = 0; k < kNumIssues; ++k) {
    if (output_a->take[k] + output_b->take[k] != counts[k]) complementary = false;
  }
  if (!complementary) {
    out.kind = OutcomeKind::kMismatch;
    out.review_flag = true;
    return out;
  }
  out.kind = OutcomeKind::kAgreement;
  out.points_a = Score(*output_a, state.scenario.values_a);
  out.points_b = Score(*output_b, state.scenario.values_b);
  return out;
}

}  // namespace bargain
