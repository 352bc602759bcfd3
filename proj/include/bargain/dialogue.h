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

#ifndef BARGAIN_DIALOGUE_H_
#define BARGAIN_DIALOGUE_H_

#include <optional>
#include <string>
#include <vector>

#include "bargain/scenario.h"

namespace bargain {

inline constexpr int kDefaultCutoff = 20;

enum class ActKind { kPropose = 0, kAccept = 1, kSelect = 2, kWalkaway = 3 };

const char* ActKindName(ActKind k);
ActKind ActKindFromName(const std::string& name);

struct DialogueAct {
  ActKind kind = ActKind::kPropose;
  // The speaker's own share; present iff kind == kPropose.
  std::optional<Division> proposal;
  Role speaker = Role::kA;

  static DialogueAct Propose(Role speaker, const IssueVector& take) {
    return {ActKind::kPropose, Division{take}, speaker};
  }
  static DialogueAct Accept(Role speaker) {
    return {ActKind::kAccept, std::nullopt, speaker};
  }
  static DialogueAct Select(Role speaker) {
    return {ActKind::kSelect, std::nullopt, speaker};
  }
  static DialogueAct Walkaway(Role speaker) {
    return {ActKind::kWalkaway, std::nullopt, speaker};
  }
  bool operator==(const DialogueAct&) const = default;
};

struct DialogueState {
  Scenario scenario;
  std::vector<DialogueAct> history;
  Role turn = Role::kA;
  int utterance_count = 0;
  bool terminal = false;

  static DialogueState Start(Scenario s, Role first = Role::kA);
  const DialogueAct* LastAct() const {
    return history.empty() ? nullptr : &history.back();
  }
  // Most recent proposal by `speaker`, if any.
  const DialogueAct* LastProposalBy(Role speaker) const;
  const DialogueAct* LastProposal() const;
};

// Acts available to an automated agent. Stricter than the environment rules:
// an agent opens with a proposal, may accept only the partner's standing
// proposal, must select right after the partner accepts, and never walks
// away.
struct ActMask {
  bool propose = false;
  bool accept = false;
  bool select = false;

  bool Allows(ActKind k) const;
  bool Any() const { return propose || accept || select; }
};

ActMask AgentLegalActs(const DialogueState& state);

// Environment transition. Throws IllegalTransitionError on a terminal state,
// TurnOrderError when the speaker is not on turn, InvalidActError for an
// infeasible or malformed act.
DialogueState ApplyAct(const DialogueState& state, const DialogueAct& act,
                       int cutoff = kDefaultCutoff);

enum class OutcomeKind { kAgreement = 0, kWalkaway = 1, kCutoff = 2, kMismatch = 3 };

const char* OutcomeKindName(OutcomeKind k);
OutcomeKind OutcomeKindFromName(const std::string& name);

struct Outcome {
  OutcomeKind kind = OutcomeKind::kCutoff;
  std::optional<Division> division_a;
  std::optional<Division> division_b;
  int points_a = 0;
  int points_b = 0;
  // Set for MISMATCH so an operator can audit the claimed divisions.
  bool review_flag = false;

  int points(Role r) const { return r == Role::kA ? points_a : points_b; }
  bool agreed() const { return kind == OutcomeKind::kAgreement; }
  bool operator==(const Outcome&) const = default;
};

// Reconciles the output deals each side reports once the dialogue ends.
// Cutoff and walkaway ignore the divisions and score 0/0. After SELECT the
// divisions must both be present and feasible (else InvalidDivisionError);
// complementary claims are an agreement, anything else a flagged mismatch.
Outcome ResolveOutcome(const DialogueState& state,
                       const std::optional<Division>& output_a,
                       const std::optional<Division>& output_b);

}  // namespace bargain

#endif  // BARGAIN_DIALOGUE_H_
