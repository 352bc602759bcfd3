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

#ifndef BARGAIN_SURFACE_H_
#define BARGAIN_SURFACE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bargain/dialogue.h"

namespace bargain {

enum class ParseStatus { kParsed, kAmbiguous, kFailed };

const char* ParseStatusName(ParseStatus s);

struct OfferParse {
  ParseStatus status = ParseStatus::kFailed;
  // Present iff status == kParsed; always feasible for the scenario.
  std::optional<DialogueAct> act;
  std::string notes;
};

// Deterministic template text for an act. PROPOSE names the speaker's share
// ("i want 1 book and 2 balls"); ACCEPT is "deal".
std::string RealizeAct(const DialogueAct& act, const Scenario& scenario);

// Rule-based reading of one utterance from `speaker`. A bare item mention
// without a numeral means all of that item. Items nobody mentions go to the
// side opposite the one that was mentioned; mentions for both sides without
// a "rest" marker leave the remainder ambiguous. Anything that cannot be read
// without guessing is reported as ambiguous or failed.
OfferParse ParseUtterance(std::string_view text, const Scenario& scenario,
                          Role speaker = Role::kA);

// Lexicon surface form for an issue ("book" / "books").
std::string ItemWord(int issue, bool plural);

// Lowercased whitespace tokens with surrounding punctuation stripped.
std::vector<std::string> NormalizeTokens(std::string_view text);

}  // namespace bargain

#endif  // BARGAIN_SURFACE_H_
