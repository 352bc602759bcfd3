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

#include "bargain/surface.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "bargain/errors.h"
#include "bargain/lexicon_data.h"

namespace bargain {
namespace {

struct Lexicon {
  std::map<std::string, int> item;  // surface form -> issue
  std::array<std::string, kNumIssues> singular;
  std::array<std::string, kNumIssues> plural;
  std::map<std::string, int> number;
  std::set<std::string> all, accept, negation, vague, self, other, rest,
      everything;
  std::string select_token = "<selection>";
  std::string walkaway_token = "<walkaway>";
};

Lexicon LoadLexicon() {
  Lexicon lex;
  std::istringstream in{std::string(kLexiconText)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string kind;
    fields >> kind;
    std::vector<std::string> words;
    for (std::string w; fields >> w;) words.push_back(w);
    if (kind == "item") {
      const int issue = std::stoi(words.at(0));
      lex.singular.at(issue) = words.at(1);
      lex.plural.at(issue) = words.at(2);
      for (size_t i = 1; i < words.size(); ++i) lex.item[words[i]] = issue;
    } else if (kind == "number") {
      const int value = std::stoi(words.at(0));
      for (size_t i = 1; i < words.size(); ++i) lex.number[words[i]] = value;
    } else if (kind == "select") {
      lex.select_token = words.at(0);
    } else if (kind == "walkaway") {
      lex.walkaway_token = words.at(0);
    } else {
      std::set<std::string>* target = nullptr;
      if (kind == "all") target = &lex.all;
      else if (kind == "accept") target = &lex.accept;
      else if (kind == "negation") target = &lex.negation;
      else if (kind == "vague") target = &lex.vague;
      else if (kind == "self") target = &lex.self;
      else if (kind == "other") target = &lex.other;
      else if (kind == "rest") target = &lex.rest;
      else if (kind == "everything") target = &lex.everything;
      if (target == nullptr) throw DataError("lexicon: unknown entry " + kind);
      target->insert(words.begin(), words.end());
    }
  }
  return lex;
}

const Lexicon& Lex() {
  static const Lexicon lex = LoadLexicon();
  return lex;
}

enum class Owner { kNone, kSelf, kOther };

// Quantities each side is said to get of one issue.
struct Mention {
  std::optional<int> self;
  std::optional<int> other;
};

OfferParse Fail(ParseStatus status, std::string notes) {
  OfferParse p;
  p.status = status;
  p.notes = std::move(notes);
  return p;
}

// Quantity named right before the item word at position i. -1 means "all".
int QuantityBefore(const std::vector<std::string>& tokens, int i) {
  const Lexicon& lex = Lex();
  const int j = i - 1;
  if (j < 0) return -1;
  const std::string& prev = tokens[j];
  if (auto it = lex.number.find(prev); it != lex.number.end()) return it->second;
  if (prev == "no") return 0;
  if (lex.all.count(prev)) {
    // "two of the balls"
    if (j >= 2 && tokens[j - 1] == "of") {
      if (auto it = lex.number.find(tokens[j - 2]); it != lex.number.end()) {
        return it->second;
      }
    }
    return -1;
  }
  return -1;
}

}  // namespace

const char* ParseStatusName(ParseStatus s) {
  switch (s) {
    case ParseStatus::kParsed: return "parsed";
    case ParseStatus::kAmbiguous: return "ambiguous";
    case ParseStatus::kFailed: return "failed";
  }
  return "?";
}

std::string ItemWord(int issue, bool plural) {
  if (issue < 0 || issue >= kNumIssues) throw ContractError("ItemWord: bad issue");
  return plural ? Lex().plural[issue] : Lex().singular[issue];
}

std::vector<std::string> NormalizeTokens(std::string_view text) {
  static const std::string kStrip = ".,!?;:\"()";
  std::vector<std::string> tokens;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) {
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    size_t b = 0;
    size_t e = w.size();
    while (b < e && kStrip.find(w[b]) != std::string::npos) ++b;
    while (e > b && kStrip.find(w[e - 1]) != std::string::npos) --e;
    if (e > b) tokens.push_back(w.substr(b, e - b));
  }
  return tokens;
}

std::string RealizeAct(const DialogueAct& act, const Scenario& scenario) {
  const Lexicon& lex = Lex();
  switch (act.kind) {
    case ActKind::kAccept: return "deal";
    case ActKind::kSelect: return lex.select_token;
    case ActKind::kWalkaway: return lex.walkaway_token;
    case ActKind::kPropose: break;
  }
  if (!act.proposal) throw ContractError("RealizeAct: PROPOSE without proposal");
  const IssueVector& take = act.proposal->take;
  if (std::all_of(take.begin(), take.end(), [](int q) { return q == 0; })) {
    return "you can have everything";
  }
  if (take == scenario.counts) return "i want everything";
  std::vector<std::string> parts;
  for (int k = 0; k < kNumIssues; ++k) {
    if (take[k] <= 0) continue;
    parts.push_back(std::to_string(take[k]) + " " +
                    (take[k] == 1 ? lex.singular[k] : lex.plural[k]));
  }
  std::string text = "i want";
  for (size_t i = 0; i < parts.size(); ++i) {
    text += (i == 0 ? " " : " and ") + parts[i];
  }
  return text;
}

OfferParse ParseUtterance(std::string_view text, const Scenario& scenario,
                          Role speaker) {
  const Lexicon& lex = Lex();
  const std::vector<std::string> tokens = NormalizeTokens(text);
  if (tokens.empty()) return Fail(ParseStatus::kFailed, "empty utterance");

  for (const std::string& t : tokens) {
    if (t == lex.select_token) {
      OfferParse p;
      p.status = ParseStatus::kParsed;
      p.act = DialogueAct::Select(speaker);
      return p;
    }
    if (t == lex.walkaway_token) {
      OfferParse p;
      p.status = ParseStatus::kParsed;
      p.act = DialogueAct::Walkaway(speaker);
      return p;
    }
  }

  std::array<std::optional<Mention>, kNumIssues> mentions;
  Owner owner = Owner::kNone;
  Owner rest_owner = Owner::kNone;
  Owner everything_owner = Owner::kNone;
  bool negation = false;
  bool vague = false;
  bool accept = false;
  bool any_mention = false;
  std::string ambiguity;

  const int n = static_cast<int>(tokens.size());
  for (int i = 0; i < n; ++i) {
    const std::string& t = tokens[i];
    if (lex.self.count(t)) {
      owner = Owner::kSelf;
    } else if (lex.other.count(t)) {
      owner = Owner::kOther;
    } else if (lex.everything.count(t)) {
      const bool followed_by_rest = i + 1 < n && lex.rest.count(tokens[i + 1]);
      if (owner == Owner::kNone) {
        ambiguity = "'everything' without an owner";
      } else if (followed_by_rest) {
        rest_owner = owner;
        ++i;
      } else {
        everything_owner = owner;
      }
    } else if (lex.rest.count(t)) {
      if (owner == Owner::kNone) ambiguity = "'rest' without an owner";
      else rest_owner = owner;
    } else if (auto it = lex.item.find(t); it != lex.item.end()) {
      any_mention = true;
      const int k = it->second;
      const int q = QuantityBefore(tokens, i);
      const int quantity = q < 0 ? scenario.counts[k] : q;
      if (owner == Owner::kNone) {
        ambiguity = "item '" + t + "' without an owner";
        continue;
      }
      if (!mentions[k]) mentions[k] = Mention{};
      std::optional<int>& slot =
          owner == Owner::kSelf ? mentions[k]->self : mentions[k]->other;
      if (slot && *slot != quantity) {
        ambiguity = "conflicting mentions of '" + t + "'";
        continue;
      }
      slot = quantity;
    } else if (lex.negation.count(t)) {
      const bool quantity_no =
          t == "no" && i + 1 < n && lex.item.count(tokens[i + 1]);
      if (!quantity_no) negation = true;
    } else if (lex.vague.count(t)) {
      vague = true;
    } else if (lex.accept.count(t)) {
      accept = true;
    }
  }

  if (!any_mention && everything_owner == Owner::kNone) {
    if (!ambiguity.empty()) return Fail(ParseStatus::kAmbiguous, ambiguity);
    if (negation) return Fail(ParseStatus::kFailed, "rejection without an offer");
    if (accept) {
      OfferParse p;
      p.status = ParseStatus::kParsed;
      p.act = DialogueAct::Accept(speaker);
      return p;
    }
    return Fail(ParseStatus::kFailed, "no offer content");
  }
  if (!ambiguity.empty()) return Fail(ParseStatus::kAmbiguous, ambiguity);
  if (negation) return Fail(ParseStatus::kAmbiguous, "offer contains a negation");
  if (vague) return Fail(ParseStatus::kAmbiguous, "offer contains a vague quantity");
  if (everything_owner != Owner::kNone) {
    if (any_mention) {
      return Fail(ParseStatus::kAmbiguous, "'everything' mixed with item mentions");
    }
    IssueVector take = everything_owner == Owner::kSelf ? scenario.counts
                                                        : IssueVector{0, 0, 0};
    OfferParse p;
    p.status = ParseStatus::kParsed;
    p.act = DialogueAct::Propose(speaker, take);
    return p;
  }

  bool self_mentioned = false;
  bool other_mentioned = false;
  for (int k = 0; k < kNumIssues; ++k) {
    if (!mentions[k]) continue;
    for (const auto& q : {mentions[k]->self, mentions[k]->other}) {
      if (q && *q > scenario.counts[k]) {
        return Fail(ParseStatus::kFailed,
                    "infeasible: " + std::to_string(*q) + " " + lex.plural[k] +
                        " but only " + std::to_string(scenario.counts[k]) +
                        " available");
      }
    }
    if (mentions[k]->self && mentions[k]->other &&
        *mentions[k]->self + *mentions[k]->other != scenario.counts[k]) {
      return Fail(ParseStatus::kAmbiguous,
                  "split of the " + lex.plural[k] + " does not add up");
    }
    self_mentioned |= mentions[k]->self.has_value();
    other_mentioned |= mentions[k]->other.has_value();
  }

  IssueVector take{};
  for (int k = 0; k < kNumIssues; ++k) {
    const int c = scenario.counts[k];
    if (c == 0) {
      take[k] = 0;
    } else if (mentions[k] && mentions[k]->self) {
      take[k] = *mentions[k]->self;
    } else if (mentions[k] && mentions[k]->other) {
      take[k] = c - *mentions[k]->other;
    } else if (rest_owner != Owner::kNone) {
      take[k] = rest_owner == Owner::kSelf ? c : 0;
    } else if (self_mentioned && !other_mentioned) {
      take[k] = 0;
    } else if (other_mentioned && !self_mentioned) {
      take[k] = c;
    } else {
      return Fail(ParseStatus::kAmbiguous,
                  "nobody claims the " + lex.plural[k]);
    }
  }
  OfferParse p;
  p.status = ParseStatus::kParsed;
  p.act = DialogueAct::Propose(speaker, take);
  return p;
}

}  // namespace bargain
