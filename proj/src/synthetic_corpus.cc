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

#include "bargain/synthetic_corpus.h"

#include <algorithm>
#include <array>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>

#include "bargain/corpus.h"
#include "bargain/errors.h"
#include "bargain/random.h"
#include "bargain/surface.h"

namespace bargain {
namespace {

// A crowd worker: opens high, concedes over a few turns, sometimes gives in
// to whatever is on the table, and eventually loses patience.
struct Human {
  IssueVector values{};
  double start = 8.0;
  double floor = 5.0;
  double concede_turns = 3.0;
  double pushover = 0.0;
  int patience = 4;
  std::array<double, kNumIssues> interest{1.0, 1.0, 1.0};
  int own_turns = 0;

  double Aspiration() const {
    const double frac = std::max(0.0, 1.0 - own_turns / concede_turns);
    return floor + (start - floor) * frac;
  }
};

Human MakeHuman(const IssueVector& values, Rng& rng) {
  Human h;
  h.values = values;
  h.start = 7.0 + 3.0 * rng.Uniform();
  h.floor = 4.0 + (std::min(h.start, 7.5) - 4.0) * rng.Uniform();
  h.concede_turns = 2.5 + 3.0 * rng.Uniform();
  h.pushover = rng.Uniform() < 0.35 ? 0.1 + 0.25 * rng.Uniform() : 0.02;
  h.patience = 3 + rng.Below(5);
  return h;
}

std::string Pick(Rng& rng, std::initializer_list<const char*> options) {
  const int i = rng.Below(static_cast<int>(options.size()));
  return *(options.begin() + i);
}

std::string NumberWord(int q, Rng& rng) {
  static const char* kWords[] = {"zero", "one", "two", "three", "four", "five",
                                 "six",  "seven", "eight", "nine", "ten"};
  if (q == 1 && rng.Uniform() < 0.5) return "a";
  if (q <= 10 && rng.Uniform() < 0.6) return kWords[q];
  return std::to_string(q);
}

// "the balls and one book"; empty when the share is empty.
std::string ShareText(const IssueVector& share, const IssueVector& counts,
                      Rng& rng) {
  std::vector<std::string> parts;
  for (int k = 0; k < kNumIssues; ++k) {
    const int q = share[k];
    if (q <= 0) continue;
    if (q == counts[k]) {
      if (q == 2 && rng.Uniform() < 0.3) {
        parts.push_back("both " + ItemWord(k, true));
      } else if (q > 1 && rng.Uniform() < 0.2) {
        parts.push_back("all the " + ItemWord(k, true));
      } else {
        parts.push_back("the " + ItemWord(k, q > 1));
      }
    } else {
      parts.push_back(NumberWord(q, rng) + " " + ItemWord(k, q > 1));
    }
  }
  std::string s;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) s += (i + 1 == parts.size()) ? " and " : " , ";
    s += parts[i];
  }
  return s;
}

std::string ProposalText(const IssueVector& take, const IssueVector& counts,
                         Rng& rng) {
  const IssueVector theirs_take = Complement(Division{take}, counts).take;
  const std::string mine = ShareText(take, counts, rng);
  const std::string theirs = ShareText(theirs_take, counts, rng);
  if (mine.empty()) {
    return Pick(rng, {"you can have everything", "you can take everything",
                      "i will let you have everything"});
  }
  if (theirs.empty()) {
    return Pick(rng, {"i need ", "i want ", "i would like "}) + "everything";
  }
  const std::string prefix = Pick(rng, {"", "", "", "", "ok ", "hmm "});
  const std::string suffix =
      Pick(rng, {"", "", "", "", "", " ?", " ?", " ok ?"});
  std::string body;
  switch (rng.Below(13)) {
    case 0: body = "i would like " + mine; break;
    case 1: body = "i want " + mine + " and you can have the rest"; break;
    case 2: case 3: body = "can i have " + mine; break;
    case 4: body = "you can have " + theirs + " and i will take the rest"; break;
    case 5: body = "how about i get " + mine + " and you get " + theirs; break;
    case 6: case 11: body = "give me " + mine; break;
    case 12: body = "i want " + mine; break;
    case 7: case 8: body = "you can have " + theirs; break;
    default: body = "i need " + mine; break;
  }
  return prefix + body + suffix;
}

IssueVector ChooseProposal(const Human& h, const IssueVector& counts, Rng& rng) {
  const double aspiration = h.Aspiration();
  std::vector<Division> candidates;
  Division best_own;
  int best_points = -1;
  for (const Division& d : AllDivisions(counts)) {
    const int pts = Score(d, h.values);
    if (pts > best_points) {
      best_points = pts;
      best_own = d;
    }
    if (pts + 1e-9 >= aspiration) candidates.push_back(d);
  }
  if (candidates.empty()) return best_own.take;
  if (rng.Uniform() < 0.25) {
    return candidates[rng.Below(static_cast<int>(candidates.size()))].take;
  }
  double best = -1.0;
  std::vector<Division> ties;
  for (const Division& d : candidates) {
    double generosity = 0.0;
    for (int k = 0; k < kNumIssues; ++k) {
      generosity += (counts[k] - d.take[k]) * h.interest[k];
    }
    if (generosity > best + 1e-9) {
      best = generosity;
      ties.clear();
    }
    if (generosity + 1e-9 >= best) ties.push_back(d);
  }
  return ties[rng.Below(static_cast<int>(ties.size()))].take;
}

std::vector<std::string> SplitTokens(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

// One dialogue from A's side.
CorpusRecord SimulateDialogue(const Scenario& s, Rng& rng) {
  constexpr int kMaxUtterances = 18;
  std::array<Human, 2> humans{MakeHuman(s.values_a, rng),
                              MakeHuman(s.values_b, rng)};
  CorpusRecord r;
  r.scenario = s;
  auto say = [&](Role who, const std::string& text) {
    r.turns.push_back(CorpusTurn{who, SplitTokens(text)});
  };

  Role turn = rng.Uniform() < 0.5 ? Role::kA : Role::kB;
  if (rng.Uniform() < 0.2) {
    say(turn, Pick(rng, {"hi", "hello", "hi there", "hello", "what do you need ?"}));
    turn = Other(turn);
  }
  std::optional<std::pair<Role, IssueVector>> table;  // standing proposal
  while (true) {
    Human& me = humans[Index(turn)];
    const bool out_of_time = static_cast<int>(r.turns.size()) >= kMaxUtterances;
    if (table && table->first != turn) {
      const IssueVector my_share = Complement(Division{table->second},
                                              s.counts).take;
      const int v = Score(Division{my_share}, me.values);
      const bool happy = v + 1e-9 >= me.Aspiration();
      const bool gives_in = me.own_turns >= 1 && rng.Uniform() < me.pushover;
      if (happy || gives_in) {
        say(turn, Pick(rng, {"deal", "deal", "ok deal", "sure", "okay that works",
                             "deal !", "sounds good . deal", "yes ok"}));
        say(Other(turn), "<selection>");
        const Division proposer{table->second};
        const Division acceptor = Complement(proposer, s.counts);
        const bool a_proposed = table->first == Role::kA;
        r.output_a = a_proposed ? proposer : acceptor;
        r.output_b = a_proposed ? acceptor : proposer;
        return r;
      }
    }
    if (out_of_time || me.own_turns >= me.patience + 2 ||
        (table && me.own_turns >= me.patience && rng.Uniform() < 0.5)) {
      say(turn, Pick(rng, {"no deal", "sorry , i can't do that . no deal",
                           "no way", "i can't accept that"}));
      say(Other(turn), "<selection>");
      r.no_agreement = true;
      return r;
    }
    const IssueVector take = ChooseProposal(me, s.counts, rng);
    say(turn, ProposalText(take, s.counts, rng));
    table = std::make_pair(turn, take);
    ++me.own_turns;
    Human& partner = humans[Index(Other(turn))];
    for (int k = 0; k < kNumIssues; ++k) {
      if (s.counts[k] > 0) {
        partner.interest[k] += static_cast<double>(take[k]) / s.counts[k];
      }
    }
    turn = Other(turn);
  }
}

CorpusRecord Mirror(const CorpusRecord& r) {
  CorpusRecord m = r;
  std::swap(m.scenario.values_a, m.scenario.values_b);
  std::swap(m.output_a, m.output_b);
  for (CorpusTurn& t : m.turns) t.speaker = Other(t.speaker);
  return m;
}

}  // namespace

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticCorpusOptions& options) {
  if (options.dialogues <= 0 || options.unique_scenarios <= 0) {
    throw ContractError("GenerateSyntheticCorpus: sizes must be positive");
  }
  std::vector<Scenario> pool;
  std::set<std::string> seen;
  const int max_draws = 50 * options.unique_scenarios;
  for (int i = 0; i < max_draws &&
                  static_cast<int>(pool.size()) < options.unique_scenarios;
       ++i) {
    Scenario s = SampleScenario(DeriveSeed(options.seed, {1, uint64_t(i)}),
                                options.pool);
    if (seen.insert(ScenarioKey(s)).second) pool.push_back(std::move(s));
  }
  if (static_cast<int>(pool.size()) < options.unique_scenarios) {
    throw SamplingError("GenerateSyntheticCorpus: too few distinct scenarios");
  }
  Rng rng(DeriveSeed(options.seed, {2}));
  SyntheticCorpus corpus;
  std::set<std::string> dialogues;
  const int n_train = static_cast<int>(options.dialogues * options.train_fraction);
  const int n_valid = static_cast<int>(options.dialogues * options.valid_fraction);
  for (int i = 0; i < options.dialogues; ++i) {
    // Early dialogues cover every pooled scenario at least once.
    const Scenario& s = i < options.unique_scenarios
                            ? pool[i]
                            : pool[rng.Below(options.unique_scenarios)];
    // Identical short exchanges would collapse under dialogue de-duplication.
    CorpusRecord r = SimulateDialogue(s, rng);
    while (!dialogues.insert(DialogueKey(r)).second) r = SimulateDialogue(s, rng);
    auto& split = i < n_train ? corpus.train
                              : (i < n_train + n_valid ? corpus.valid : corpus.test);
    split.push_back(SerializeRecord(r));
    split.push_back(SerializeRecord(Mirror(r)));
  }
  return corpus;
}

}  // namespace bargain
