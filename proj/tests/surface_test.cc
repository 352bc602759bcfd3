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

#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.h"
#include "bargain/scenario.h"
#include "bargain/surface.h"

namespace bargain {
namespace {

using testing::ClassicScenario;

// Every act either side could make in a scenario.
std::vector<DialogueAct> AllActs(const Scenario& s) {
  std::vector<DialogueAct> acts;
  for (Role r : {Role::kA, Role::kB}) {
    for (const Division& d : AllDivisions(s.counts)) {
      acts.push_back(DialogueAct::Propose(r, d.take));
    }
    acts.push_back(DialogueAct::Accept(r));
    acts.push_back(DialogueAct::Select(r));
    acts.push_back(DialogueAct::Walkaway(r));
  }
  return acts;
}

TEST_CASE("realized acts parse back to themselves on 100 random scenarios") {
  int checked = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const Scenario s = SampleScenario(seed * 7919 + 1, PoolStats::Default());
    for (const DialogueAct& act : AllActs(s)) {
      const std::string text = RealizeAct(act, s);
      const OfferParse p = ParseUtterance(text, s, act.speaker);
      INFO(text);
      REQUIRE(p.status == ParseStatus::kParsed);
      REQUIRE(p.act.has_value());
      CHECK(*p.act == act);
      ++checked;
    }
  }
  CHECK(checked > 100 * 10);
}

TEST_CASE("template text") {
  const Scenario s = ClassicScenario();
  CHECK(RealizeAct(DialogueAct::Propose(Role::kA, {1, 0, 2}), s) ==
        "i want 1 book and 2 balls");
  CHECK(RealizeAct(DialogueAct::Accept(Role::kA), s) == "deal");
  CHECK(RealizeAct(DialogueAct::Select(Role::kB), s) == "<selection>");
}

TEST_CASE("free-text offers") {
  const Scenario s = ClassicScenario();
  SUBCASE("bare item mentions mean all of that item") {
    OfferParse p = ParseUtterance("i will take the balls and hat", s, Role::kA);
    REQUIRE(p.status == ParseStatus::kParsed);
    CHECK(p.act->proposal->take == IssueVector{0, 1, 3});
  }
  SUBCASE("offers to the partner keep the rest") {
    OfferParse p = ParseUtterance("you can have the balls and one book", s, Role::kB);
    REQUIRE(p.status == ParseStatus::kParsed);
    CHECK(p.act->speaker == Role::kB);
    CHECK(p.act->proposal->take == IssueVector{1, 1, 0});
  }
  SUBCASE("agreement words") {
    OfferParse p = ParseUtterance("Deal!", s, Role::kA);
    REQUIRE(p.status == ParseStatus::kParsed);
    CHECK(p.act->kind == ActKind::kAccept);
  }
  SUBCASE("infeasible quantities fail") {
    OfferParse p = ParseUtterance("I want 9 hats", s, Role::kA);
    CHECK(p.status == ParseStatus::kFailed);
    CHECK_FALSE(p.act.has_value());
  }
  SUBCASE("no offer content fails") {
    CHECK(ParseUtterance("hello there", s).status != ParseStatus::kParsed);
    CHECK(ParseUtterance("", s).status == ParseStatus::kFailed);
  }
  SUBCASE("vague splits are ambiguous") {
    CHECK(ParseUtterance("lets split the books", s).status == ParseStatus::kAmbiguous);
  }
}

TEST_CASE("token normalization") {
  CHECK(NormalizeTokens("  Deal, OK?  ") == std::vector<std::string>{"deal", "ok"});
  CHECK(ItemWord(0, false) == "book");
  CHECK(ItemWord(2, true) == "balls");
}

}  // namespace
}  // namespace bargain
