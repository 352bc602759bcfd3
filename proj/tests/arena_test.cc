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

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

// Eigen-based headers must precede httplib.h.
#include "bargain/arena_http.h"

#include "doctest.h"
#include "test_util.h"
#include "bargain/errors.h"
#include "bargain/serialize.h"
#include "bargain/surface.h"

namespace bargain {
namespace {

using nlohmann::json;

std::map<std::string, std::shared_ptr<const PolicyParameters>> ThreeAgents() {
  std::map<std::string, std::shared_ptr<const PolicyParameters>> agents;
  int i = 0;
  for (const char* name : {"M-fair-S", "M-selfish-S", "M-selfish-selfish"}) {
    agents[name] = std::make_shared<const PolicyParameters>(
        PolicyParameters::Initialize(testing::SmallArchitecture(40 + i++)));
  }
  return agents;
}

std::unique_ptr<ArenaService> MakeService(ArenaConfig cfg = {},
                                          const std::string& db = ":memory:") {
  return std::make_unique<ArenaService>(ThreeAgents(), std::make_unique<SessionStore>(db),
                                        cfg);
}

// Fails the test if any object key anywhere in `j` could carry the agent's
// private values.
void CheckNoAgentValues(const json& j) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      INFO(key);
      CHECK(key != "scenario");
      CHECK(key != "values_a");
      CHECK(key != "values_b");
      CHECK(key != "agent_values");
      CHECK((key.find("values") == std::string::npos || key == "human_values"));
      CheckNoAgentValues(value);
    }
  } else if (j.is_array()) {
    for (const json& v : j) CheckNoAgentValues(v);
  }
}

// Structured turn that steers towards a deal: accept the agent's standing
// offer, select after the agent accepts, otherwise ask for one item.
TurnInput CooperativeTurn(const json& view) {
  TurnInput in;
  const json& msgs = view.at("messages");
  if (!msgs.empty() && msgs.back().at("from") == "agent") {
    const std::string kind = msgs.back().at("act").at("kind");
    if (kind == "PROPOSE") {
      in.kind = ActKind::kAccept;
      return in;
    }
    if (kind == "ACCEPT") {
      in.kind = ActKind::kSelect;
      return in;
    }
  }
  IssueVector counts = IssueVectorFromJson(view.at("counts"));
  IssueVector take{0, 0, 0};
  for (int k = 0; k < kNumIssues; ++k) {
    if (counts[k] > 0) {
      take[k] = 1;
      break;
    }
  }
  in.kind = ActKind::kPropose;
  in.take = take;
  return in;
}

TEST_CASE("random assignment is uniform over agents") {
  auto service = MakeService();
  std::map<std::string, int> seen;
  int human_a = 0;
  const int n = 600;
  for (int i = 0; i < n; ++i) {
    json v = service->CreateSession("random");
    ++seen[v.at("agent").get<std::string>()];
    human_a += v.at("human_role") == "A";
    CheckNoAgentValues(v);
  }
  REQUIRE(seen.size() == 3);
  for (const auto& [name, count] : seen) {
    CAPTURE(name);
    CHECK(std::abs(static_cast<double>(count) / n - 1.0 / 3.0) <= 0.05);
  }
  CHECK(std::abs(static_cast<double>(human_a) / n - 0.5) <= 0.05);
  CHECK_THROWS_AS(service->CreateSession("nobody"), NotFoundError);
}

TEST_CASE("full session flow matches a core replay") {
  auto service = MakeService();
  int agreements = 0;
  for (uint64_t seed = 0; seed < 30; ++seed) {
    json v = service->CreateSession("M-selfish-S", seed);
    const std::string id = v.at("session_id");
    CheckNoAgentValues(v);
    while (v.at("status") == "active") {
      REQUIRE(v.at("your_turn").get<bool>());
      TurnResult r = service->PostHumanTurn(id, CooperativeTurn(v));
      REQUIRE(r.accepted);
      v = r.view;
      CheckNoAgentValues(v);
    }
    if (v.at("status") == "awaiting_deal_entry") {
      // Enter the split the dialogue settled on, from the human's side.
      IssueVector counts = IssueVectorFromJson(v.at("counts"));
      IssueVector take = counts;
      const json& msgs = v.at("messages");
      for (auto it = msgs.rbegin(); it != msgs.rend(); ++it) {
        if (it->at("act").at("kind") != "PROPOSE") continue;
        IssueVector t = IssueVectorFromJson(it->at("act").at("take"));
        const bool mine = it->at("from") == "human";
        take = mine ? t : Complement(Division{t}, counts).take;
        break;
      }
      v = service->SubmitDeal(id, take);
      CheckNoAgentValues(v);
    }
    REQUIRE(v.at("status") == "closed");
    json survey = service->SubmitSurvey(id, {4, 3, "fine"});
    CheckNoAgentValues(survey);
    CHECK_THROWS_AS(service->SubmitSurvey(id, {4, 3, ""}), ConflictError);
    CHECK_THROWS_AS(service->PostHumanTurn(id, CooperativeTurn(v)), StateError);

    // Replay through the core state machine and compare outcomes.
    json t = service->ExportTranscripts("M-selfish-S").back();
    REQUIRE(t.at("session_id") == id);
    Scenario s = ScenarioFromJson(t.at("scenario"));
    DialogueState state = DialogueState::Start(s, Role::kA);
    for (const json& a : t.at("acts")) state = ApplyAct(state, ActFromJson(a));
    REQUIRE(state.terminal);
    auto div = [](const json& j) -> std::optional<Division> {
      if (j.is_null()) return std::nullopt;
      return Division{IssueVectorFromJson(j)};
    };
    const Role human = RoleFromName(t.at("human_role"));
    std::optional<Division> hd = div(t.at("human_deal")), ad = div(t.at("agent_deal"));
    Outcome replay = ResolveOutcome(state, human == Role::kA ? hd : ad,
                                    human == Role::kA ? ad : hd);
    CHECK(OutcomeFromJson(t.at("outcome")) == replay);
    CHECK(v.at("outcome").at("human_points") == replay.points(human));
    CHECK(v.at("outcome").at("kind") == OutcomeKindName(replay.kind));
    agreements += replay.agreed();
    CHECK(t.at("survey").at("satisfaction") == 4);
  }
  CHECK(agreements > 0);
}

TEST_CASE("twenty utterances close the session as a cutoff") {
  auto service = MakeService();
  for (uint64_t seed = 0; seed < 5; ++seed) {
    json v = service->CreateSession("M-fair-S", seed);
    const std::string id = v.at("session_id");
    while (v.at("status") == "active") {
      TurnInput in;
      in.kind = ActKind::kPropose;
      in.take = IssueVectorFromJson(v.at("counts"));
      v = service->PostHumanTurn(id, in).view;
    }
    CHECK(v.at("status") == "closed");
    CHECK(v.at("utterances") == 20);
    CHECK(v.at("outcome").at("kind") == "CUTOFF");
    CHECK(v.at("outcome").at("human_points") == 0);
    CHECK(v.at("outcome").at("agent_points") == 0);
    CHECK_THROWS_AS(service->SubmitDeal(id, {0, 0, 0}), StateError);
  }
}

TEST_CASE("walkaway rules") {
  auto service = MakeService();
  json v = service->CreateSession("M-fair-S", 11);
  const std::string id = v.at("session_id");
  CHECK_FALSE(v.at("can_walkaway").get<bool>());
  CHECK_THROWS_AS(service->Walkaway(id), PreconditionError);
  TurnInput in;
  in.kind = ActKind::kPropose;
  in.take = IssueVectorFromJson(v.at("counts"));
  v = service->PostHumanTurn(id, in).view;
  REQUIRE(v.at("status") == "active");
  CHECK(v.at("can_walkaway").get<bool>());
  v = service->Walkaway(id);
  CHECK(v.at("status") == "closed");
  CHECK(v.at("outcome").at("kind") == "WALKAWAY");
  CHECK(v.at("outcome").at("human_points") == 0);
  CHECK(v.at("outcome").at("agent_points") == 0);
  CHECK_THROWS_AS(service->Walkaway(id), StateError);
}

TEST_CASE("turn validation") {
  auto service = MakeService();
  json v = service->CreateSession("M-fair-S", 12);
  const std::string id = v.at("session_id");
  const int turns = v.at("human_turns");

  TurnInput gibberish;
  gibberish.text = "what a lovely day";
  TurnResult r = service->PostHumanTurn(id, gibberish);
  CHECK_FALSE(r.accepted);
  CHECK_FALSE(r.prompt.empty());
  CHECK(r.view.at("human_turns") == turns);
  CHECK(r.view.at("messages").size() == v.at("messages").size());

  TurnInput too_many;
  too_many.kind = ActKind::kPropose;
  too_many.take = IssueVector{9, 9, 9};
  CHECK_THROWS_AS(service->PostHumanTurn(id, too_many), ValidationError);

  TurnInput walk;
  walk.kind = ActKind::kWalkaway;
  CHECK_THROWS_AS(service->PostHumanTurn(id, walk), ValidationError);

  TurnInput text;
  text.text = "i want everything";
  r = service->PostHumanTurn(id, text);
  CHECK(r.accepted);
  CHECK(r.view.at("human_turns") == turns + 1);

  CHECK_THROWS_AS(service->GetSession("nope"), NotFoundError);
}

TEST_CASE("survey rules") {
  auto service = MakeService();
  json v = service->CreateSession("M-fair-S", 13);
  const std::string id = v.at("session_id");
  CHECK_THROWS_AS(service->SubmitSurvey(id, {3, 3, ""}), StateError);
  TurnInput in;
  in.kind = ActKind::kPropose;
  in.take = IssueVector{0, 0, 0};
  service->PostHumanTurn(id, in);
  service->Walkaway(id);
  CHECK_THROWS_AS(service->SubmitSurvey(id, {0, 3, ""}), ValidationError);
  CHECK_THROWS_AS(service->SubmitSurvey(id, {3, 6, ""}), ValidationError);
  service->SubmitSurvey(id, {5, 1, "ok"});
  CHECK(service->GetSession(id).at("survey_submitted").get<bool>());
}

TEST_CASE("infeasible deals report each issue") {
  auto service = MakeService();
  for (uint64_t seed = 0; seed < 200; ++seed) {
    json v = service->CreateSession("M-fair-S", 1000 + seed);
    const std::string id = v.at("session_id");
    while (v.at("status") == "active") {
      v = service->PostHumanTurn(id, CooperativeTurn(v)).view;
    }
    if (v.at("status") != "awaiting_deal_entry") continue;
    try {
      service->SubmitDeal(id, {-1, 99, 0});
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("book") != std::string::npos);
      CHECK(msg.find("hat") != std::string::npos);
    }
    CHECK(service->GetSession(id).at("status") == "awaiting_deal_entry");
    return;
  }
  FAIL("no session reached deal entry");
}

TEST_CASE("transcripts persist and filter by agent") {
  auto dir = testing::ScratchDir("arena_store");
  const std::string db = (dir / "arena.db").string();
  std::vector<std::string> ids;
  {
    auto service = MakeService({}, db);
    ids.push_back(service->CreateSession("M-fair-S", 1).at("session_id"));
    ids.push_back(service->CreateSession("M-selfish-S", 2).at("session_id"));
    ids.push_back(service->CreateSession("M-fair-S", 3).at("session_id"));
  }
  auto reopened = MakeService({}, db);
  CHECK(reopened->ExportTranscripts().size() == 3);
  auto fair = reopened->ExportTranscripts("M-fair-S");
  REQUIRE(fair.size() == 2);
  CHECK(fair[0].at("session_id") == ids[0]);
  CHECK(fair[1].at("session_id") == ids[2]);
  CHECK(fair[0].at("agent_hash") == ThreeAgents().at("M-fair-S")->Hash());
  CHECK(reopened->GetSession(ids[1]).at("agent") == "M-selfish-S");
  // A transcript replays through the state machine.
  for (const json& t : reopened->ExportTranscripts()) {
    DialogueState s = DialogueState::Start(ScenarioFromJson(t.at("scenario")));
    for (const json& a : t.at("acts")) s = ApplyAct(s, ActFromJson(a));
    CHECK(s.history.size() == t.at("texts").size());
  }
}

TEST_CASE("agent deal is revealed only when configured") {
  ArenaConfig cfg;
  cfg.show_agent_deal = true;
  auto service = MakeService(cfg);
  for (uint64_t seed = 0; seed < 200; ++seed) {
    json v = service->CreateSession("M-fair-S", 2000 + seed);
    const std::string id = v.at("session_id");
    while (v.at("status") == "active") {
      v = service->PostHumanTurn(id, CooperativeTurn(v)).view;
    }
    if (v.at("status") != "awaiting_deal_entry") continue;
    v = service->SubmitDeal(id, {0, 0, 0});
    CHECK(v.at("outcome").contains("agent_division"));
    CheckNoAgentValues(v);
    return;
  }
  FAIL("no session reached deal entry");
}

TEST_CASE("events are appended in order") {
  auto service = MakeService();
  json v = service->CreateSession("M-fair-S", 21);
  const std::string id = v.at("session_id");
  auto events = service->Events(id, 0, 0);
  REQUIRE_FALSE(events.empty());
  CHECK(events[0].at("type") == "created");
  const size_t before = events.size();
  TurnInput in;
  in.kind = ActKind::kPropose;
  in.take = IssueVector{0, 0, 0};
  service->PostHumanTurn(id, in);
  auto more = service->Events(id, static_cast<int>(before), 0);
  REQUIRE_FALSE(more.empty());
  CHECK(more[0].at("from") == "human");
  CHECK(service->Events(id, 1000, 10).empty());
  for (const json& e : service->Events(id, 0, 0)) CheckNoAgentValues(e);
}

// HTTP layer on an ephemeral port.
class TestServer {
 public:
  explicit TestServer(ArenaConfig cfg) : service_(MakeService(cfg)) {
    RegisterArenaRoutes(server_, *service_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Client Client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(10, 0);
    return c;
  }

 private:
  std::unique_ptr<ArenaService> service_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

json Parse(const httplib::Result& r) {
  REQUIRE(r);
  CheckNoAgentValues(json::parse(r->body));
  return json::parse(r->body);
}

TEST_CASE("http contract") {
  ArenaConfig cfg;
  cfg.admin_token = "secret";
  TestServer server(cfg);
  httplib::Client c = server.Client();

  auto agents = c.Get("/api/agents");
  REQUIRE(agents);
  CHECK(agents->status == 200);
  CHECK(Parse(agents).at("agents").size() == 3);

  auto created = c.Post("/api/sessions", R"({"agent":"M-fair-S","seed":5})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  json v = Parse(created);
  const std::string id = v.at("session_id");
  const std::string base = "/api/sessions/" + id;

  auto early = c.Post(base + "/walkaway", "", "application/json");
  REQUIRE(early);
  CHECK(early->status == 412);

  auto bad_kind = c.Post(base + "/turns", R"({"act":{"kind":"DANCE"}})", "application/json");
  REQUIRE(bad_kind);
  CHECK(bad_kind->status == 422);

  auto malformed = c.Post(base + "/turns", "{not json", "application/json");
  REQUIRE(malformed);
  CHECK(malformed->status == 400);

  auto unread = c.Post(base + "/turns", R"({"text":"hmm"})", "application/json");
  REQUIRE(unread);
  CHECK(unread->status == 200);
  json u = Parse(unread);
  CHECK_FALSE(u.at("accepted").get<bool>());
  CHECK(u.contains("prompt"));

  auto turn = c.Post(base + "/turns", R"({"act":{"kind":"PROPOSE","take":[0,0,0]}})",
                     "application/json");
  REQUIRE(turn);
  CHECK(turn->status == 200);
  CHECK(Parse(turn).at("accepted").get<bool>());

  auto deal = c.Post(base + "/deal", R"({"take":[0,0,0]})", "application/json");
  REQUIRE(deal);
  CHECK(deal->status == 409);

  auto walk = c.Post(base + "/walkaway", "", "application/json");
  REQUIRE(walk);
  CHECK(walk->status == 200);
  CHECK(Parse(walk).at("outcome").at("kind") == "WALKAWAY");

  auto survey_bad = c.Post(base + "/survey", R"({"satisfaction":9,"likeness":1})",
                           "application/json");
  REQUIRE(survey_bad);
  CHECK(survey_bad->status == 422);
  auto survey = c.Post(base + "/survey", R"({"satisfaction":2,"likeness":1})",
                       "application/json");
  REQUIRE(survey);
  CHECK(survey->status == 200);
  auto again = c.Post(base + "/survey", R"({"satisfaction":2,"likeness":1})",
                      "application/json");
  REQUIRE(again);
  CHECK(again->status == 409);

  auto missing = c.Get("/api/sessions/doesnotexist");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  auto got = c.Get(base);
  REQUIRE(got);
  CHECK(Parse(got).at("status") == "closed");

  auto events = c.Get(base + "/events");
  REQUIRE(events);
  CHECK(events->status == 200);
  CHECK(events->get_header_value("Content-Type").find("text/event-stream") == 0);
  CHECK(events->body.find("event: created") != std::string::npos);
  CHECK(events->body.find("event: outcome") != std::string::npos);
  CHECK(events->body.find("values") == std::string::npos);

  auto resumed = c.Get(base + "/events", {{"Last-Event-ID", "0"}});
  REQUIRE(resumed);
  CHECK(resumed->body.find("event: created") == std::string::npos);

  auto forbidden = c.Get("/admin/transcripts");
  REQUIRE(forbidden);
  CHECK(forbidden->status == 403);
  auto exported = c.Get("/admin/transcripts?agent=M-fair-S", {{"X-Admin-Token", "secret"}});
  REQUIRE(exported);
  CHECK(exported->status == 200);
  std::istringstream lines(exported->body);
  int n = 0;
  for (std::string line; std::getline(lines, line);) {
    json t = json::parse(line);
    CHECK(t.at("agent") == "M-fair-S");
    ++n;
  }
  CHECK(n == 1);
}

TEST_CASE("transcript export is disabled without an operator token") {
  TestServer server(ArenaConfig{});
  httplib::Client c = server.Client();
  auto r = c.Get("/admin/transcripts", {{"X-Admin-Token", ""}});
  REQUIRE(r);
  CHECK(r->status == 403);
}

}  // namespace
}  // namespace bargain
