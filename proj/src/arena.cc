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

#include "bargain/arena.h"

#include <chrono>
#include <cstdio>

#include "bargain/errors.h"
#include "bargain/serialize.h"
#include "bargain/surface.h"

namespace bargain {

using nlohmann::json;

const char* SessionStatusName(SessionStatus s) {
  switch (s) {
    case SessionStatus::kActive: return "active";
    case SessionStatus::kAwaitingDealEntry: return "awaiting_deal_entry";
    default: return "closed";
  }
}

namespace {

SessionStatus StatusFromName(const std::string& n) {
  if (n == "active") return SessionStatus::kActive;
  if (n == "awaiting_deal_entry") return SessionStatus::kAwaitingDealEntry;
  if (n == "closed") return SessionStatus::kClosed;
  throw DataError("unknown session status " + n);
}

json OptionalDivision(const std::optional<Division>& d) {
  return d ? IssueVectorToJson(d->take) : json(nullptr);
}

std::optional<Division> DivisionFrom(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Division{IssueVectorFromJson(j)};
}

json SurveyJson(const SurveyResponse& s) {
  return {{"satisfaction", s.satisfaction}, {"likeness", s.likeness},
          {"comments", s.comments}};
}

std::string Hex(uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace

json SessionToJson(const Session& s) {
  json messages = json::array();
  for (const Message& m : s.messages) {
    messages.push_back({{"act", ActToJson(m.act)}, {"text", m.text}});
  }
  return {{"id", s.id},
          {"agent", s.agent},
          {"seed", s.seed},
          {"cutoff", s.cutoff},
          {"scenario", ScenarioToJson(s.scenario)},
          {"human_role", RoleName(s.human_role)},
          {"messages", messages},
          {"status", SessionStatusName(s.status)},
          {"human_turns", s.human_turns},
          {"human_deal", OptionalDivision(s.human_deal)},
          {"agent_deal", OptionalDivision(s.agent_deal)},
          {"outcome", s.outcome ? OutcomeToJson(*s.outcome) : json(nullptr)},
          {"survey", s.survey ? SurveyJson(*s.survey) : json(nullptr)}};
}

Session SessionFromJson(const json& j) {
  try {
    Session s;
    s.id = j.at("id").get<std::string>();
    s.agent = j.at("agent").get<std::string>();
    s.seed = j.at("seed").get<uint64_t>();
    s.cutoff = j.at("cutoff").get<int>();
    s.scenario = ScenarioFromJson(j.at("scenario"));
    s.human_role = RoleFromName(j.at("human_role").get<std::string>());
    s.status = StatusFromName(j.at("status").get<std::string>());
    s.human_turns = j.at("human_turns").get<int>();
    s.human_deal = DivisionFrom(j.at("human_deal"));
    s.agent_deal = DivisionFrom(j.at("agent_deal"));
    if (!j.at("outcome").is_null()) s.outcome = OutcomeFromJson(j.at("outcome"));
    if (!j.at("survey").is_null()) {
      const json& v = j.at("survey");
      s.survey = SurveyResponse{v.at("satisfaction").get<int>(), v.at("likeness").get<int>(),
                                v.at("comments").get<std::string>()};
    }
    // The dialogue state is rebuilt by replaying the acts.
    s.state = DialogueState::Start(s.scenario, Role::kA);
    for (const json& m : j.at("messages")) {
      Message msg{ActFromJson(m.at("act")), m.at("text").get<std::string>()};
      s.state = ApplyAct(s.state, msg.act, s.cutoff);
      s.messages.push_back(std::move(msg));
    }
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("session document: ") + e.what());
  }
}

ArenaService::ArenaService(
    std::map<std::string, std::shared_ptr<const PolicyParameters>> agents,
    std::unique_ptr<SessionStore> store, ArenaConfig config)
    : agents_(std::move(agents)),
      store_(std::move(store)),
      config_(std::move(config)),
      seed_stream_(config_.seed) {
  if (agents_.empty()) throw ConfigError("arena: no agents loaded");
  if (!store_) throw ConfigError("arena: no session store");
  if (!(config_.temperature > 0)) throw ConfigError("arena: temperature must be > 0");
  if (config_.cutoff < 2) throw ConfigError("arena: cutoff must be >= 2");
}

std::vector<std::string> ArenaService::AgentNames() const {
  std::vector<std::string> names;
  for (const auto& [name, _] : agents_) names.push_back(name);
  return names;
}

const PolicyParameters& ArenaService::AgentParams(const std::string& name) const {
  auto it = agents_.find(name);
  if (it == agents_.end()) throw NotFoundError("unknown agent " + name);
  return *it->second;
}

ArenaService::Slot& ArenaService::SlotFor(const std::string& id) {
  std::lock_guard lock(slots_mu_);
  auto& slot = slots_[id];
  if (!slot) slot = std::make_unique<Slot>();
  return *slot;
}

Session ArenaService::Load(const std::string& id) {
  std::optional<std::string> doc = store_->Get(id);
  if (!doc) throw NotFoundError("unknown session " + id);
  return SessionFromJson(json::parse(*doc));
}

void ArenaService::Save(const Session& s, const std::vector<json>& events) {
  std::vector<std::string> docs;
  for (const json& e : events) docs.push_back(e.dump());
  store_->Update(s.id, SessionToJson(s).dump(), docs);
  events_cv_.notify_all();
}

json ArenaService::View(const Session& s) const {
  json messages = json::array();
  for (const Message& m : s.messages) {
    messages.push_back({{"from", m.act.speaker == s.human_role ? "human" : "agent"},
                        {"act", ActToJson(m.act)},
                        {"text", m.text}});
  }
  json v{{"session_id", s.id},
         {"agent", s.agent},
         {"status", SessionStatusName(s.status)},
         {"human_role", RoleName(s.human_role)},
         {"counts", IssueVectorToJson(s.scenario.counts)},
         {"human_values", IssueVectorToJson(s.scenario.values(s.human_role))},
         {"messages", messages},
         {"utterances", s.state.utterance_count},
         {"cutoff", s.cutoff},
         {"human_turns", s.human_turns},
         {"your_turn", s.status == SessionStatus::kActive && s.state.turn == s.human_role},
         {"can_walkaway", s.status == SessionStatus::kActive && s.human_turns > 0},
         {"survey_submitted", s.survey.has_value()}};
  if (s.outcome) {
    json o{{"kind", OutcomeKindName(s.outcome->kind)},
           {"human_points", s.outcome->points(s.human_role)},
           {"agent_points", s.outcome->points(s.agent_role())},
           {"human_division", OptionalDivision(s.human_deal)},
           {"review_flag", s.outcome->review_flag}};
    if (config_.show_agent_deal) o["agent_division"] = OptionalDivision(s.agent_deal);
    v["outcome"] = o;
  } else {
    v["outcome"] = nullptr;
  }
  return v;
}

void ArenaService::Apply(Session& s, const DialogueAct& act,
                         std::vector<json>& events) {
  Apply(s, act, RealizeAct(act, s.scenario), events);
}

void ArenaService::Apply(Session& s, const DialogueAct& act, const std::string& text,
                         std::vector<json>& events) {
  s.state = ApplyAct(s.state, act, s.cutoff);
  s.messages.push_back({act, text});
  events.push_back({{"type", "message"},
                    {"from", act.speaker == s.human_role ? "human" : "agent"},
                    {"act", ActToJson(act)},
                    {"text", text}});
  if (!s.state.terminal) return;
  if (act.kind == ActKind::kSelect) {
    s.status = SessionStatus::kAwaitingDealEntry;
  } else {
    s.outcome = ResolveOutcome(s.state, std::nullopt, std::nullopt);
    s.status = SessionStatus::kClosed;
  }
  events.push_back({{"type", "status"}, {"status", SessionStatusName(s.status)}});
}

void ArenaService::AgentMove(Session& s, std::vector<json>& events) {
  const PolicyParameters& params = AgentParams(s.agent);
  StateEncoding enc = EncodeState(params, s.scenario, s.agent_role(), s.state.history);
  Rng rng(DeriveSeed(s.seed, {3, s.state.history.size()}));
  SampledAct a = SampleAct(params, enc, s.agent_role(), rng, config_.temperature, false);
  Apply(s, a.act, events);
}

json ArenaService::CreateSession(const std::string& agent, std::optional<uint64_t> seed) {
  uint64_t base;
  if (seed) {
    base = *seed;
  } else {
    std::lock_guard lock(seed_mu_);
    base = seed_stream_.Next();
  }
  Rng rng(DeriveSeed(base, {0xa9e47}));
  Session s;
  if (agent.empty() || agent == "random") {
    std::vector<std::string> names = AgentNames();
    s.agent = names[rng.Below(static_cast<int>(names.size()))];
  } else {
    AgentParams(agent);
    s.agent = agent;
  }
  s.seed = base;
  s.cutoff = config_.cutoff;
  s.scenario = SampleScenario(DeriveSeed(base, {1}), config_.pool);
  s.human_role = rng.Below(2) == 0 ? Role::kA : Role::kB;
  s.state = DialogueState::Start(s.scenario, Role::kA);
  for (uint64_t salt = 0;; ++salt) {
    s.id = "s" + Hex(DeriveSeed(base, {2, salt}));
    s.scenario.id = s.id;
    if (store_->Insert(s.id, s.agent, SessionToJson(s).dump())) break;
  }
  std::lock_guard lock(SlotFor(s.id).mu);
  std::vector<json> events{{{"type", "created"}, {"status", "active"}}};
  if (s.agent_role() == Role::kA) AgentMove(s, events);
  Save(s, events);
  return View(s);
}

json ArenaService::GetSession(const std::string& id) {
  std::lock_guard lock(SlotFor(id).mu);
  return View(Load(id));
}

TurnResult ArenaService::PostHumanTurn(const std::string& id, const TurnInput& input) {
  std::lock_guard lock(SlotFor(id).mu);
  Session s = Load(id);
  if (s.status == SessionStatus::kClosed) throw StateError("session is closed");
  if (s.status == SessionStatus::kAwaitingDealEntry) {
    throw StateError("session is awaiting deal entry");
  }
  if (s.state.turn != s.human_role) throw TurnOrderError("not the human's turn");

  DialogueAct act;
  std::string text;
  if (input.text) {
    if (input.kind || input.take) {
      throw ValidationError("send either text or a structured act, not both");
    }
    OfferParse p = ParseUtterance(*input.text, s.scenario, s.human_role);
    if (p.status != ParseStatus::kParsed) {
      return {false,
              "Sorry, I could not read that (" + std::string(ParseStatusName(p.status)) +
                  (p.notes.empty() ? "" : ": " + p.notes) +
                  "). Please rephrase, for example \"i want 2 books and you get the "
                  "rest\", or use the offer composer.",
              View(s)};
    }
    act = *p.act;
    text = *input.text;
  } else {
    if (!input.kind) throw ValidationError("turn needs text or an act kind");
    act.kind = *input.kind;
    act.speaker = s.human_role;
    if (act.kind == ActKind::kPropose) {
      if (!input.take) throw ValidationError("PROPOSE needs a take vector");
      act.proposal = Division{*input.take};
    } else if (input.take) {
      throw ValidationError("only PROPOSE carries a take vector");
    }
    text = RealizeAct(act, s.scenario);
  }
  if (act.kind == ActKind::kWalkaway) {
    throw ValidationError("use the walkaway endpoint to leave the negotiation");
  }

  std::vector<json> events;
  try {
    Apply(s, act, text, events);
  } catch (const InvalidActError& e) {
    throw ValidationError(e.what());
  }
  ++s.human_turns;
  if (s.status == SessionStatus::kActive) AgentMove(s, events);
  Save(s, events);
  return {true, "", View(s)};
}

json ArenaService::SubmitDeal(const std::string& id, const IssueVector& take) {
  std::lock_guard lock(SlotFor(id).mu);
  Session s = Load(id);
  if (s.status != SessionStatus::kAwaitingDealEntry) {
    throw StateError(std::string("deal entry not open (session is ") +
                     SessionStatusName(s.status) + ")");
  }
  std::string problems;
  for (int k = 0; k < kNumIssues; ++k) {
    if (take[k] < 0 || take[k] > s.scenario.counts[k]) {
      problems += " " + ItemWord(k, true) + ": " + std::to_string(take[k]) +
                  " outside 0.." + std::to_string(s.scenario.counts[k]) + ";";
    }
  }
  if (!problems.empty()) throw ValidationError("infeasible division:" + problems);
  const PolicyParameters& params = AgentParams(s.agent);
  StateEncoding enc = EncodeState(params, s.scenario, s.agent_role(), s.state.history);
  s.human_deal = Division{take};
  s.agent_deal = PredictOutputDeal(params, enc).argmax;
  const bool human_is_a = s.human_role == Role::kA;
  s.outcome = ResolveOutcome(s.state, human_is_a ? s.human_deal : s.agent_deal,
                             human_is_a ? s.agent_deal : s.human_deal);
  s.status = SessionStatus::kClosed;
  Save(s, {{{"type", "status"}, {"status", "closed"}},
           {{"type", "outcome"}, {"kind", OutcomeKindName(s.outcome->kind)}}});
  return View(s);
}

json ArenaService::Walkaway(const std::string& id) {
  std::lock_guard lock(SlotFor(id).mu);
  Session s = Load(id);
  if (s.status != SessionStatus::kActive) {
    throw StateError(std::string("cannot walk away from a session that is ") +
                     SessionStatusName(s.status));
  }
  if (s.human_turns == 0) {
    throw PreconditionError("walkaway is allowed only after at least one turn");
  }
  if (s.state.turn != s.human_role) throw TurnOrderError("not the human's turn");
  std::vector<json> events;
  Apply(s, DialogueAct::Walkaway(s.human_role), events);
  events.push_back({{"type", "outcome"}, {"kind", OutcomeKindName(s.outcome->kind)}});
  Save(s, events);
  return View(s);
}

json ArenaService::SubmitSurvey(const std::string& id, const SurveyResponse& survey) {
  std::lock_guard lock(SlotFor(id).mu);
  Session s = Load(id);
  if (s.status != SessionStatus::kClosed) throw StateError("session is not closed yet");
  if (s.survey) throw ConflictError("survey already submitted");
  auto in_range = [](int v) { return v >= 1 && v <= 5; };
  if (!in_range(survey.satisfaction) || !in_range(survey.likeness)) {
    throw ValidationError("survey scores must be integers from 1 to 5");
  }
  s.survey = survey;
  Save(s, {{{"type", "survey"}}});
  return {{"ok", true}, {"session_id", s.id}};
}

std::vector<json> ArenaService::ExportTranscripts(const std::string& agent) {
  std::vector<json> out;
  for (const std::string& doc : store_->All(agent)) {
    Session s = SessionFromJson(json::parse(doc));
    json acts = json::array(), texts = json::array();
    for (const Message& m : s.messages) {
      acts.push_back(ActToJson(m.act));
      texts.push_back(m.text);
    }
    auto it = agents_.find(s.agent);
    out.push_back({{"schema", "bargain.transcript/1"},
                   {"session_id", s.id},
                   {"agent", s.agent},
                   {"agent_hash", it == agents_.end() ? "" : it->second->Hash()},
                   {"seed", s.seed},
                   {"scenario", ScenarioToJson(s.scenario)},
                   {"human_role", RoleName(s.human_role)},
                   {"status", SessionStatusName(s.status)},
                   {"acts", acts},
                   {"texts", texts},
                   {"human_deal", OptionalDivision(s.human_deal)},
                   {"agent_deal", OptionalDivision(s.agent_deal)},
                   {"outcome", s.outcome ? OutcomeToJson(*s.outcome) : json(nullptr)},
                   {"survey", s.survey ? SurveyJson(*s.survey) : json(nullptr)}});
  }
  return out;
}

std::vector<json> ArenaService::Events(const std::string& id, int from, int wait_ms) {
  if (!store_->Get(id)) throw NotFoundError("unknown session " + id);
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::milliseconds(wait_ms);
  while (true) {
    std::vector<json> out;
    for (const std::string& e : store_->EventsFrom(id, from)) out.push_back(json::parse(e));
    if (!out.empty() || std::chrono::steady_clock::now() >= deadline) return out;
    std::unique_lock lock(events_mu_);
    events_cv_.wait_for(lock, std::chrono::milliseconds(50));
  }
}

bool ArenaService::IsClosed(const std::string& id) {
  return Load(id).status == SessionStatus::kClosed;
}

}  // namespace bargain
