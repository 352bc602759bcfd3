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

#ifndef BARGAIN_ARENA_H_
#define BARGAIN_ARENA_H_

#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "bargain/dialogue.h"
#include "bargain/policy.h"
#include "bargain/random.h"
#include "bargain/session_store.h"

namespace bargain {

enum class SessionStatus { kActive, kAwaitingDealEntry, kClosed };
const char* SessionStatusName(SessionStatus s);

struct SurveyResponse {
  int satisfaction = 0;  // 1..5
  int likeness = 0;      // 1..5
  std::string comments;
};

struct Message {
  DialogueAct act;
  std::string text;
};

// Full server-side session record. Holds the agent's values, so it is never
// sent to clients as is; see ArenaService::View.
struct Session {
  std::string id;
  std::string agent;
  uint64_t seed = 0;
  int cutoff = kDefaultCutoff;
  Scenario scenario;
  Role human_role = Role::kA;
  DialogueState state;
  std::vector<Message> messages;
  SessionStatus status = SessionStatus::kActive;
  int human_turns = 0;
  std::optional<Division> human_deal;
  std::optional<Division> agent_deal;
  std::optional<Outcome> outcome;
  std::optional<SurveyResponse> survey;

  Role agent_role() const { return Other(human_role); }
};

nlohmann::json SessionToJson(const Session& s);
Session SessionFromJson(const nlohmann::json& j);

struct ArenaConfig {
  double temperature = 0.5;
  int cutoff = kDefaultCutoff;
  PoolStats pool = PoolStats::Default();
  uint64_t seed = 1;
  // Reveal the agent's entered deal in client payloads once the session is
  // closed.
  bool show_agent_deal = false;
  // Required in the X-Admin-Token header for transcript export when set.
  std::string admin_token;
};

// Human turn input: a structured act or free text.
struct TurnInput {
  std::optional<ActKind> kind;
  std::optional<IssueVector> take;
  std::optional<std::string> text;
};

struct TurnResult {
  // False when free text could not be read; nothing was consumed.
  bool accepted = true;
  std::string prompt;
  nlohmann::json view;
};

// Session logic for human-vs-agent play. Thread-safe: operations on one
// session are serialized, different sessions proceed in parallel.
class ArenaService {
 public:
  ArenaService(std::map<std::string, std::shared_ptr<const PolicyParameters>> agents,
               std::unique_ptr<SessionStore> store, ArenaConfig config);

  const ArenaConfig& config() const { return config_; }
  std::vector<std::string> AgentNames() const;

  // agent empty or "random" draws uniformly. Seed empty uses the service's
  // own deterministic stream. Throws NotFoundError for an unknown agent.
  nlohmann::json CreateSession(const std::string& agent,
                               std::optional<uint64_t> seed = std::nullopt);
  nlohmann::json GetSession(const std::string& id);
  TurnResult PostHumanTurn(const std::string& id, const TurnInput& input);
  nlohmann::json SubmitDeal(const std::string& id, const IssueVector& take);
  nlohmann::json Walkaway(const std::string& id);
  nlohmann::json SubmitSurvey(const std::string& id, const SurveyResponse& survey);
  // One record per session, optionally for one agent only.
  std::vector<nlohmann::json> ExportTranscripts(const std::string& agent = "");

  // Events for a session starting at `from`; blocks up to `wait_ms` for new
  // ones when none are available. Returns an empty list on timeout.
  std::vector<nlohmann::json> Events(const std::string& id, int from, int wait_ms);
  bool IsClosed(const std::string& id);

  // Client-visible projection of a session. Never contains agent values.
  nlohmann::json View(const Session& s) const;

 private:
  struct Slot {
    std::mutex mu;
  };
  Slot& SlotFor(const std::string& id);
  Session Load(const std::string& id);
  void Save(const Session& s, const std::vector<nlohmann::json>& events);
  const PolicyParameters& AgentParams(const std::string& name) const;
  // Applies an act, records its text and moves status on terminal states.
  void Apply(Session& s, const DialogueAct& act, std::vector<nlohmann::json>& events);
  void Apply(Session& s, const DialogueAct& act, const std::string& text,
             std::vector<nlohmann::json>& events);
  void AgentMove(Session& s, std::vector<nlohmann::json>& events);

  std::map<std::string, std::shared_ptr<const PolicyParameters>> agents_;
  std::unique_ptr<SessionStore> store_;
  ArenaConfig config_;

  std::mutex slots_mu_;
  std::map<std::string, std::unique_ptr<Slot>> slots_;
  std::mutex seed_mu_;
  Rng seed_stream_;
  std::mutex events_mu_;
  std::condition_variable events_cv_;
};

}  // namespace bargain

#endif  // BARGAIN_ARENA_H_
