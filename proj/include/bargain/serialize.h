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

#ifndef BARGAIN_SERIALIZE_H_
#define BARGAIN_SERIALIZE_H_

#include "json.hpp"
#include "bargain/dialogue.h"

namespace bargain {

// JSON forms shared by tournament records, arena transcripts and the CLI.
// Readers throw DataError on malformed input.

nlohmann::json IssueVectorToJson(const IssueVector& v);
IssueVector IssueVectorFromJson(const nlohmann::json& j);

nlohmann::json ScenarioToJson(const Scenario& s);
Scenario ScenarioFromJson(const nlohmann::json& j);

// {"speaker": "A", "kind": "PROPOSE", "take": [..]}; take only for PROPOSE.
nlohmann::json ActToJson(const DialogueAct& a);
DialogueAct ActFromJson(const nlohmann::json& j);

nlohmann::json OutcomeToJson(const Outcome& o);
Outcome OutcomeFromJson(const nlohmann::json& j);

Role RoleFromName(const std::string& name);

}  // namespace bargain

#endif  // BARGAIN_SERIALIZE_H_
