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

#include "bargain/serialize.h"

#include "bargain/errors.h"

namespace bargain {

using nlohmann::json;

namespace {

template <typename F>
auto Guard(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + ": " + e.what());
  }
}

json DivisionOrNull(const std::optional<Division>& d) {
  return d ? IssueVectorToJson(d->take) : json(nullptr);
}

std::optional<Division> DivisionFromNullable(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Division{IssueVectorFromJson(j)};
}

}  // namespace

json IssueVectorToJson(const IssueVector& v) { return json::array({v[0], v[1], v[2]}); }

IssueVector IssueVectorFromJson(const json& j) {
  return Guard("issue vector", [&] {
    if (!j.is_array() || j.size() != kNumIssues) {
      throw DataError("issue vector: expected 3 integers, got " + j.dump());
    }
    IssueVector v;
    for (int k = 0; k < kNumIssues; ++k) v[k] = j.at(k).get<int>();
    return v;
  });
}

json ScenarioToJson(const Scenario& s) {
  return {{"id", s.id},
          {"counts", IssueVectorToJson(s.counts)},
          {"values_a", IssueVectorToJson(s.values_a)},
          {"values_b", IssueVectorToJson(s.values_b)}};
}

Scenario ScenarioFromJson(const json& j) {
  return Guard("scenario", [&] {
    Scenario s;
    s.id = j.value("id", std::string());
    s.counts = IssueVectorFromJson(j.at("counts"));
    s.values_a = IssueVectorFromJson(j.at("values_a"));
    s.values_b = IssueVectorFromJson(j.at("values_b"));
    return s;
  });
}

Role RoleFromName(const std::string& name) {
  if (name == "A") return Role::kA;
  if (name == "B") return Role::kB;
  throw DataError("unknown role " + name);
}

json ActToJson(const DialogueAct& a) {
  json j{{"speaker", RoleName(a.speaker)}, {"kind", ActKindName(a.kind)}};
  if (a.proposal) j["take"] = IssueVectorToJson(a.proposal->take);
  return j;
}

DialogueAct ActFromJson(const json& j) {
  return Guard("act", [&] {
    DialogueAct a;
    a.speaker = RoleFromName(j.at("speaker").get<std::string>());
    try {
      a.kind = ActKindFromName(j.at("kind").get<std::string>());
    } catch (const LookupError& e) {
      throw DataError(e.what());
    }
    if (j.contains("take")) a.proposal = Division{IssueVectorFromJson(j.at("take"))};
    if ((a.kind == ActKind::kPropose) != a.proposal.has_value()) {
      throw DataError("act: take must be present exactly for PROPOSE");
    }
    return a;
  });
}

json OutcomeToJson(const Outcome& o) {
  return {{"kind", OutcomeKindName(o.kind)},  {"points_a", o.points_a},
          {"points_b", o.points_b},           {"division_a", DivisionOrNull(o.division_a)},
          {"division_b", DivisionOrNull(o.division_b)}, {"review_flag", o.review_flag}};
}

Outcome OutcomeFromJson(const json& j) {
  return Guard("outcome", [&] {
    Outcome o;
    try {
      o.kind = OutcomeKindFromName(j.at("kind").get<std::string>());
    } catch (const LookupError& e) {
      throw DataError(e.what());
    }
    o.points_a = j.at("points_a").get<int>();
    o.points_b = j.at("points_b").get<int>();
    o.division_a = DivisionFromNullable(j.at("division_a"));
    o.division_b = DivisionFromNullable(j.at("division_b"));
    o.review_flag = j.at("review_flag").get<bool>();
    return o;
  });
}

}  // namespace bargain
