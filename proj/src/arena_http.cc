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

#include "bargain/arena_http.h"

#include <string>

#include "bargain/errors.h"
#include "bargain/serialize.h"

namespace bargain {

using nlohmann::json;

int HttpStatusFor(const std::exception& e) {
  if (dynamic_cast<const NotFoundError*>(&e)) return 404;
  if (dynamic_cast<const TurnOrderError*>(&e)) return 409;
  if (dynamic_cast<const StateError*>(&e)) return 409;
  if (dynamic_cast<const ConflictError*>(&e)) return 409;
  if (dynamic_cast<const PreconditionError*>(&e)) return 412;
  if (dynamic_cast<const ValidationError*>(&e)) return 422;
  if (dynamic_cast<const DataError*>(&e)) return 400;
  if (dynamic_cast<const json::exception*>(&e)) return 400;
  return 500;
}

namespace {

const char* ErrorKind(int status) {
  switch (status) {
    case 400: return "bad_request";
    case 404: return "not_found";
    case 409: return "conflict";
    case 412: return "precondition_failed";
    case 422: return "validation_error";
    default: return "internal_error";
  }
}

void Reply(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs a handler, turning exceptions into JSON error responses.
template <typename F>
httplib::Server::Handler Wrap(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const std::exception& e) {
      const int status = HttpStatusFor(e);
      Reply(res, {{"error", ErrorKind(status)}, {"message", e.what()}}, status);
    }
  };
}

json Body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body);
  if (!j.is_object()) throw DataError("request body must be a JSON object");
  return j;
}

TurnInput ParseTurn(const json& j) {
  TurnInput in;
  if (j.contains("text")) in.text = j.at("text").get<std::string>();
  if (j.contains("act")) {
    const json& a = j.at("act");
    try {
      in.kind = ActKindFromName(a.at("kind").get<std::string>());
    } catch (const LookupError& e) {
      throw ValidationError(e.what());
    }
    if (a.contains("take")) in.take = IssueVectorFromJson(a.at("take"));
  }
  return in;
}

}  // namespace

void RegisterArenaRoutes(httplib::Server& server, ArenaService& service) {
  server.Get("/api/agents", Wrap([&](const httplib::Request&, httplib::Response& res) {
    Reply(res, {{"agents", service.AgentNames()}});
  }));

  server.Post("/api/sessions", Wrap([&](const httplib::Request& req,
                                        httplib::Response& res) {
    json body = Body(req);
    std::optional<uint64_t> seed;
    if (body.contains("seed")) seed = body.at("seed").get<uint64_t>();
    Reply(res, service.CreateSession(body.value("agent", std::string("random")), seed),
          201);
  }));

  server.Get(R"(/api/sessions/([A-Za-z0-9]+))",
             Wrap([&](const httplib::Request& req, httplib::Response& res) {
               Reply(res, service.GetSession(req.matches[1]));
             }));

  server.Post(R"(/api/sessions/([A-Za-z0-9]+)/turns)",
              Wrap([&](const httplib::Request& req, httplib::Response& res) {
                TurnResult r = service.PostHumanTurn(req.matches[1], ParseTurn(Body(req)));
                json out{{"accepted", r.accepted}, {"session", r.view}};
                if (!r.accepted) out["prompt"] = r.prompt;
                Reply(res, out);
              }));

  server.Post(R"(/api/sessions/([A-Za-z0-9]+)/deal)",
              Wrap([&](const httplib::Request& req, httplib::Response& res) {
                json body = Body(req);
                if (!body.contains("take")) throw ValidationError("deal needs a take vector");
                Reply(res, service.SubmitDeal(req.matches[1],
                                              IssueVectorFromJson(body.at("take"))));
              }));

  server.Post(R"(/api/sessions/([A-Za-z0-9]+)/walkaway)",
              Wrap([&](const httplib::Request& req, httplib::Response& res) {
                Reply(res, service.Walkaway(req.matches[1]));
              }));

  server.Post(R"(/api/sessions/([A-Za-z0-9]+)/survey)",
              Wrap([&](const httplib::Request& req, httplib::Response& res) {
                json body = Body(req);
                SurveyResponse s;
                try {
                  s.satisfaction = body.at("satisfaction").get<int>();
                  s.likeness = body.at("likeness").get<int>();
                } catch (const json::exception& e) {
                  throw ValidationError(std::string("survey scores: ") + e.what());
                }
                s.comments = body.value("comments", std::string());
                Reply(res, service.SubmitSurvey(req.matches[1], s));
              }));

  server.Get(R"(/api/sessions/([A-Za-z0-9]+)/events)",
             Wrap([&](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1];
               service.GetSession(id);  // 404 before the stream starts
               int from = 0;
               if (req.has_header("Last-Event-ID")) {
                 from = std::stoi(req.get_header_value("Last-Event-ID")) + 1;
               }
               res.set_header("Cache-Control", "no-cache");
               res.set_chunked_content_provider(
                   "text/event-stream",
                   [&service, id, next = from](size_t, httplib::DataSink& sink) mutable {
                     for (const json& e : service.Events(id, next, 1000)) {
                       std::string chunk = "id: " + std::to_string(next++) +
                                           "\nevent: " + e.value("type", "message") +
                                           "\ndata: " + e.dump() + "\n\n";
                       if (!sink.write(chunk.data(), chunk.size())) return false;
                     }
                     if (service.IsClosed(id) && service.Events(id, next, 0).empty()) {
                       sink.done();
                     }
                     return true;
                   });
             }));

  server.Get("/admin/transcripts",
             Wrap([&](const httplib::Request& req, httplib::Response& res) {
               const std::string& token = service.config().admin_token;
               // No configured token disables the export.
               if (token.empty() || req.get_header_value("X-Admin-Token") != token) {
                 Reply(res, {{"error", "forbidden"}, {"message", "operator token required"}},
                       403);
                 return;
               }
               std::string body;
               for (const json& t : service.ExportTranscripts(req.get_param_value("agent"))) {
                 body += t.dump() + "\n";
               }
               res.set_content(body, "application/x-ndjson");
             }));
}

}  // namespace bargain
