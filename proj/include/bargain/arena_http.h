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

#ifndef BARGAIN_ARENA_HTTP_H_
#define BARGAIN_ARENA_HTTP_H_

// Eigen (via arena.h) must precede httplib.h, whose <resolv.h> defines _res.
#include "bargain/arena.h"
#include "httplib.h"

namespace bargain {

// HTTP status for a library error.
int HttpStatusFor(const std::exception& e);

// Routes (JSON bodies):
//   POST /api/sessions                  {"agent": "<id>" | "random", "seed"?}
//   GET  /api/sessions/{id}
//   POST /api/sessions/{id}/turns       {"text": "..."} | {"act": {"kind", "take"?}}
//   POST /api/sessions/{id}/deal        {"take": [b, h, a]}
//   POST /api/sessions/{id}/walkaway
//   POST /api/sessions/{id}/survey      {"satisfaction", "likeness", "comments"?}
//   GET  /api/sessions/{id}/events      server-sent events, ends when closed
//   GET  /api/agents
//   GET  /admin/transcripts?agent=<id>  line-delimited JSON, operator only
void RegisterArenaRoutes(httplib::Server& server, ArenaService& service);

}  // namespace bargain

#endif  // BARGAIN_ARENA_HTTP_H_
