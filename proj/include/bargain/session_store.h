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

#ifndef BARGAIN_SESSION_STORE_H_
#define BARGAIN_SESSION_STORE_H_

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

struct sqlite3;

namespace bargain {

// Transactional persistence for arena sessions: one JSON document per
// session plus an append-only event log.
class SessionStore {
 public:
  // ":memory:" gives a private in-memory database.
  explicit SessionStore(const std::string& path);
  ~SessionStore();
  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  bool Insert(const std::string& id, const std::string& agent, const std::string& doc);
  // Writes the session document and appends events atomically.
  void Update(const std::string& id, const std::string& doc,
              const std::vector<std::string>& events);
  std::optional<std::string> Get(const std::string& id);
  std::vector<std::string> EventsFrom(const std::string& id, int from);
  // Session documents in creation order, optionally for one agent.
  std::vector<std::string> All(const std::string& agent = "");

 private:
  void Exec(const std::string& sql);

  std::mutex mu_;
  sqlite3* db_ = nullptr;
};

}  // namespace bargain

#endif  // BARGAIN_SESSION_STORE_H_
