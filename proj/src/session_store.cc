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

#include "bargain/session_store.h"

#include <sqlite3.h>

#include "bargain/errors.h"

namespace bargain {
namespace {

// Owns a prepared statement.
class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      throw IoError(std::string("sqlite prepare: ") + sqlite3_errmsg(db));
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }

  Statement& Bind(int i, const std::string& s) {
    sqlite3_bind_text(stmt_, i, s.data(), static_cast<int>(s.size()), SQLITE_TRANSIENT);
    return *this;
  }
  Statement& Bind(int i, int v) {
    sqlite3_bind_int(stmt_, i, v);
    return *this;
  }
  // True while a row is available.
  bool Step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw IoError(std::string("sqlite step: ") + sqlite3_errmsg(db_));
  }
  std::string Text(int col) {
    const auto* p = sqlite3_column_text(stmt_, col);
    return p ? std::string(reinterpret_cast<const char*>(p),
                           sqlite3_column_bytes(stmt_, col))
             : std::string();
  }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

}  // namespace

SessionStore::SessionStore(const std::string& path) {
  if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw IoError("cannot open session store " + path + ": " + msg);
  }
  sqlite3_busy_timeout(db_, 5000);
  Exec("PRAGMA journal_mode=WAL");
  Exec(
      "CREATE TABLE IF NOT EXISTS sessions ("
      " seq INTEGER PRIMARY KEY AUTOINCREMENT,"
      " id TEXT UNIQUE NOT NULL, agent TEXT NOT NULL, doc TEXT NOT NULL)");
  Exec(
      "CREATE TABLE IF NOT EXISTS events ("
      " session_id TEXT NOT NULL, idx INTEGER NOT NULL, doc TEXT NOT NULL,"
      " PRIMARY KEY (session_id, idx))");
}

SessionStore::~SessionStore() { sqlite3_close(db_); }

void SessionStore::Exec(const std::string& sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw IoError("sqlite: " + msg);
  }
}

bool SessionStore::Insert(const std::string& id, const std::string& agent,
                          const std::string& doc) {
  std::lock_guard lock(mu_);
  Statement check(db_, "SELECT 1 FROM sessions WHERE id = ?");
  if (check.Bind(1, id).Step()) return false;
  Statement s(db_, "INSERT INTO sessions (id, agent, doc) VALUES (?, ?, ?)");
  s.Bind(1, id).Bind(2, agent).Bind(3, doc).Step();
  return true;
}

void SessionStore::Update(const std::string& id, const std::string& doc,
                          const std::vector<std::string>& events) {
  std::lock_guard lock(mu_);
  Exec("BEGIN IMMEDIATE");
  try {
    Statement s(db_, "UPDATE sessions SET doc = ? WHERE id = ?");
    s.Bind(1, doc).Bind(2, id).Step();
    if (sqlite3_changes(db_) != 1) throw NotFoundError("session " + id);
    int next = 0;
    {
      Statement c(db_, "SELECT COUNT(*) FROM events WHERE session_id = ?");
      if (c.Bind(1, id).Step()) next = std::stoi(c.Text(0));
    }
    for (const std::string& e : events) {
      Statement ins(db_, "INSERT INTO events (session_id, idx, doc) VALUES (?, ?, ?)");
      ins.Bind(1, id).Bind(2, next++).Bind(3, e).Step();
    }
    Exec("COMMIT");
  } catch (...) {
    Exec("ROLLBACK");
    throw;
  }
}

std::optional<std::string> SessionStore::Get(const std::string& id) {
  std::lock_guard lock(mu_);
  Statement s(db_, "SELECT doc FROM sessions WHERE id = ?");
  if (!s.Bind(1, id).Step()) return std::nullopt;
  return s.Text(0);
}

std::vector<std::string> SessionStore::EventsFrom(const std::string& id, int from) {
  std::lock_guard lock(mu_);
  Statement s(db_,
              "SELECT doc FROM events WHERE session_id = ? AND idx >= ? ORDER BY idx");
  s.Bind(1, id).Bind(2, from);
  std::vector<std::string> out;
  while (s.Step()) out.push_back(s.Text(0));
  return out;
}

std::vector<std::string> SessionStore::All(const std::string& agent) {
  std::lock_guard lock(mu_);
  Statement s(db_, agent.empty()
                       ? "SELECT doc FROM sessions ORDER BY seq"
                       : "SELECT doc FROM sessions WHERE agent = ? ORDER BY seq");
  if (!agent.empty()) s.Bind(1, agent);
  std::vector<std::string> out;
  while (s.Step()) out.push_back(s.Text(0));
  return out;
}

}  // namespace bargain
