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

#include "bargain/checkpoint.h"

#include <fstream>

#include "bargain/errors.h"

namespace bargain {

using nlohmann::json;

json CheckpointToJson(const Checkpoint& c) {
  const Architecture& a = c.params.architecture();
  const Provenance& p = c.provenance;
  const Eigen::VectorXd& v = c.params.values();
  return json{
      {"schema", kCheckpointSchema},
      {"architecture",
       {{"goal_dim", a.goal_dim},
        {"hidden_dim", a.hidden_dim},
        {"trunk_dim", a.trunk_dim},
        {"seed", a.seed},
        {"init_range", a.init_range}}},
      {"provenance",
       {{"name", p.name},
        {"stage", p.stage},
        {"reward", p.reward},
        {"partner", p.partner},
        {"seed", p.seed},
        {"init_hash", p.init_hash},
        {"partner_hash", p.partner_hash},
        {"config_hash", p.config_hash}}},
      {"hash", c.params.Hash()},
      {"parameters", std::vector<double>(v.data(), v.data() + v.size())},
  };
}

Checkpoint CheckpointFromJson(const json& j) {
  try {
    if (j.at("schema").get<std::string>() != kCheckpointSchema) {
      throw DataError("checkpoint: unsupported schema " + j.at("schema").dump());
    }
    const json& ja = j.at("architecture");
    Architecture a;
    a.goal_dim = ja.at("goal_dim").get<int>();
    a.hidden_dim = ja.at("hidden_dim").get<int>();
    a.trunk_dim = ja.at("trunk_dim").get<int>();
    a.seed = ja.at("seed").get<uint64_t>();
    a.init_range = ja.at("init_range").get<double>();
    auto raw = j.at("parameters").get<std::vector<double>>();
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(raw.data(), raw.size());
    Checkpoint c{PolicyParameters(a, std::move(v)), {}};
    const json& jp = j.at("provenance");
    Provenance& p = c.provenance;
    p.name = jp.at("name").get<std::string>();
    p.stage = jp.at("stage").get<int>();
    p.reward = jp.at("reward").get<std::string>();
    p.partner = jp.at("partner").get<std::string>();
    p.seed = jp.at("seed").get<uint64_t>();
    p.init_hash = jp.at("init_hash").get<std::string>();
    p.partner_hash = jp.at("partner_hash").get<std::string>();
    p.config_hash = jp.at("config_hash").get<std::string>();
    if (!c.params.AllFinite()) throw DataError("checkpoint: non-finite parameter");
    if (j.at("hash").get<std::string>() != c.params.Hash()) {
      throw IntegrityError("checkpoint " + p.name + ": parameter hash mismatch");
    }
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: malformed document: ") + e.what());
  } catch (const ContractError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& c) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << CheckpointToJson(c).dump() << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read checkpoint " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("checkpoint " + path.string() + ": " + e.what());
  }
  return CheckpointFromJson(j);
}

}  // namespace bargain
