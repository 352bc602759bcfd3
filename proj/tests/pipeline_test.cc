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

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "test_util.h"
#include "bargain/errors.h"
#include "bargain/pipeline.h"

namespace bargain {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string ConfigErrorMessage(const json& j) {
  try {
    ParseRunConfig(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST_CASE("an empty config resolves to the documented defaults") {
  RunConfig c = ParseRunConfig(json::object());
  CHECK(c.seed == 7);
  CHECK(c.supervised.epochs == 30);
  CHECK(c.supervised.batch_size == 16);
  CHECK(c.supervised.learning_rate == 1.0);
  CHECK(c.supervised.clip_norm == 0.5);
  CHECK(c.supervised.anneal_factor == 5.0);
  CHECK(c.trainer.learning_rate == 0.1);
  CHECK(c.trainer.discount == 0.95);
  CHECK(c.trainer.episodes == 16000);
  CHECK(c.trainer.cutoff == 20);
  CHECK(c.tournament.scenarios == 388);
  CHECK(c.tournament.swap_roles);
  CHECK(c.rewards == std::vector<std::string>{"fair", "selfish"});
  CHECK(c.hash.size() == 16);
}

TEST_CASE("config problems are reported together") {
  const std::string msg = ConfigErrorMessage(
      {{"trainer", {{"discount", 1.5}, {"cutoff", "twenty"}}}, {"colour", "blue"},
       {"matrix", {{"rewards", {"selfish", "kind"}}}}});
  CHECK(msg.find("colour") != std::string::npos);
  CHECK(msg.find("trainer.cutoff") != std::string::npos);
  const std::string values = ConfigErrorMessage(
      {{"trainer", {{"discount", 1.5}}}, {"matrix", {{"rewards", {"selfish", "kind"}}}},
       {"tournament", {{"scenarios", 0}}}});
  CHECK(values.find("discount") != std::string::npos);
  CHECK(values.find("kind") != std::string::npos);
  CHECK(values.find("tournament.scenarios") != std::string::npos);
  CHECK(ConfigErrorMessage(json::array()).size() > 0);
  CHECK(ConfigErrorMessage({{"corpus_dir", "/nonexistent"}}).find("train.txt") !=
        std::string::npos);
}

TEST_CASE("config hash tracks content but not locations") {
  RunConfig a = ParseRunConfig({{"work_dir", "/tmp/a"}});
  RunConfig b = ParseRunConfig({{"work_dir", "/tmp/b"}, {"serve", {{"port", 9000}}}});
  RunConfig c = ParseRunConfig({{"seed", 8}});
  CHECK(a.hash == b.hash);
  CHECK(a.hash != c.hash);
  CHECK(a.trainer.seed != c.trainer.seed);
  CHECK(a.trainer.config_hash == a.hash);
}

#ifdef BARGAIN_CLI_PATH

int RunCli(const std::string& args) {
  const std::string cmd = std::string(BARGAIN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void WriteJson(const fs::path& p, const json& j) {
  std::ofstream out(p);
  out << j.dump(2);
}

TEST_CASE("command line exit codes and a miniature pipeline") {
  const fs::path dir = testing::ScratchDir("cli");
  const fs::path work = dir / "run";
  WriteJson(dir / "tiny.json",
            {{"synthetic", {{"dialogues", 150}, {"unique_scenarios", 100}}},
             {"model", {{"goal_dim", 4}, {"hidden_dim", 8}, {"trunk_dim", 8}}},
             {"supervised", {{"epochs", 2}}},
             {"trainer", {{"episodes", 20}, {"log_every", 10}}},
             {"tournament", {{"scenarios", 4}}}});
  WriteJson(dir / "bad.json", {{"trainer", {{"discount", -1}}}});
  const std::string common =
      "--config " + (dir / "tiny.json").string() + " --out " + work.string();

  CHECK(RunCli("--help") == 0);
  CHECK(RunCli("") == 2);
  CHECK(RunCli("config --seed 3") == 0);
  CHECK(RunCli("stats --config " + (dir / "bad.json").string()) == 2);
  CHECK(RunCli("stats --config " + (dir / "missing.json").string()) == 2);
  CHECK(RunCli("report " + common) == 3);
  CHECK(RunCli("train-matrix " + common) == 3);

  for (const char* step : {"ingest", "stats", "train-sup", "train-matrix", "tournament",
                           "report"}) {
    INFO(step);
    REQUIRE(RunCli(std::string(step) + " " + common) == 0);
  }
  CHECK(fs::exists(work / "stats.json"));
  CHECK(fs::exists(work / "ingest" / "summary.json"));
  CHECK(fs::exists(work / "supervised" / "S.json"));
  CHECK(fs::exists(work / "matrix" / "manifest.json"));
  CHECK(fs::exists(work / "tournament" / "episodes.jsonl"));
  for (const char* f : {"metrics.jsonl", "metrics.csv", "heatmap_own_points.svg",
                        "heatmap_joint_points.csv", "heatmap_walkaway_percent.jsonl"}) {
    CHECK(fs::exists(work / "report" / f));
  }

  // Every report line carries the config hash and seed.
  RunConfig cfg = LoadRunConfig(dir / "tiny.json");
  std::ifstream metrics(work / "report" / "metrics.jsonl");
  int rows = 0;
  for (std::string line; std::getline(metrics, line); ++rows) {
    json j = json::parse(line);
    CHECK(j.at("config_hash") == cfg.hash);
  }
  CHECK(rows == 7);

  // A checkpoint that no longer matches its manifest hash is an integrity
  // failure.
  const fs::path agent = work / "matrix" / "agents" / "M-fair-S.json";
  Checkpoint c = LoadCheckpoint(agent);
  c.params.mutable_values()[0] += 0.5;
  SaveCheckpoint(agent, c);
  CHECK(RunCli("tournament " + common) == 5);
}

#endif  // BARGAIN_CLI_PATH

}  // namespace
}  // namespace bargain
