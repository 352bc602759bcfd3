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

#ifndef BARGAIN_PIPELINE_H_
#define BARGAIN_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "bargain/corpus.h"
#include "bargain/selfplay.h"
#include "bargain/supervised.h"
#include "bargain/synthetic_corpus.h"
#include "bargain/tournament.h"

namespace bargain {

// Resolved pipeline configuration. Every field has a default, so "{}" is a
// valid config file.
struct RunConfig {
  uint64_t seed = 7;
  std::filesystem::path work_dir = "runs/default";
  // Directory holding train.txt, val.txt and test.txt. Empty selects the
  // built-in synthetic corpus.
  std::filesystem::path corpus_dir;
  SyntheticCorpusOptions synthetic;
  Architecture architecture;
  SupervisedConfig supervised;
  TrainerConfig trainer;
  std::vector<std::string> rewards = {"fair", "selfish"};
  TournamentConfig tournament;

  std::string serve_bind = "127.0.0.1";
  int serve_port = 8080;
  std::filesystem::path serve_data_dir;  // default: <work_dir>/arena
  double serve_temperature = 0.5;
  bool serve_show_agent_deal = false;
  std::string serve_admin_token;

  // FNV-1a of the canonical resolved config.
  std::string hash;
  nlohmann::json resolved;
};

// Merges `j` over the defaults, applies the optional seed override and
// validates. Throws ConfigError listing every problem found.
RunConfig ParseRunConfig(const nlohmann::json& j);
RunConfig LoadRunConfig(const std::filesystem::path& path);

struct CorpusSplits {
  std::vector<CorpusRecord> train, valid, test;
  std::vector<ParseErrorEntry> errors;
  bool synthetic = false;
  std::vector<CorpusRecord> All() const;
};

// Reads the configured corpus, or generates the synthetic one.
CorpusSplits LoadCorpus(const RunConfig& cfg);

// Unique scenarios of a record set, in first-seen order.
std::vector<Scenario> UniqueScenarios(std::span<const CorpusRecord> records);

// Each command writes into cfg.work_dir and prints a short summary to `log`.
void RunIngest(const RunConfig& cfg, std::ostream& log);
CorpusStats RunStats(const RunConfig& cfg, std::ostream& log);
Checkpoint RunTrainSupervised(const RunConfig& cfg, std::ostream& log);
Manifest RunTrainMatrix(const RunConfig& cfg, std::ostream& log);
void RunTournament(const RunConfig& cfg, std::ostream& log);
void RunReport(const RunConfig& cfg, std::ostream& log);

// Paths of pipeline artifacts.
std::filesystem::path SupervisedCheckpointPath(const RunConfig& cfg);
std::filesystem::path ManifestPath(const RunConfig& cfg);
std::filesystem::path EpisodesPath(const RunConfig& cfg);
std::filesystem::path ReportDir(const RunConfig& cfg);

// Agents in matrix order (S first) loaded from a manifest with hash checks.
std::vector<std::shared_ptr<const Agent>> LoadMatrixAgents(
    const std::filesystem::path& manifest_path, const DecodingConfig& decoding);

}  // namespace bargain

#endif  // BARGAIN_PIPELINE_H_
