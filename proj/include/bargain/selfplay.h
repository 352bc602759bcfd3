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

#ifndef BARGAIN_SELFPLAY_H_
#define BARGAIN_SELFPLAY_H_

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "bargain/agents.h"
#include "bargain/checkpoint.h"
#include "bargain/reward.h"
#include "bargain/scenario.h"
#include "bargain/supervised.h"

namespace bargain {

struct TrainerConfig {
  double learning_rate = 0.1;
  double discount = 0.95;
  int episodes = 16000;
  int batch_size = 1;
  int cutoff = kDefaultCutoff;
  double clip_norm = 0.5;
  int baseline_window = 200;
  // Every this many episodes, one supervised minibatch step on corpus
  // examples. Zero disables.
  int supervised_every = 0;
  int supervised_batch = 16;
  double supervised_learning_rate = 0.1;
  int log_every = 500;
  uint64_t seed = 1;
  // Copied into every artifact the trainer writes.
  std::string config_hash;
  // Training scenarios. Empty means sample from `pool`.
  std::vector<Scenario> scenarios;
  PoolStats pool = PoolStats::Default();

  // Throws ConfigError listing every violated constraint.
  void Validate() const;
};

struct Episode {
  Scenario scenario;
  Role learner_role = Role::kA;
  std::vector<DialogueAct> acts;
  std::vector<Decision> decisions;  // learner's choices
  std::vector<double> log_probs;    // one per decision, at sampling time
  Outcome outcome;
  double reward = 0.0;
  int steps() const { return static_cast<int>(acts.size()); }
};

// Plays one dialogue between a sampling learner and `partner`. The learner
// samples both its acts and its output deal.
Episode Rollout(const PolicyParameters& learner, const Agent& partner,
                const Scenario& scenario, Role learner_role, const RewardConfig& reward,
                const TrainerConfig& cfg, uint64_t seed);

// Running mean of the most recent rewards.
class RewardBaseline {
 public:
  explicit RewardBaseline(int window) : window_(window) {}
  double value() const { return values_.empty() ? 0.0 : sum_ / values_.size(); }
  void Add(double r);

 private:
  int window_;
  std::deque<double> values_;
  double sum_ = 0.0;
};

// Sets each learner decision's weight to discount^(T - t) * (reward -
// baseline), where t is the 1-based index of the act and T the episode
// length. The output deal follows the final act and gets discount^0.
std::vector<Decision> ReturnWeightedDecisions(const Episode& e, double baseline,
                                              double discount);

// Sum over episodes of the return-weighted log-likelihood gradient.
Eigen::VectorXd ReinforceGradient(const PolicyParameters& params,
                                  std::span<const Episode> episodes, double baseline,
                                  double discount);

struct UpdateDiagnostics {
  double gradient_norm = 0.0;
  bool clipped = false;
};

// One ascent step on the REINFORCE objective. Throws DomainError on an empty
// batch and TrainingError on a non-finite gradient.
UpdateDiagnostics ReinforceUpdate(PolicyParameters& params,
                                  std::span<const Episode> episodes, double baseline,
                                  const TrainerConfig& cfg);

struct CurvePoint {
  int episode = 0;
  double mean_reward = 0.0;
  double mean_points = 0.0;
  double agreement_rate = 0.0;
  double cutoff_rate = 0.0;
};

struct StageResult {
  Checkpoint checkpoint;
  std::vector<CurvePoint> curve;
};

// REINFORCE against a frozen partner. Throws IntegrityError if the partner
// parameters change during the stage.
StageResult TrainStage(const Checkpoint& init, const Checkpoint& partner,
                       const RewardConfig& reward, const TrainerConfig& cfg,
                       const Provenance& provenance,
                       std::span<const TrainingExample> supervised = {});

struct AgentSpec {
  std::string name;
  int stage = 1;
  std::string reward;
  std::string partner;
  uint64_t seed = 0;
  std::string hash;
  std::string partner_hash;
  std::string path;  // relative to the manifest
};

inline constexpr const char* kManifestSchema = "bargain.manifest/1";

struct Manifest {
  std::string config_hash;
  uint64_t seed = 0;
  std::vector<AgentSpec> agents;  // S first, then stage 2, then stage 3
  bool complete = false;
};

std::string MatrixAgentName(const std::string& reward, const std::string& partner);

// Trains the stage-2 and stage-3 agents from S and writes checkpoints, curve
// logs and manifest.json into `out_dir`. A failing stage leaves a manifest
// with complete = false and rethrows.
Manifest BuildMatrix(const Checkpoint& supervised, const TrainerConfig& cfg,
                     const std::filesystem::path& out_dir,
                     const std::vector<std::string>& rewards = {"fair", "selfish"},
                     std::span<const TrainingExample> supervised_examples = {});

void WriteManifest(const std::filesystem::path& path, const Manifest& m);
Manifest ReadManifest(const std::filesystem::path& path);
// Loads an agent's checkpoint and verifies it against the manifest hash
// (IntegrityError on mismatch).
Checkpoint LoadAgent(const std::filesystem::path& manifest_dir, const AgentSpec& spec);

}  // namespace bargain

#endif  // BARGAIN_SELFPLAY_H_
