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

#ifndef BARGAIN_SUPERVISED_H_
#define BARGAIN_SUPERVISED_H_

#include <cstdint>
#include <span>
#include <vector>

#include "bargain/corpus.h"
#include "bargain/policy.h"

namespace bargain {

// One side's view of a dialogue plus the decisions that side made.
struct TrainingExample {
  Scenario scenario;
  Role self = Role::kA;
  std::vector<DialogueAct> history;
  std::vector<Decision> decisions;
};

// Converts fully extractable records into examples from the author's side.
// Records that cannot be mapped to acts are skipped and counted.
std::vector<TrainingExample> ExamplesFromRecords(std::span<const CorpusRecord> records,
                                                 int* skipped = nullptr);

struct SupervisedConfig {
  int epochs = 30;
  int batch_size = 16;
  double learning_rate = 1.0;
  double clip_norm = 0.5;
  // Learning rate is divided by this after an epoch without validation
  // improvement.
  double anneal_factor = 5.0;
  uint64_t seed = 1;
};

struct EpochLog {
  int epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  double valid_loss = 0.0;
  bool annealed = false;
};

struct SupervisedResult {
  PolicyParameters params;
  double initial_train_loss = 0.0;
  std::vector<EpochLog> curve;
};

// Mean over examples of the negative log-likelihood of all decisions.
double MeanLoss(const PolicyParameters& params, std::span<const TrainingExample> data);

// Gradient of MeanLoss (descent direction is its negative).
Eigen::VectorXd LossGradient(const PolicyParameters& params,
                             std::span<const TrainingExample> data);

// Minibatch gradient descent with norm clipping and plateau annealing. The
// validation set may be empty, in which case the training loss drives
// annealing. Throws DomainError on an empty training set and TrainingError
// when the loss becomes non-finite.
SupervisedResult SupervisedTrain(const PolicyParameters& init,
                                 std::span<const TrainingExample> train,
                                 std::span<const TrainingExample> valid,
                                 const SupervisedConfig& cfg);

struct Accuracy {
  int correct = 0;
  int total = 0;
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

// Most likely act (type and per-issue quantities) equals the recorded act.
Accuracy NextActAccuracy(const PolicyParameters& params,
                         std::span<const TrainingExample> data);
// Output-deal argmax equals the recorded division, over examples that have
// an output decision.
Accuracy OutputDealAccuracy(const PolicyParameters& params,
                            std::span<const TrainingExample> data);

}  // namespace bargain

#endif  // BARGAIN_SUPERVISED_H_
