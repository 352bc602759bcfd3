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

#include "bargain/supervised.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <string>

#include "bargain/errors.h"
#include "bargain/random.h"

namespace bargain {

std::vector<TrainingExample> ExamplesFromRecords(std::span<const CorpusRecord> records,
                                                 int* skipped) {
  std::vector<TrainingExample> out;
  int skip = 0;
  for (const CorpusRecord& r : records) {
    ActExtraction ex = ExtractActs(r);
    if (!ex.complete) {
      ++skip;
      continue;
    }
    TrainingExample e;
    e.scenario = r.scenario;
    e.self = Role::kA;
    for (const auto& a : ex.acts) e.history.push_back(*a);
    for (int t = 0; t < static_cast<int>(e.history.size()); ++t) {
      if (e.history[t].speaker == e.self) {
        e.decisions.push_back({Decision::Type::kAct, t, {}, 1.0});
      }
    }
    if (r.Agreed()) {
      e.decisions.push_back({Decision::Type::kOutput,
                             static_cast<int>(e.history.size()), *r.output_a, 1.0});
    }
    if (!e.decisions.empty()) out.push_back(std::move(e));
  }
  if (skipped) *skipped = skip;
  return out;
}

double MeanLoss(const PolicyParameters& params, std::span<const TrainingExample> data) {
  if (data.empty()) throw DomainError("MeanLoss: empty data");
  double total = 0.0;
  for (const TrainingExample& e : data) {
    total -= WeightedLogLikelihood(params, e.scenario, e.self, e.history, e.decisions,
                                   nullptr);
  }
  return total / data.size();
}

Eigen::VectorXd LossGradient(const PolicyParameters& params,
                             std::span<const TrainingExample> data) {
  if (data.empty()) throw DomainError("LossGradient: empty data");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(params.size());
  for (const TrainingExample& e : data) {
    WeightedLogLikelihood(params, e.scenario, e.self, e.history, e.decisions, &g);
  }
  return -g / static_cast<double>(data.size());
}

SupervisedResult SupervisedTrain(const PolicyParameters& init,
                                 std::span<const TrainingExample> train,
                                 std::span<const TrainingExample> valid,
                                 const SupervisedConfig& cfg) {
  if (train.empty()) throw DomainError("SupervisedTrain: empty training set");
  if (cfg.epochs < 0 || cfg.batch_size < 1 || !(cfg.learning_rate > 0) ||
      !(cfg.clip_norm > 0) || !(cfg.anneal_factor >= 1)) {
    throw ContractError("SupervisedTrain: invalid hyperparameters");
  }
  SupervisedResult result{init, MeanLoss(init, train), {}};
  PolicyParameters& params = result.params;
  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(cfg.seed);
  double lr = cfg.learning_rate;
  double best = std::numeric_limits<double>::infinity();
  std::vector<TrainingExample> batch;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i) {
      std::swap(order[i], order[rng.Below(i + 1)]);
    }
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end = std::min(order.size(), start + cfg.batch_size);
      Eigen::VectorXd g = Eigen::VectorXd::Zero(params.size());
      for (size_t i = start; i < end; ++i) {
        const TrainingExample& e = train[order[i]];
        WeightedLogLikelihood(params, e.scenario, e.self, e.history, e.decisions, &g);
      }
      g /= static_cast<double>(end - start);
      const double norm = g.norm();
      if (!std::isfinite(norm)) {
        throw TrainingError("supervised training diverged at epoch " +
                            std::to_string(epoch) + ": non-finite gradient");
      }
      if (norm > cfg.clip_norm) g *= cfg.clip_norm / norm;
      params.mutable_values() += lr * g;  // g is the log-likelihood gradient
    }
    EpochLog log;
    log.epoch = epoch;
    log.learning_rate = lr;
    log.train_loss = MeanLoss(params, train);
    log.valid_loss = valid.empty() ? log.train_loss : MeanLoss(params, valid);
    if (!std::isfinite(log.train_loss) || !params.AllFinite()) {
      throw TrainingError("supervised training diverged at epoch " +
                          std::to_string(epoch) + ": loss " +
                          std::to_string(log.train_loss));
    }
    if (log.valid_loss < best) {
      best = log.valid_loss;
    } else {
      lr /= cfg.anneal_factor;
      log.annealed = true;
    }
    result.curve.push_back(log);
  }
  return result;
}

Accuracy NextActAccuracy(const PolicyParameters& params,
                         std::span<const TrainingExample> data) {
  Accuracy acc;
  Rng unused(0);
  for (const TrainingExample& e : data) {
    for (const Decision& d : e.decisions) {
      if (d.type != Decision::Type::kAct) continue;
      auto prefix = std::span<const DialogueAct>(e.history).first(d.step);
      StateEncoding s = EncodeState(params, e.scenario, e.self, prefix);
      SampledAct a = SampleAct(params, s, e.self, unused, 1.0, /*greedy=*/true);
      acc.correct += a.act == e.history[d.step];
      ++acc.total;
    }
  }
  return acc;
}

Accuracy OutputDealAccuracy(const PolicyParameters& params,
                            std::span<const TrainingExample> data) {
  Accuracy acc;
  for (const TrainingExample& e : data) {
    for (const Decision& d : e.decisions) {
      if (d.type != Decision::Type::kOutput) continue;
      StateEncoding s = EncodeState(params, e.scenario, e.self, e.history);
      acc.correct += PredictOutputDeal(params, s).argmax == d.output;
      ++acc.total;
    }
  }
  return acc;
}

}  // namespace bargain
