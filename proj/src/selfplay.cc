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

#include "bargain/selfplay.h"

#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <memory>

#include "json.hpp"
#include "bargain/errors.h"

namespace bargain {

using nlohmann::json;

void TrainerConfig::Validate() const {
  std::vector<std::string> problems;
  if (!(learning_rate > 0)) problems.push_back("learning_rate must be > 0");
  if (!(discount > 0 && discount <= 1)) problems.push_back("discount must be in (0, 1]");
  if (episodes < 0) problems.push_back("episodes must be >= 0");
  if (batch_size < 1) problems.push_back("batch_size must be >= 1");
  if (cutoff < 2) problems.push_back("cutoff must be >= 2");
  if (!(clip_norm > 0)) problems.push_back("clip_norm must be > 0");
  if (baseline_window < 1) problems.push_back("baseline_window must be >= 1");
  if (supervised_every < 0) problems.push_back("supervised_every must be >= 0");
  if (log_every < 1) problems.push_back("log_every must be >= 1");
  if (problems.empty()) return;
  std::string msg = "invalid trainer config:";
  for (const auto& p : problems) msg += " " + p + ";";
  throw ConfigError(msg);
}

Episode Rollout(const PolicyParameters& learner, const Agent& partner,
                const Scenario& scenario, Role learner_role, const RewardConfig& reward,
                const TrainerConfig& cfg, uint64_t seed) {
  PolicyNegotiator me(learner, scenario, learner_role, DeriveSeed(seed, {0}),
                      DecodingConfig{1.0, false, false});
  auto other = partner.Begin(scenario, Other(learner_role), DeriveSeed(seed, {1}));
  Negotiator& a = learner_role == Role::kA ? static_cast<Negotiator&>(me) : *other;
  Negotiator& b = learner_role == Role::kA ? *other : static_cast<Negotiator&>(me);
  PlayedDialogue played = PlayDialogue(scenario, a, b, cfg.cutoff);
  Episode e;
  e.scenario = scenario;
  e.learner_role = learner_role;
  e.acts = played.state.history;
  e.decisions = me.decisions();
  e.log_probs = me.log_probs();
  e.outcome = played.outcome;
  e.reward = RewardForOutcome(e.outcome, learner_role, reward);
  return e;
}

void RewardBaseline::Add(double r) {
  values_.push_back(r);
  sum_ += r;
  if (static_cast<int>(values_.size()) > window_) {
    sum_ -= values_.front();
    values_.pop_front();
  }
}

std::vector<Decision> ReturnWeightedDecisions(const Episode& e, double baseline,
                                              double discount) {
  const int T = e.steps();
  const double advantage = e.reward - baseline;
  std::vector<Decision> out = e.decisions;
  for (Decision& d : out) {
    const int t = d.type == Decision::Type::kAct ? d.step + 1 : T;
    d.weight = std::pow(discount, T - t) * advantage;
  }
  return out;
}

Eigen::VectorXd ReinforceGradient(const PolicyParameters& params,
                                  std::span<const Episode> episodes, double baseline,
                                  double discount) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(params.size());
  for (const Episode& e : episodes) {
    std::vector<Decision> weighted = ReturnWeightedDecisions(e, baseline, discount);
    WeightedLogLikelihood(params, e.scenario, e.learner_role, e.acts, weighted, &g);
  }
  return g;
}

UpdateDiagnostics ReinforceUpdate(PolicyParameters& params,
                                  std::span<const Episode> episodes, double baseline,
                                  const TrainerConfig& cfg) {
  if (episodes.empty()) throw DomainError("ReinforceUpdate: empty batch");
  Eigen::VectorXd g = ReinforceGradient(params, episodes, baseline, cfg.discount) /
                      static_cast<double>(episodes.size());
  UpdateDiagnostics d;
  d.gradient_norm = g.norm();
  if (!std::isfinite(d.gradient_norm)) {
    throw TrainingError("REINFORCE: non-finite gradient");
  }
  if (d.gradient_norm > cfg.clip_norm) {
    g *= cfg.clip_norm / d.gradient_norm;
    d.clipped = true;
  }
  params.mutable_values() += cfg.learning_rate * g;
  return d;
}

StageResult TrainStage(const Checkpoint& init, const Checkpoint& partner,
                       const RewardConfig& reward, const TrainerConfig& cfg,
                       const Provenance& provenance,
                       std::span<const TrainingExample> supervised) {
  cfg.Validate();
  const std::string partner_hash = partner.params.Hash();
  auto frozen = std::make_shared<const PolicyParameters>(partner.params);
  PolicyAgent partner_agent(partner.provenance.name, frozen,
                            DecodingConfig{1.0, false, true});
  StageResult result{init, {}};
  PolicyParameters& params = result.checkpoint.params;
  result.checkpoint.provenance = provenance;
  result.checkpoint.provenance.init_hash = init.params.Hash();
  result.checkpoint.provenance.partner_hash = partner_hash;
  result.checkpoint.provenance.config_hash = cfg.config_hash;

  RewardBaseline baseline(cfg.baseline_window);
  Rng rng(DeriveSeed(cfg.seed, {0x5eed}));
  std::vector<Episode> batch;
  CurvePoint window;
  int in_window = 0;
  for (int i = 0; i < cfg.episodes; ++i) {
    const uint64_t episode_seed = DeriveSeed(cfg.seed, {static_cast<uint64_t>(i)});
    Scenario s = cfg.scenarios.empty()
                     ? SampleScenario(DeriveSeed(episode_seed, {2}), cfg.pool)
                     : cfg.scenarios[rng.Below(static_cast<int>(cfg.scenarios.size()))];
    const Role role = i % 2 == 0 ? Role::kA : Role::kB;
    batch.push_back(Rollout(params, partner_agent, s, role, reward, cfg, episode_seed));
    const Episode& e = batch.back();
    window.mean_reward += e.reward;
    window.mean_points += e.outcome.points(role);
    window.agreement_rate += e.outcome.agreed();
    window.cutoff_rate += e.outcome.kind == OutcomeKind::kCutoff;
    ++in_window;

    if (static_cast<int>(batch.size()) == cfg.batch_size) {
      ReinforceUpdate(params, batch, baseline.value(), cfg);
      for (const Episode& b : batch) baseline.Add(b.reward);
      batch.clear();
    }
    if (cfg.supervised_every > 0 && !supervised.empty() &&
        (i + 1) % cfg.supervised_every == 0) {
      std::vector<TrainingExample> mb;
      for (int k = 0; k < cfg.supervised_batch; ++k) {
        mb.push_back(supervised[rng.Below(static_cast<int>(supervised.size()))]);
      }
      Eigen::VectorXd g = LossGradient(params, mb);
      const double n = g.norm();
      if (!std::isfinite(n)) throw TrainingError("supervised step: non-finite gradient");
      if (n > cfg.clip_norm) g *= cfg.clip_norm / n;
      params.mutable_values() -= cfg.supervised_learning_rate * g;
    }
    if (in_window == cfg.log_every || i + 1 == cfg.episodes) {
      window.episode = i + 1;
      window.mean_reward /= in_window;
      window.mean_points /= in_window;
      window.agreement_rate /= in_window;
      window.cutoff_rate /= in_window;
      result.curve.push_back(window);
      window = CurvePoint();
      in_window = 0;
    }
  }
  if (!batch.empty()) ReinforceUpdate(params, batch, baseline.value(), cfg);
  if (!params.AllFinite()) throw TrainingError("REINFORCE produced non-finite parameters");
  if (frozen->Hash() != partner_hash || partner.params.Hash() != partner_hash) {
    throw IntegrityError("partner parameters changed during training");
  }
  return result;
}

std::string MatrixAgentName(const std::string& reward, const std::string& partner) {
  return "M-" + reward + "-" + partner;
}

namespace {

json SpecToJson(const AgentSpec& a) {
  return {{"name", a.name},     {"stage", a.stage}, {"reward", a.reward},
          {"partner", a.partner}, {"seed", a.seed},   {"hash", a.hash},
          {"partner_hash", a.partner_hash}, {"path", a.path}};
}

AgentSpec SpecFromJson(const json& j) {
  AgentSpec a;
  a.name = j.at("name").get<std::string>();
  a.stage = j.at("stage").get<int>();
  a.reward = j.at("reward").get<std::string>();
  a.partner = j.at("partner").get<std::string>();
  a.seed = j.at("seed").get<uint64_t>();
  a.hash = j.at("hash").get<std::string>();
  a.partner_hash = j.at("partner_hash").get<std::string>();
  a.path = j.at("path").get<std::string>();
  return a;
}

void WriteCurve(const std::filesystem::path& path, const std::string& agent,
                const TrainerConfig& cfg, uint64_t seed,
                const std::vector<CurvePoint>& curve) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const CurvePoint& c : curve) {
    out << json{{"schema", "bargain.curve/1"},
                {"agent", agent},
                {"config_hash", cfg.config_hash},
                {"seed", seed},
                {"episode", c.episode},
                {"mean_reward", c.mean_reward},
                {"mean_points", c.mean_points},
                {"agreement_rate", c.agreement_rate},
                {"cutoff_rate", c.cutoff_rate}}
               .dump()
        << "\n";
  }
}

}  // namespace

void WriteManifest(const std::filesystem::path& path, const Manifest& m) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  json agents = json::array();
  for (const AgentSpec& a : m.agents) agents.push_back(SpecToJson(a));
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << json{{"schema", kManifestSchema},
              {"config_hash", m.config_hash},
              {"seed", m.seed},
              {"complete", m.complete},
              {"agents", agents}}
             .dump(2)
      << "\n";
}

Manifest ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path.string());
  try {
    json j = json::parse(in);
    if (j.at("schema").get<std::string>() != kManifestSchema) {
      throw DataError("manifest: unsupported schema");
    }
    Manifest m;
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seed = j.at("seed").get<uint64_t>();
    m.complete = j.at("complete").get<bool>();
    for (const json& a : j.at("agents")) m.agents.push_back(SpecFromJson(a));
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest: ") + e.what());
  }
}

Checkpoint LoadAgent(const std::filesystem::path& manifest_dir, const AgentSpec& spec) {
  Checkpoint c = LoadCheckpoint(manifest_dir / spec.path);
  if (c.params.Hash() != spec.hash) {
    throw IntegrityError("agent " + spec.name + ": checkpoint hash " + c.params.Hash() +
                         " does not match manifest " + spec.hash);
  }
  return c;
}

Manifest BuildMatrix(const Checkpoint& supervised, const TrainerConfig& cfg,
                     const std::filesystem::path& out_dir,
                     const std::vector<std::string>& rewards,
                     std::span<const TrainingExample> supervised_examples) {
  cfg.Validate();
  Manifest m;
  m.config_hash = cfg.config_hash;
  m.seed = cfg.seed;
  const auto manifest_path = out_dir / "manifest.json";

  auto save = [&](const Checkpoint& c, int stage, const std::string& reward,
                  const std::string& partner, uint64_t seed) {
    AgentSpec spec{c.provenance.name, stage, reward, partner, seed, c.params.Hash(),
                   c.provenance.partner_hash, "agents/" + c.provenance.name + ".json"};
    SaveCheckpoint(out_dir / spec.path, c);
    m.agents.push_back(spec);
  };
  save(supervised, 1, "", "", supervised.provenance.seed);

  struct Job {
    std::string name, reward, partner;
    int stage;
    uint64_t seed;
  };
  auto run = [&](const std::vector<Job>& jobs,
                 const std::map<std::string, Checkpoint>& partners) {
    std::vector<std::future<StageResult>> futures;
    for (const Job& job : jobs) {
      futures.push_back(std::async(std::launch::async, [&, job] {
        TrainerConfig c = cfg;
        c.seed = job.seed;
        Provenance p;
        p.name = job.name;
        p.stage = job.stage;
        p.reward = job.reward;
        p.partner = job.partner;
        p.seed = job.seed;
        return TrainStage(supervised, partners.at(job.partner), Preset(job.reward), c, p,
                          supervised_examples);
      }));
    }
    // Collect every future before rethrowing so no job outlives this scope.
    std::vector<StageResult> results;
    std::exception_ptr failure;
    for (auto& f : futures) {
      try {
        results.push_back(f.get());
      } catch (...) {
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) {
      WriteManifest(manifest_path, m);
      std::rethrow_exception(failure);
    }
    std::map<std::string, Checkpoint> out;
    for (size_t i = 0; i < jobs.size(); ++i) {
      const Job& job = jobs[i];
      save(results[i].checkpoint, job.stage, job.reward, job.partner, job.seed);
      WriteCurve(out_dir / "curves" / (job.name + ".jsonl"), job.name, cfg, job.seed,
                 results[i].curve);
      out.emplace(job.reward, results[i].checkpoint);
    }
    return out;
  };

  auto seed_for = [&](const std::string& name) {
    return DeriveSeed(cfg.seed, {HashString(name)});
  };
  std::vector<Job> stage2;
  for (const std::string& r : rewards) {
    const std::string name = MatrixAgentName(r, "S");
    stage2.push_back({name, r, "S", 2, seed_for(name)});
  }
  std::map<std::string, Checkpoint> stage2_partners =
      run(stage2, {{"S", supervised}});

  std::vector<Job> stage3;
  for (const std::string& r : rewards) {
    for (const std::string& p : rewards) {
      const std::string name = MatrixAgentName(r, p);
      stage3.push_back({name, r, p, 3, seed_for(name)});
    }
  }
  run(stage3, stage2_partners);
  m.complete = true;
  WriteManifest(manifest_path, m);
  return m;
}

}  // namespace bargain
