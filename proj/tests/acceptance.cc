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

// End-to-end acceptance checks. Prints one PASS or FAIL line per criterion
// and exits non-zero if any selected criterion fails. Criterion 1 needs the
// published corpus (BARGAIN_CORPUS_DIR); without it the binary reports the
// failure and exits 77 so the test driver can mark it as skipped.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

// Eigen-based headers must precede httplib.h.
#include "bargain/arena_http.h"

#include "CLI11.hpp"
#include "oracles.h"
#include "test_util.h"
#include "bargain/errors.h"
#include "bargain/pipeline.h"
#include "bargain/reward.h"
#include "bargain/serialize.h"
#include "bargain/surface.h"

namespace bargain {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(double x, int digits = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << x;
  return s.str();
}

// ---------------------------------------------------------------------------
// 1. Corpus statistics on the published corpus.

Verdict CorpusFidelity() {
  const char* dir = std::getenv("BARGAIN_CORPUS_DIR");
  if (dir == nullptr || *dir == '\0') {
    RunConfig synthetic = ParseRunConfig(json::object());
    CorpusSplits c = LoadCorpus(synthetic);
    std::vector<CorpusRecord> all = c.All();
    CorpusStats s = ComputeCorpusStats(all);
    return {false,
            "published corpus not available (set BARGAIN_CORPUS_DIR to the directory "
            "holding train.txt, val.txt, test.txt); the built-in synthetic stand-in gives "
            "dialogues=" + std::to_string(s.dialogue_count) +
                " agreement=" + Fmt(s.agreement_rate) + " turns=" + Fmt(s.avg_turns) +
                " words/turn=" + Fmt(s.avg_words_per_turn) +
                ", which is calibration, not evidence"};
  }
  const auto start = Clock::now();
  RunConfig cfg = ParseRunConfig({{"corpus_dir", dir}});
  CorpusSplits c = LoadCorpus(cfg);
  std::vector<CorpusRecord> all = c.All();
  CorpusStats s = ComputeCorpusStats(all);
  const double secs = Seconds(start);
  const bool ok = s.dialogue_count == 5808 && std::abs(s.agreement_rate - 0.80) <= 0.03 &&
                  std::abs(s.avg_turns - 6.6) <= 0.3 &&
                  std::abs(s.avg_words_per_turn - 7.6) <= 0.3 && secs < 60.0;
  return {ok, "dialogues=" + std::to_string(s.dialogue_count) +
                  " agreement=" + Fmt(s.agreement_rate) + " turns=" + Fmt(s.avg_turns) +
                  " words/turn=" + Fmt(s.avg_words_per_turn) +
                  " parse_errors=" + std::to_string(c.errors.size()) +
                  " runtime=" + Fmt(secs, 1) + "s"};
}

// ---------------------------------------------------------------------------
// 2. Utility presets against their closed forms.

Verdict UtilitySuite() {
  struct Row {
    const char* name;
    std::function<double(double, double)> f;
  };
  const Row rows[] = {
      {"selfish", [](double xi, double) { return xi; }},
      {"disadvantage_averse", [](double xi, double xj) { return xi - std::max(0.0, xj - xi); }},
      {"envious", [](double xi, double xj) { return xi + std::max(0.0, xi - xj); }},
      {"fair",
       [](double xi, double xj) {
         return xi - 0.75 * std::max(0.0, xj - xi) - 0.75 * std::max(0.0, xi - xj);
       }},
  };
  int mismatches = 0, cells = 0;
  for (const Row& r : rows) {
    const RewardConfig cfg = Preset(r.name);
    for (int xi = 0; xi <= 10; ++xi) {
      for (int xj = 0; xj <= 10; ++xj, ++cells) {
        mismatches += FehrSchmidtUtility(xi, xj, cfg) != r.f(xi, xj);
      }
    }
  }
  Rng rng(2024);
  int equality_failures = 0;
  for (int i = 0; i < 10000; ++i) {
    RewardConfig cfg{rng.Uniform() * 6 - 3, rng.Uniform() * 6 - 3, ""};
    const double x = rng.Uniform() * 10;
    equality_failures += FehrSchmidtUtility(x, x, cfg) != x;
  }
  return {mismatches == 0 && equality_failures == 0,
          std::to_string(cells) + " grid cells, " + std::to_string(mismatches) +
              " mismatches; U(x,x)=x failures " + std::to_string(equality_failures) +
              "/10000"};
}

// ---------------------------------------------------------------------------
// 3. Backpropagated gradients against central differences.

std::vector<TrainingExample> ToyExamples() {
  SyntheticCorpusOptions opt;
  opt.dialogues = 8;
  opt.unique_scenarios = 8;
  opt.seed = 4;
  opt.train_fraction = 1.0;
  opt.valid_fraction = 0.0;
  std::string text;
  for (const std::string& l : GenerateSyntheticCorpus(opt).train) text += l + "\n";
  std::istringstream in(text);
  std::vector<TrainingExample> ex = ExamplesFromRecords(ParseDataset(in).records);
  if (ex.size() > 4) ex.resize(4);
  return ex;
}

Verdict GradientCorrectness() {
  const auto start = Clock::now();
  const std::vector<TrainingExample> data = ToyExamples();
  double worst_sup = 0.0, worst_rl = 0.0;
  int params = 0;
  for (uint64_t seed : {1, 2, 3}) {
    PolicyParameters p = PolicyParameters::Initialize(testing::TinyArchitecture(seed));
    params = p.size();
    Eigen::VectorXd g = LossGradient(p, data);
    Eigen::VectorXd fd = testing::CentralDifference(
        [&](const PolicyParameters& q) { return MeanLoss(q, data); }, p);
    worst_sup = std::max(worst_sup, testing::MaxRelativeError(g, fd));

    auto partner = std::make_shared<const PolicyParameters>(
        PolicyParameters::Initialize(testing::TinyArchitecture(seed + 10)));
    PolicyAgent partner_agent("P", partner);
    TrainerConfig cfg;
    std::vector<Episode> batch;
    for (uint64_t k = 0; k < 6; ++k) {
      batch.push_back(Rollout(p, partner_agent, SampleScenario(k, PoolStats::Default()),
                              k % 2 ? Role::kA : Role::kB, Preset("selfish"), cfg, k));
      batch.back().reward = 1.0 + k;
    }
    Eigen::VectorXd rg = ReinforceGradient(p, batch, 2.0, cfg.discount);
    Eigen::VectorXd rfd = testing::CentralDifference(
        [&](const PolicyParameters& q) {
          double total = 0.0;
          for (const Episode& e : batch) {
            auto w = ReturnWeightedDecisions(e, 2.0, cfg.discount);
            total += WeightedLogLikelihood(q, e.scenario, e.learner_role, e.acts, w, nullptr);
          }
          return total;
        },
        p);
    worst_rl = std::max(worst_rl, testing::MaxRelativeError(rg, rfd));
  }
  return {params <= 200 && worst_sup <= 1e-4 && worst_rl <= 1e-3,
          std::to_string(params) + " parameters; supervised max rel err " +
              Fmt(worst_sup * 1e6, 3) + "e-6 (<= 1e-4), REINFORCE max rel err " +
              Fmt(worst_rl * 1e6, 3) + "e-6 (<= 1e-3); " + Fmt(Seconds(start), 1) + "s"};
}

// ---------------------------------------------------------------------------
// 4. Expected REINFORCE update against the enumerated exact gradient.

Verdict ReinforceOracle() {
  testing::ToyEnvironment env;
  double worst = 0.0;
  int branches = 0;
  for (uint64_t seed : {1, 2, 3, 4}) {
    PolicyParameters p = PolicyParameters::Initialize(testing::TinyArchitecture(seed));
    for (const char* reward : {"selfish", "fair"}) {
      for (double baseline : {0.0, 1.5}) {
        branches = static_cast<int>(env.Enumerate(p, Preset(reward)).size());
        Eigen::VectorXd expected = env.ExpectedUpdate(p, Preset(reward), 0.95, baseline);
        Eigen::VectorXd exact = testing::CentralDifference(
            [&](const PolicyParameters& q) {
              return env.Objective(q, Preset(reward), 0.95, baseline);
            },
            p);
        worst = std::max(worst, testing::MaxRelativeError(expected, exact));
      }
    }
  }
  return {worst <= 1e-3, std::to_string(branches) +
                             " enumerated trajectories per policy; max rel err " +
                             Fmt(worst * 1e6, 3) + "e-6 (<= 1e-3)"};
}

// ---------------------------------------------------------------------------
// 5 to 8 share one trained matrix.

struct Trained {
  RunConfig cfg;
  std::map<std::string, std::shared_ptr<const Agent>> agents;
  std::vector<std::string> order;
  std::set<std::string> train_keys;
  PoolStats pool;
  double train_seconds = 0.0;
};

Trained TrainMatrix(const fs::path& work_dir, bool reuse) {
  Trained t;
  json j = {{"work_dir", work_dir.string()}};
  if (const char* dir = std::getenv("BARGAIN_CORPUS_DIR"); dir && *dir) j["corpus_dir"] = dir;
  t.cfg = ParseRunConfig(j);
  const auto start = Clock::now();
  std::ostringstream log;
  bool have = false;
  if (reuse && fs::exists(ManifestPath(t.cfg))) {
    Manifest m = ReadManifest(ManifestPath(t.cfg));
    have = m.complete && m.config_hash == t.cfg.hash;
  }
  if (!have) {
    RunTrainSupervised(t.cfg, log);
    RunTrainMatrix(t.cfg, log);
  }
  t.train_seconds = Seconds(start);
  for (auto& a : LoadMatrixAgents(ManifestPath(t.cfg), t.cfg.tournament.decoding)) {
    t.order.push_back(a->name());
    t.agents[a->name()] = a;
  }
  CorpusSplits corpus = LoadCorpus(t.cfg);
  std::vector<Scenario> train = UniqueScenarios(corpus.train);
  for (const Scenario& s : train) t.train_keys.insert(ScenarioKey(s));
  t.pool = PoolStatsFromScenarios(train);
  return t;
}

std::vector<Scenario> Evaluation(const Trained& t, int n, const char* tag) {
  return HeldOutScenarios(n, DeriveSeed(t.cfg.seed, {HashString(tag)}), t.pool, t.train_keys);
}

double MeanRowPoints(const PairResult& r) {
  return *Summarize(r.episodes, true).agent_points.mean;
}

Verdict SelfPlayImprovement(const Trained& t) {
  const auto start = Clock::now();
  std::vector<Scenario> scenarios = Evaluation(t, 1000, "criterion-improvement");
  const Agent& s = *t.agents.at("S");
  const Agent& m = *t.agents.at(MatrixAgentName("selfish", "S"));
  PairResult base = RunPair(s, s, scenarios, t.cfg.tournament);
  PairResult trained = RunPair(m, s, scenarios, t.cfg.tournament);
  const double b = MeanRowPoints(base), x = MeanRowPoints(trained);
  std::vector<double> xs, bs;
  for (const auto& e : trained.episodes) xs.push_back(e.row_points());
  for (const auto& e : base.episodes) bs.push_back(e.row_points());
  auto [lo, hi] = BootstrapMeanDifferenceCi(xs, bs, 5);
  return {x - b >= 0.5,
          "M-selfish-S vs S " + Fmt(x) + " points, S vs S " + Fmt(b) + ", gain " +
              Fmt(x - b) + " (>= 0.5; 95% CI " + Fmt(lo) + ".." + Fmt(hi) + ") over " +
              std::to_string(trained.episodes.size()) +
              " episodes on 1000 held-out scenarios; training " + Fmt(t.train_seconds, 0) +
              "s, evaluation " + Fmt(Seconds(start), 0) + "s"};
}

int NonAgreements(const PairResult& r) {
  return static_cast<int>(std::count_if(r.episodes.begin(), r.episodes.end(),
                                        [](const EpisodeRecord& e) { return e.walkaway(); }));
}

Verdict Pathology(const Trained& t) {
  std::vector<Scenario> scenarios = Evaluation(t, 388, "criterion-pathology");
  TournamentConfig cfg = t.cfg.tournament;
  cfg.swap_roles = false;
  const Agent& m = *t.agents.at(MatrixAgentName("selfish", "S"));
  const Agent& s = *t.agents.at("S");
  PairResult self = RunPair(m, m, scenarios, cfg);
  PairResult vs_s = RunPair(m, s, scenarios, cfg);
  const int k_self = NonAgreements(self), k_s = NonAgreements(vs_s);
  const int n = static_cast<int>(scenarios.size());
  ProportionTest test = CompareProportions(k_self, n, k_s, n, 6);
  const double r_self = static_cast<double>(k_self) / n, r_s = static_cast<double>(k_s) / n;
  const bool ratio_ok = k_s == 0 ? k_self > 0 : r_self >= 3.0 * r_s;
  const bool ci_ok = test.ci_low > 0.0 || test.ci_high < 0.0;
  int cutoffs = 0;
  for (const auto& e : self.episodes) cutoffs += e.outcome.kind == OutcomeKind::kCutoff;
  return {ratio_ok && ci_ok,
          "non-agreement vs itself " + Fmt(100 * r_self, 1) + "% (" +
              std::to_string(cutoffs) + " cutoffs), vs S " + Fmt(100 * r_s, 1) +
              "%, ratio " + (k_s == 0 ? std::string("inf") : Fmt(r_self / r_s, 2)) +
              " (>= 3); difference 95% CI " + Fmt(test.ci_low) + ".." + Fmt(test.ci_high) +
              " over " + std::to_string(n) + " shared scenarios"};
}

Verdict WiseSelfishness(const Trained& t) {
  // 194 scenarios in both role orders: 388 episodes per cell.
  std::vector<Scenario> scenarios = Evaluation(t, 194, "criterion-wise");
  const std::vector<std::string> pool = {"S", MatrixAgentName("fair", "S"),
                                         MatrixAgentName("selfish", "S")};
  auto play = [&](const std::string& row) {
    std::vector<EpisodeRecord> all;
    for (const std::string& col : pool) {
      PairResult r = RunPair(*t.agents.at(row), *t.agents.at(col), scenarios, t.cfg.tournament);
      all.insert(all.end(), r.episodes.begin(), r.episodes.end());
    }
    return all;
  };
  const std::string wise = MatrixAgentName("selfish", "selfish");
  const std::string base = MatrixAgentName("selfish", "S");
  std::vector<EpisodeRecord> w = play(wise), b = play(base);
  EpisodeSummary sw = Summarize(w, true), sb = Summarize(b, true);
  ProportionTest test = CompareProportions(sw.walkaways, sw.episodes, sb.walkaways,
                                           sb.episodes, 7);
  const bool a = sw.walkaway_fraction < sb.walkaway_fraction && test.p_value < 0.05;
  const bool joint = *sw.joint_points.mean > *sb.joint_points.mean;
  return {a && joint,
          "walkaway " + wise + " " + Fmt(100 * sw.walkaway_fraction, 2) + "% vs " + base + " " +
              Fmt(100 * sb.walkaway_fraction, 2) + "% (chi2 " + Fmt(test.statistic, 2) +
              ", p " + Fmt(test.p_value, 6) + "); joint points " +
              Fmt(*sw.joint_points.mean, 2) + " vs " + Fmt(*sb.joint_points.mean, 2) +
              "; 388 episodes per cell against {S, M-fair-S, M-selfish-S}"};
}

std::string Report(std::span<const PairResult> pairs, const std::vector<std::string>& names,
                   const RunConfig& cfg) {
  std::ostringstream out;
  WriteMetricsJsonl(out, BuildMetricsTable(pairs), cfg.hash, cfg.seed);
  WriteMetricsCsv(out, BuildMetricsTable(pairs));
  for (HeatmapMetric m : {HeatmapMetric::kOwnPoints, HeatmapMetric::kJointPoints,
                          HeatmapMetric::kWalkawayPercent}) {
    Heatmap h = BuildHeatmap(pairs, names, m);
    WriteHeatmapJsonl(out, h, cfg.hash, cfg.seed);
    WriteHeatmapCsv(out, h);
    WriteHeatmapSvg(out, h);
  }
  return out.str();
}

Verdict TournamentIntegrity(const Trained& t) {
  std::vector<std::shared_ptr<const Agent>> six;
  std::vector<std::string> names;
  for (const std::string& n : t.order) {
    if (n == "S") continue;
    six.push_back(t.agents.at(n));
    names.push_back(n);
  }
  std::vector<Scenario> scenarios = Evaluation(t, t.cfg.tournament.scenarios, "eval");
  auto run = [&] {
    std::vector<PairResult> pairs = RunGrid(six, scenarios, t.cfg.tournament);
    std::ostringstream episodes;
    WriteEpisodes(episodes, pairs, t.cfg.hash, t.cfg.seed);
    return std::pair{episodes.str(), Report(pairs, names, t.cfg)};
  };
  auto [episodes1, report1] = run();
  auto [episodes2, report2] = run();
  const bool identical = episodes1 == episodes2 && report1 == report2;

  std::istringstream in(episodes1);
  std::vector<PairResult> persisted = ReadEpisodes(in);
  const bool recomputed = Report(persisted, names, t.cfg) == report1;

  int checked = 0, violations = 0;
  for (const MetricsRow& row : BuildMetricsTable(persisted)) {
    if (row.including.walkaways == 0 || !row.excluding.agent_points.mean) continue;
    ++checked;
    violations += *row.excluding.agent_points.mean < *row.including.agent_points.mean;
    violations += *row.excluding.partner_points.mean < *row.including.partner_points.mean;
    violations += *row.excluding.joint_points.mean < *row.including.joint_points.mean;
  }
  return {six.size() == 6 && persisted.size() == 36 && identical && recomputed &&
              violations == 0,
          "6x6 grid, " + std::to_string(persisted.size()) + " cells x " +
              std::to_string(persisted.empty() ? 0 : persisted[0].episodes.size()) +
              " episodes; rerun byte-identical: " + (identical ? "yes" : "no") +
              "; metrics from persisted episodes identical: " + (recomputed ? "yes" : "no") +
              "; excl >= incl violations " + std::to_string(violations) + " over " +
              std::to_string(checked) + " rows with walkaways"};
}

// ---------------------------------------------------------------------------
// 9. Surface round trip.

Verdict SurfaceRoundTrip() {
  int acts = 0, failures = 0;
  Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    const Scenario s = SampleScenario(rng.Next(), PoolStats::Default());
    for (Role r : {Role::kA, Role::kB}) {
      std::vector<DialogueAct> all = {DialogueAct::Accept(r), DialogueAct::Select(r),
                                      DialogueAct::Walkaway(r)};
      for (const Division& d : AllDivisions(s.counts)) {
        all.push_back(DialogueAct::Propose(r, d.take));
      }
      for (const DialogueAct& a : all) {
        ++acts;
        OfferParse p = ParseUtterance(RealizeAct(a, s), s, r);
        failures += !(p.status == ParseStatus::kParsed && p.act && *p.act == a);
      }
    }
  }
  return {failures == 0, std::to_string(acts) + " acts over 100 scenarios, " +
                             std::to_string(failures) + " round-trip failures"};
}

// ---------------------------------------------------------------------------
// 10. Arena service contract with a scripted client.

int CountAgentValueLeaks(const json& j) {
  int leaks = 0;
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (key == "scenario" || (key.find("values") != std::string::npos && key != "human_values")) {
        ++leaks;
      }
      leaks += CountAgentValueLeaks(value);
    }
  } else if (j.is_array()) {
    for (const json& v : j) leaks += CountAgentValueLeaks(v);
  }
  return leaks;
}

Verdict ArenaContract(const std::map<std::string, std::shared_ptr<const PolicyParameters>>& agents,
                      const std::string& note) {
  ArenaService service(agents, std::make_unique<SessionStore>(":memory:"), ArenaConfig{});
  int payloads = 0, leaks = 0, inconsistent = 0, deals = 0, cutoffs = 0, bad_cutoffs = 0;
  auto look = [&](const json& j) {
    ++payloads;
    leaks += CountAgentValueLeaks(j);
    return j;
  };
  for (uint64_t seed = 0; seed < 60; ++seed) {
    const bool stall = seed % 3 == 0;  // always counter-propose: runs into the cutoff
    json v = look(service.CreateSession("random", seed));
    const std::string id = v.at("session_id");
    while (v.at("status") == "active") {
      TurnInput in;
      const json& msgs = v.at("messages");
      const std::string last =
          msgs.empty() || msgs.back().at("from") != "agent" ? "" : msgs.back().at("act").at("kind");
      if (!stall && last == "PROPOSE") {
        in.kind = ActKind::kAccept;
      } else if (!stall && last == "ACCEPT") {
        in.kind = ActKind::kSelect;
      } else {
        in.kind = ActKind::kPropose;
        in.take = IssueVectorFromJson(v.at("counts"));
        if (!stall) in.take = IssueVector{0, 0, 0};
      }
      v = look(service.PostHumanTurn(id, in).view);
    }
    if (v.at("status") == "awaiting_deal_entry") {
      IssueVector take{0, 0, 0};
      for (auto it = v.at("messages").rbegin(); it != v.at("messages").rend(); ++it) {
        if (it->at("act").at("kind") != "PROPOSE") continue;
        IssueVector t = IssueVectorFromJson(it->at("act").at("take"));
        take = it->at("from") == "human"
                   ? t
                   : Complement(Division{t}, IssueVectorFromJson(v.at("counts"))).take;
        break;
      }
      v = look(service.SubmitDeal(id, take));
      ++deals;
    }
    look(service.SubmitSurvey(id, {3, 3, ""}));
    look(service.GetSession(id));
    for (const json& e : service.Events(id, 0, 0)) look(e);

    json t = service.ExportTranscripts().back();
    Scenario s = ScenarioFromJson(t.at("scenario"));
    DialogueState state = DialogueState::Start(s, Role::kA);
    for (const json& a : t.at("acts")) state = ApplyAct(state, ActFromJson(a));
    auto div = [](const json& j) -> std::optional<Division> {
      if (j.is_null()) return std::nullopt;
      return Division{IssueVectorFromJson(j)};
    };
    const Role human = RoleFromName(t.at("human_role"));
    auto hd = div(t.at("human_deal")), ad = div(t.at("agent_deal"));
    Outcome replay =
        ResolveOutcome(state, human == Role::kA ? hd : ad, human == Role::kA ? ad : hd);
    inconsistent += !(OutcomeFromJson(t.at("outcome")) == replay) ||
                    v.at("outcome").at("human_points") != replay.points(human) ||
                    v.at("outcome").at("agent_points") != replay.points(Other(human));
    if (replay.kind == OutcomeKind::kCutoff) {
      ++cutoffs;
      bad_cutoffs += state.utterance_count != 20 || replay.points_a != 0 || replay.points_b != 0;
    }
  }
  return {leaks == 0 && inconsistent == 0 && bad_cutoffs == 0 && cutoffs > 0 && deals > 0,
          "60 sessions (" + std::to_string(deals) + " deal entries, " +
              std::to_string(cutoffs) + " cutoffs at 20 with 0/0: " +
              (bad_cutoffs == 0 ? "yes" : "no") + "); replay mismatches " +
              std::to_string(inconsistent) + "; agent-value fields in " +
              std::to_string(payloads) + " payloads: " + std::to_string(leaks) + note};
}

void Print(int id, const char* title, const Verdict& v) {
  std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << title
            << "): " << v.detail << std::endl;
}

}  // namespace
}  // namespace bargain

int main(int argc, char** argv) {
  using namespace bargain;
  CLI::App app{"Acceptance checks"};
  std::vector<int> only, skip;
  std::string work_dir = (fs::temp_directory_path() / "bargain_acceptance").string();
  bool reuse = false;
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--skip", skip, "Skip these criteria");
  app.add_option("--work-dir", work_dir, "Directory for the trained matrix");
  app.add_flag("--reuse", reuse, "Reuse a complete matrix with the same config hash");
  CLI11_PARSE(app, argc, argv);

  auto selected = [&](int id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) return false;
    return std::find(skip.begin(), skip.end(), id) == skip.end();
  };
  bool all_pass = true;
  bool corpus_missing = false;
  auto run = [&](int id, const char* title, const std::function<Verdict()>& f) {
    if (!selected(id)) return;
    Verdict v;
    try {
      v = f();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    Print(id, title, v);
    all_pass = all_pass && v.pass;
  };

  run(1, "corpus fidelity", [&] {
    const char* dir = std::getenv("BARGAIN_CORPUS_DIR");
    corpus_missing = dir == nullptr || *dir == '\0';
    return CorpusFidelity();
  });
  run(2, "utility suite", UtilitySuite);
  run(3, "gradient correctness", GradientCorrectness);
  run(4, "REINFORCE oracle", ReinforceOracle);

  const bool need_matrix = selected(5) || selected(6) || selected(7) || selected(8) ||
                           selected(10);
  std::optional<Trained> trained;
  std::string matrix_error;
  if (need_matrix) {
    try {
      trained = TrainMatrix(work_dir, reuse);
    } catch (const std::exception& e) {
      matrix_error = std::string("training failed: ") + e.what();
    }
  }
  auto with_matrix = [&](std::function<Verdict(const Trained&)> f) {
    return [&, f] {
      if (!trained) return Verdict{false, matrix_error};
      return f(*trained);
    };
  };
  run(5, "self-play improvement", with_matrix(SelfPlayImprovement));
  run(6, "pathology reproduction", with_matrix(Pathology));
  run(7, "wise-selfishness trend", with_matrix(WiseSelfishness));
  run(8, "tournament integrity", with_matrix(TournamentIntegrity));
  run(9, "surface round trip", SurfaceRoundTrip);
  run(10, "arena contract", [&] {
    std::map<std::string, std::shared_ptr<const PolicyParameters>> agents;
    std::string note;
    if (trained) {
      Manifest m = ReadManifest(ManifestPath(trained->cfg));
      for (const AgentSpec& spec : m.agents) {
        if (spec.stage == 1) continue;
        agents[spec.name] = std::make_shared<const PolicyParameters>(
            LoadAgent(ManifestPath(trained->cfg).parent_path(), spec).params);
      }
    } else {
      note = " (untrained agents)";
      for (int i = 0; i < 3; ++i) {
        agents["agent" + std::to_string(i)] = std::make_shared<const PolicyParameters>(
            PolicyParameters::Initialize(testing::SmallArchitecture(i)));
      }
    }
    return ArenaContract(agents, note);
  });

  if (corpus_missing && only.size() == 1 && only[0] == 1) return 77;
  return all_pass ? 0 : 1;
}
