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

#include "bargain/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "bargain/errors.h"

namespace bargain {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json Defaults() {
  RunConfig d;
  const SupervisedConfig& s = d.supervised;
  const TrainerConfig& t = d.trainer;
  const TournamentConfig& m = d.tournament;
  return {
      {"seed", d.seed},
      {"work_dir", d.work_dir.string()},
      {"corpus_dir", ""},
      {"synthetic",
       {{"dialogues", d.synthetic.dialogues},
        {"unique_scenarios", d.synthetic.unique_scenarios},
        {"seed", d.synthetic.seed}}},
      {"model",
       {{"goal_dim", d.architecture.goal_dim},
        {"hidden_dim", d.architecture.hidden_dim},
        {"trunk_dim", d.architecture.trunk_dim},
        {"init_range", d.architecture.init_range}}},
      {"supervised",
       {{"epochs", s.epochs},
        {"batch_size", s.batch_size},
        {"learning_rate", s.learning_rate},
        {"clip_norm", s.clip_norm},
        {"anneal_factor", s.anneal_factor}}},
      {"trainer",
       {{"learning_rate", t.learning_rate},
        {"discount", t.discount},
        {"episodes", t.episodes},
        {"batch_size", t.batch_size},
        {"cutoff", t.cutoff},
        {"clip_norm", t.clip_norm},
        {"baseline_window", t.baseline_window},
        {"supervised_every", t.supervised_every},
        {"supervised_batch", t.supervised_batch},
        {"supervised_learning_rate", t.supervised_learning_rate},
        {"log_every", t.log_every}}},
      {"matrix", {{"rewards", d.rewards}}},
      {"tournament",
       {{"scenarios", m.scenarios},
        {"swap_roles", m.swap_roles},
        {"temperature", m.decoding.temperature},
        {"greedy", m.decoding.greedy_acts},
        {"threads", m.threads}}},
      {"serve",
       {{"bind", d.serve_bind},
        {"port", d.serve_port},
        {"data_dir", ""},
        {"temperature", d.serve_temperature},
        {"show_agent_deal", d.serve_show_agent_deal},
        {"admin_token", ""}}},
  };
}

bool SameKind(const json& want, const json& got) {
  if (want.is_number_float()) return got.is_number();
  if (want.is_number_integer()) return got.is_number_integer();
  return want.type() == got.type();
}

// Reports unknown keys and type mismatches against the defaults.
void CheckShape(const json& defaults, const json& given, const std::string& prefix,
                std::vector<std::string>& problems) {
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string key = prefix + it.key();
    if (!defaults.contains(it.key())) {
      problems.push_back("unknown key '" + key + "'");
      continue;
    }
    const json& want = defaults.at(it.key());
    if (!SameKind(want, it.value())) {
      problems.push_back("'" + key + "' must be a " + std::string(want.type_name()));
    } else if (want.is_object()) {
      CheckShape(want, it.value(), key + ".", problems);
    }
  }
}

std::string Fnv(const std::string& s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(HashString(s)));
  return buf;
}

std::ofstream OpenOut(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

std::vector<CorpusRecord> ParseLines(const std::vector<std::string>& lines,
                                     std::vector<ParseErrorEntry>& errors) {
  std::string all;
  for (const auto& l : lines) all += l + "\n";
  std::istringstream in(all);
  DatasetParse p = ParseDataset(in);
  errors.insert(errors.end(), p.errors.begin(), p.errors.end());
  return std::move(p.records);
}

}  // namespace

RunConfig ParseRunConfig(const json& given) {
  if (!given.is_object()) throw ConfigError("config must be a JSON object");
  std::vector<std::string> problems;
  const json defaults = Defaults();
  CheckShape(defaults, given, "", problems);
  if (!problems.empty()) {
    std::string msg = "invalid config:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ConfigError(msg);
  }
  json j = defaults;
  j.merge_patch(given);

  RunConfig c;
  c.seed = j["seed"].get<uint64_t>();
  c.work_dir = j["work_dir"].get<std::string>();
  c.corpus_dir = j["corpus_dir"].get<std::string>();
  c.synthetic.dialogues = j["synthetic"]["dialogues"].get<int>();
  c.synthetic.unique_scenarios = j["synthetic"]["unique_scenarios"].get<int>();
  c.synthetic.seed = j["synthetic"]["seed"].get<uint64_t>();

  const json& jm = j["model"];
  c.architecture.goal_dim = jm["goal_dim"].get<int>();
  c.architecture.hidden_dim = jm["hidden_dim"].get<int>();
  c.architecture.trunk_dim = jm["trunk_dim"].get<int>();
  c.architecture.init_range = jm["init_range"].get<double>();
  c.architecture.seed = DeriveSeed(c.seed, {HashString("model")});

  const json& js = j["supervised"];
  c.supervised.epochs = js["epochs"].get<int>();
  c.supervised.batch_size = js["batch_size"].get<int>();
  c.supervised.learning_rate = js["learning_rate"].get<double>();
  c.supervised.clip_norm = js["clip_norm"].get<double>();
  c.supervised.anneal_factor = js["anneal_factor"].get<double>();
  c.supervised.seed = DeriveSeed(c.seed, {HashString("supervised")});

  const json& jt = j["trainer"];
  TrainerConfig& t = c.trainer;
  t.learning_rate = jt["learning_rate"].get<double>();
  t.discount = jt["discount"].get<double>();
  t.episodes = jt["episodes"].get<int>();
  t.batch_size = jt["batch_size"].get<int>();
  t.cutoff = jt["cutoff"].get<int>();
  t.clip_norm = jt["clip_norm"].get<double>();
  t.baseline_window = jt["baseline_window"].get<int>();
  t.supervised_every = jt["supervised_every"].get<int>();
  t.supervised_batch = jt["supervised_batch"].get<int>();
  t.supervised_learning_rate = jt["supervised_learning_rate"].get<double>();
  t.log_every = jt["log_every"].get<int>();
  t.seed = DeriveSeed(c.seed, {HashString("trainer")});

  c.rewards = j["matrix"]["rewards"].get<std::vector<std::string>>();

  const json& jo = j["tournament"];
  TournamentConfig& m = c.tournament;
  m.scenarios = jo["scenarios"].get<int>();
  m.swap_roles = jo["swap_roles"].get<bool>();
  m.decoding.temperature = jo["temperature"].get<double>();
  m.decoding.greedy_acts = jo["greedy"].get<bool>();
  m.decoding.greedy_output = true;
  m.threads = jo["threads"].get<int>();
  m.cutoff = t.cutoff;
  m.seed = DeriveSeed(c.seed, {HashString("tournament")});

  const json& jv = j["serve"];
  c.serve_bind = jv["bind"].get<std::string>();
  c.serve_port = jv["port"].get<int>();
  c.serve_data_dir = jv["data_dir"].get<std::string>();
  if (c.serve_data_dir.empty()) c.serve_data_dir = c.work_dir / "arena";
  c.serve_temperature = jv["temperature"].get<double>();
  c.serve_show_agent_deal = jv["show_agent_deal"].get<bool>();
  c.serve_admin_token = jv["admin_token"].get<std::string>();

  // Value checks, all collected before reporting.
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) problems.push_back(msg);
  };
  require(c.architecture.goal_dim > 0 && c.architecture.hidden_dim > 0 &&
              c.architecture.trunk_dim > 0,
          "model dimensions must be positive");
  require(c.architecture.init_range > 0, "model.init_range must be > 0");
  require(c.supervised.epochs >= 0, "supervised.epochs must be >= 0");
  require(c.supervised.batch_size >= 1, "supervised.batch_size must be >= 1");
  require(c.supervised.learning_rate > 0, "supervised.learning_rate must be > 0");
  require(c.supervised.clip_norm > 0, "supervised.clip_norm must be > 0");
  require(c.supervised.anneal_factor >= 1, "supervised.anneal_factor must be >= 1");
  try {
    t.Validate();
  } catch (const ConfigError& e) {
    problems.push_back(e.what());
  }
  require(!c.rewards.empty(), "matrix.rewards must not be empty");
  for (const std::string& r : c.rewards) {
    try {
      Preset(r);
    } catch (const LookupError&) {
      problems.push_back("matrix.rewards: unknown reward '" + r + "'");
    }
  }
  require(std::set<std::string>(c.rewards.begin(), c.rewards.end()).size() ==
              c.rewards.size(),
          "matrix.rewards must not repeat");
  require(m.scenarios >= 1, "tournament.scenarios must be >= 1");
  require(m.decoding.temperature > 0, "tournament.temperature must be > 0");
  require(m.threads >= 0, "tournament.threads must be >= 0");
  require(c.synthetic.dialogues >= 1, "synthetic.dialogues must be >= 1");
  require(c.synthetic.unique_scenarios >= 1 &&
              c.synthetic.unique_scenarios <= c.synthetic.dialogues,
          "synthetic.unique_scenarios must be in [1, dialogues]");
  require(c.serve_port > 0 && c.serve_port < 65536, "serve.port must be a TCP port");
  require(c.serve_temperature > 0, "serve.temperature must be > 0");
  if (!c.corpus_dir.empty()) {
    for (const char* f : {"train.txt", "val.txt", "test.txt"}) {
      require(fs::is_regular_file(c.corpus_dir / f),
              "corpus_dir: missing " + (c.corpus_dir / f).string());
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid config:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ConfigError(msg);
  }

  // Output locations and serving options do not affect artifact content.
  json hashed = j;
  hashed.erase("work_dir");
  hashed.erase("serve");
  c.hash = Fnv(hashed.dump());
  c.resolved = j;
  t.config_hash = c.hash;
  m.config_hash = c.hash;
  return c;
}

RunConfig LoadRunConfig(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  try {
    return ParseRunConfig(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
}

std::vector<CorpusRecord> CorpusSplits::All() const {
  std::vector<CorpusRecord> all = train;
  all.insert(all.end(), valid.begin(), valid.end());
  all.insert(all.end(), test.begin(), test.end());
  return all;
}

CorpusSplits LoadCorpus(const RunConfig& cfg) {
  CorpusSplits s;
  if (cfg.corpus_dir.empty()) {
    s.synthetic = true;
    SyntheticCorpus c = GenerateSyntheticCorpus(cfg.synthetic);
    s.train = ParseLines(c.train, s.errors);
    s.valid = ParseLines(c.valid, s.errors);
    s.test = ParseLines(c.test, s.errors);
    return s;
  }
  auto read = [&](const char* name) {
    DatasetParse p = ParseDatasetFile(cfg.corpus_dir / name);
    for (ParseErrorEntry e : p.errors) {
      e.message = std::string(name) + ": " + e.message;
      s.errors.push_back(e);
    }
    return std::move(p.records);
  };
  s.train = read("train.txt");
  s.valid = read("val.txt");
  s.test = read("test.txt");
  return s;
}

std::vector<Scenario> UniqueScenarios(std::span<const CorpusRecord> records) {
  std::vector<Scenario> out;
  std::set<std::string> seen;
  for (const CorpusRecord& r : records) {
    if (seen.insert(ScenarioKey(r.scenario)).second) out.push_back(r.scenario);
  }
  return out;
}

fs::path SupervisedCheckpointPath(const RunConfig& cfg) {
  return cfg.work_dir / "supervised" / "S.json";
}
fs::path ManifestPath(const RunConfig& cfg) {
  return cfg.work_dir / "matrix" / "manifest.json";
}
fs::path EpisodesPath(const RunConfig& cfg) {
  return cfg.work_dir / "tournament" / "episodes.jsonl";
}
fs::path ReportDir(const RunConfig& cfg) { return cfg.work_dir / "report"; }

void RunIngest(const RunConfig& cfg, std::ostream& log) {
  CorpusSplits s = LoadCorpus(cfg);
  if (s.synthetic) {
    SyntheticCorpus c = GenerateSyntheticCorpus(cfg.synthetic);
    for (auto [name, lines] : {std::pair{"train.txt", &c.train},
                               std::pair{"val.txt", &c.valid},
                               std::pair{"test.txt", &c.test}}) {
      std::ofstream out = OpenOut(cfg.work_dir / "corpus" / name);
      for (const auto& l : *lines) out << l << "\n";
    }
  }
  json splits = json::object();
  for (auto [name, recs] : {std::pair{"train", &s.train}, std::pair{"valid", &s.valid},
                            std::pair{"test", &s.test}}) {
    CoverageReport cov = ExtractionCoverage(*recs);
    splits[name] = {{"records", recs->size()},
                    {"complete_records", cov.complete_records},
                    {"turns", cov.turns},
                    {"mapped_turns", cov.mapped_turns},
                    {"turn_coverage", cov.turn_coverage()}};
  }
  std::ofstream summary = OpenOut(cfg.work_dir / "ingest" / "summary.json");
  summary << json{{"schema", "bargain.ingest/1"},
                  {"config_hash", cfg.hash},
                  {"seed", cfg.seed},
                  {"synthetic", s.synthetic},
                  {"parse_errors", s.errors.size()},
                  {"splits", splits}}
                 .dump(2)
          << "\n";
  std::ofstream errors = OpenOut(cfg.work_dir / "ingest" / "parse_errors.jsonl");
  for (const ParseErrorEntry& e : s.errors) {
    errors << json{{"line", e.line_number}, {"message", e.message}}.dump() << "\n";
  }
  log << "ingest: " << s.train.size() << "/" << s.valid.size() << "/" << s.test.size()
      << " records (train/valid/test), " << s.errors.size() << " parse errors"
      << (s.synthetic ? ", synthetic corpus" : "") << "\n";
}

CorpusStats RunStats(const RunConfig& cfg, std::ostream& log) {
  CorpusSplits s = LoadCorpus(cfg);
  std::vector<CorpusRecord> all = s.All();
  CorpusStats st = ComputeCorpusStats(all);
  std::ofstream out = OpenOut(cfg.work_dir / "stats.json");
  out << json{{"schema", "bargain.stats/1"},
              {"config_hash", cfg.hash},
              {"seed", cfg.seed},
              {"synthetic", s.synthetic},
              {"lines", st.line_count},
              {"dialogues", st.dialogue_count},
              {"unique_scenarios", st.unique_scenarios},
              {"agreement_rate", st.agreement_rate},
              {"avg_turns", st.avg_turns},
              {"avg_words_per_turn", st.avg_words_per_turn},
              {"parse_errors", s.errors.size()}}
             .dump(2)
      << "\n";
  log << std::fixed << std::setprecision(3) << "dialogues " << st.dialogue_count
      << "\nunique scenarios " << st.unique_scenarios << "\nagreement rate "
      << st.agreement_rate << "\navg turns " << st.avg_turns << "\navg words per turn "
      << st.avg_words_per_turn << "\n"
      << std::defaultfloat;
  return st;
}

Checkpoint RunTrainSupervised(const RunConfig& cfg, std::ostream& log) {
  CorpusSplits s = LoadCorpus(cfg);
  int skipped = 0;
  std::vector<TrainingExample> train = ExamplesFromRecords(s.train, &skipped);
  std::vector<TrainingExample> valid = ExamplesFromRecords(s.valid);
  std::vector<TrainingExample> test = ExamplesFromRecords(s.test);
  SupervisedResult r =
      SupervisedTrain(PolicyParameters::Initialize(cfg.architecture), train, valid,
                      cfg.supervised);
  Checkpoint c{r.params, {}};
  c.provenance.name = "S";
  c.provenance.stage = 1;
  c.provenance.seed = cfg.supervised.seed;
  c.provenance.config_hash = cfg.hash;
  SaveCheckpoint(SupervisedCheckpointPath(cfg), c);

  std::ofstream curve = OpenOut(cfg.work_dir / "supervised" / "loss_curve.jsonl");
  curve << json{{"schema", "bargain.loss/1"}, {"config_hash", cfg.hash},
                {"seed", cfg.seed}, {"epoch", 0}, {"train_loss", r.initial_train_loss}}
               .dump()
        << "\n";
  for (const EpochLog& e : r.curve) {
    curve << json{{"schema", "bargain.loss/1"},
                  {"config_hash", cfg.hash},
                  {"seed", cfg.seed},
                  {"epoch", e.epoch},
                  {"learning_rate", e.learning_rate},
                  {"train_loss", e.train_loss},
                  {"valid_loss", e.valid_loss},
                  {"annealed", e.annealed}}
                 .dump()
          << "\n";
  }
  Accuracy act = NextActAccuracy(r.params, test);
  Accuracy out = OutputDealAccuracy(r.params, test);
  std::ofstream acc = OpenOut(cfg.work_dir / "supervised" / "evaluation.json");
  acc << json{{"schema", "bargain.supervised_eval/1"},
              {"config_hash", cfg.hash},
              {"seed", cfg.seed},
              {"train_examples", train.size()},
              {"skipped_records", skipped},
              {"test_next_act_accuracy", act.rate()},
              {"test_output_deal_accuracy", out.rate()},
              {"test_output_deal_records", out.total},
              {"hash", c.params.Hash()}}
             .dump(2)
      << "\n";
  log << "S trained on " << train.size() << " examples (" << skipped
      << " records skipped); final loss "
      << (r.curve.empty() ? r.initial_train_loss : r.curve.back().train_loss)
      << "; held-out output-deal accuracy " << out.rate() << "; hash " << c.params.Hash()
      << "\n";
  return c;
}

Manifest RunTrainMatrix(const RunConfig& cfg, std::ostream& log) {
  Checkpoint s = LoadCheckpoint(SupervisedCheckpointPath(cfg));
  CorpusSplits corpus = LoadCorpus(cfg);
  TrainerConfig t = cfg.trainer;
  t.scenarios = UniqueScenarios(corpus.train);
  t.pool = PoolStatsFromScenarios(t.scenarios);
  std::vector<TrainingExample> examples;
  if (t.supervised_every > 0) examples = ExamplesFromRecords(corpus.train);
  Manifest m = BuildMatrix(s, t, ManifestPath(cfg).parent_path(), cfg.rewards, examples);
  for (const AgentSpec& a : m.agents) {
    log << a.name << " stage " << a.stage << " hash " << a.hash << "\n";
  }
  return m;
}

std::vector<std::shared_ptr<const Agent>> LoadMatrixAgents(const fs::path& manifest_path,
                                                           const DecodingConfig& decoding) {
  Manifest m = ReadManifest(manifest_path);
  if (!m.complete) throw DataError("manifest " + manifest_path.string() + " is incomplete");
  std::vector<std::shared_ptr<const Agent>> agents;
  for (const AgentSpec& spec : m.agents) {
    Checkpoint c = LoadAgent(manifest_path.parent_path(), spec);
    agents.push_back(std::make_shared<PolicyAgent>(
        spec.name, std::make_shared<const PolicyParameters>(std::move(c.params)),
        decoding));
  }
  return agents;
}

void RunTournament(const RunConfig& cfg, std::ostream& log) {
  auto agents = LoadMatrixAgents(ManifestPath(cfg), cfg.tournament.decoding);
  CorpusSplits corpus = LoadCorpus(cfg);
  std::vector<Scenario> train = UniqueScenarios(corpus.train);
  std::set<std::string> exclude;
  for (const Scenario& s : train) exclude.insert(ScenarioKey(s));
  std::vector<Scenario> scenarios =
      HeldOutScenarios(cfg.tournament.scenarios, DeriveSeed(cfg.seed, {HashString("eval")}),
                       PoolStatsFromScenarios(train), exclude);
  std::vector<PairResult> pairs = RunGrid(agents, scenarios, cfg.tournament);
  std::ofstream out = OpenOut(EpisodesPath(cfg));
  WriteEpisodes(out, pairs, cfg.hash, cfg.seed);
  size_t episodes = 0;
  for (const auto& p : pairs) episodes += p.episodes.size();
  log << "tournament: " << pairs.size() << " pairs, " << episodes << " episodes -> "
      << EpisodesPath(cfg).string() << "\n";
}

void RunReport(const RunConfig& cfg, std::ostream& log) {
  std::ifstream in(EpisodesPath(cfg));
  if (!in) throw IoError("cannot read " + EpisodesPath(cfg).string() + " (run tournament)");
  std::vector<PairResult> pairs = ReadEpisodes(in);
  if (pairs.empty()) throw DataError("no episodes to report");
  std::vector<std::string> agents;
  for (const PairResult& p : pairs) {
    if (std::find(agents.begin(), agents.end(), p.row) == agents.end()) {
      agents.push_back(p.row);
    }
  }
  const fs::path dir = ReportDir(cfg);
  std::vector<MetricsRow> rows = BuildMetricsTable(pairs);
  {
    std::ofstream j = OpenOut(dir / "metrics.jsonl");
    WriteMetricsJsonl(j, rows, cfg.hash, cfg.seed);
    std::ofstream c = OpenOut(dir / "metrics.csv");
    WriteMetricsCsv(c, rows);
  }
  // Against the training partners only: S and the stage-2 agents.
  std::set<std::string> pool = {"S"};
  for (const std::string& r : cfg.rewards) pool.insert(MatrixAgentName(r, "S"));
  std::vector<MetricsRow> pool_rows = BuildMetricsTable(pairs, pool);
  {
    std::ofstream j = OpenOut(dir / "metrics_vs_training_partners.jsonl");
    WriteMetricsJsonl(j, pool_rows, cfg.hash, cfg.seed);
    std::ofstream c = OpenOut(dir / "metrics_vs_training_partners.csv");
    WriteMetricsCsv(c, pool_rows);
  }
  for (HeatmapMetric metric : {HeatmapMetric::kOwnPoints, HeatmapMetric::kJointPoints,
                               HeatmapMetric::kWalkawayPercent}) {
    Heatmap h = BuildHeatmap(pairs, agents, metric);
    const std::string stem = std::string("heatmap_") + HeatmapMetricName(metric);
    std::ofstream j = OpenOut(dir / (stem + ".jsonl"));
    WriteHeatmapJsonl(j, h, cfg.hash, cfg.seed);
    std::ofstream c = OpenOut(dir / (stem + ".csv"));
    WriteHeatmapCsv(c, h);
    std::ofstream s = OpenOut(dir / (stem + ".svg"));
    WriteHeatmapSvg(s, h);
  }
  WriteMetricsCsv(log, rows);
  log << "report written to " << dir.string() << "\n";
}

}  // namespace bargain
