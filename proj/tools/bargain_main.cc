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

// Command-line entry point for the negotiation pipeline.

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "bargain/arena_http.h"
#include "bargain/errors.h"
#include "bargain/pipeline.h"
#include "bargain/synthetic_corpus.h"

namespace {

using bargain::RunConfig;
using nlohmann::json;

enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kConfig = 2,
  kData = 3,
  kTraining = 4,
  kIntegrity = 5,
};

int ExitCodeFor(const std::exception& e) {
  using namespace bargain;
  if (dynamic_cast<const ConfigError*>(&e)) return kConfig;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const IoError*>(&e) ||
      dynamic_cast<const DomainError*>(&e)) {
    return kData;
  }
  if (dynamic_cast<const TrainingError*>(&e)) return kTraining;
  if (dynamic_cast<const IntegrityError*>(&e) ||
      dynamic_cast<const IncompleteGridError*>(&e)) {
    return kIntegrity;
  }
  return kFailure;
}

struct CommonFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::string out;
  std::string corpus;
};

RunConfig Resolve(const CommonFlags& f) {
  json j = json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw bargain::ConfigError("cannot read config " + f.config);
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw bargain::ConfigError("config " + f.config + ": " + e.what());
    }
    if (!j.is_object()) throw bargain::ConfigError("config must be a JSON object");
  }
  if (f.seed) j["seed"] = *f.seed;
  if (!f.out.empty()) j["work_dir"] = f.out;
  if (!f.corpus.empty()) j["corpus_dir"] = f.corpus;
  return bargain::ParseRunConfig(j);
}

void AddCommon(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON run config");
  cmd->add_option("--seed", f.seed, "Base seed (overrides config)");
  cmd->add_option("--out", f.out, "Work directory for artifacts (overrides config)");
  cmd->add_option("--corpus", f.corpus,
                  "Directory with train.txt, val.txt and test.txt (default: synthetic)");
}

httplib::Server* g_server = nullptr;

void Serve(const RunConfig& cfg, const std::string& manifest_override) {
  std::filesystem::path manifest =
      manifest_override.empty() ? bargain::ManifestPath(cfg) : std::filesystem::path(manifest_override);
  bargain::Manifest m = bargain::ReadManifest(manifest);
  std::map<std::string, std::shared_ptr<const bargain::PolicyParameters>> agents;
  for (const bargain::AgentSpec& spec : m.agents) {
    if (spec.stage == 1) continue;  // serve the trained personalities only
    bargain::Checkpoint c = bargain::LoadAgent(manifest.parent_path(), spec);
    agents[spec.name] = std::make_shared<const bargain::PolicyParameters>(c.params);
  }
  std::filesystem::create_directories(cfg.serve_data_dir);
  bargain::ArenaConfig ac;
  ac.temperature = cfg.serve_temperature;
  ac.cutoff = cfg.trainer.cutoff;
  ac.seed = bargain::DeriveSeed(cfg.seed, {bargain::HashString("arena")});
  ac.show_agent_deal = cfg.serve_show_agent_deal;
  ac.admin_token = cfg.serve_admin_token;
  bargain::ArenaService service(
      std::move(agents),
      std::make_unique<bargain::SessionStore>((cfg.serve_data_dir / "arena.db").string()),
      ac);
  if (ac.admin_token.empty()) {
    std::cout << "serve.admin_token is empty: /admin/transcripts is disabled" << std::endl;
  }
  httplib::Server server;
  bargain::RegisterArenaRoutes(server, service);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::cout << "serving " << service.AgentNames().size() << " agents on http://"
            << cfg.serve_bind << ":" << cfg.serve_port << std::endl;
  if (!server.listen(cfg.serve_bind, cfg.serve_port)) {
    throw bargain::ConfigError("cannot bind " + cfg.serve_bind + ":" +
                               std::to_string(cfg.serve_port));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-issue bargaining agents: corpus, training, tournament, arena"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto* config = app.add_subcommand("config", "Print the resolved config and its hash");
  auto* ingest = app.add_subcommand("ingest", "Parse the corpus and report coverage");
  auto* stats = app.add_subcommand("stats", "Print corpus statistics");
  auto* train_sup = app.add_subcommand("train-sup", "Train the supervised model S");
  auto* train_matrix =
      app.add_subcommand("train-matrix", "Train the stage-2 and stage-3 agents from S");
  auto* tournament = app.add_subcommand("tournament", "Play the round-robin grid");
  auto* report = app.add_subcommand("report", "Render metrics and heatmaps from episodes");
  auto* serve = app.add_subcommand("serve", "Run the human-vs-agent arena service");
  auto* synth = app.add_subcommand("synth-corpus",
                                   "Write the synthetic corpus files into --out");
  for (CLI::App* c : {config, ingest, stats, train_sup, train_matrix, tournament, report, serve,
                      synth}) {
    AddCommon(c, flags);
  }
  std::string bind, manifest, data_dir;
  int port = 0;
  serve->add_option("--bind", bind, "Bind address");
  serve->add_option("--port", port, "TCP port");
  serve->add_option("--manifest", manifest, "Agent manifest (default: work dir matrix)");
  serve->add_option("--data-dir", data_dir, "Directory for the session database");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    RunConfig cfg = Resolve(flags);
    if (*config) std::cout << cfg.resolved.dump(2) << "\n# config_hash " << cfg.hash << "\n";
    if (*ingest) bargain::RunIngest(cfg, std::cout);
    if (*stats) bargain::RunStats(cfg, std::cout);
    if (*train_sup) bargain::RunTrainSupervised(cfg, std::cout);
    if (*train_matrix) bargain::RunTrainMatrix(cfg, std::cout);
    if (*tournament) bargain::RunTournament(cfg, std::cout);
    if (*report) bargain::RunReport(cfg, std::cout);
    if (*synth) {
      bargain::SyntheticCorpus c = bargain::GenerateSyntheticCorpus(cfg.synthetic);
      std::filesystem::create_directories(cfg.work_dir);
      for (auto [name, lines] : {std::pair{"train.txt", &c.train},
                                 std::pair{"val.txt", &c.valid},
                                 std::pair{"test.txt", &c.test}}) {
        std::ofstream out(cfg.work_dir / name);
        if (!out) throw bargain::IoError("cannot write " + (cfg.work_dir / name).string());
        for (const auto& l : *lines) out << l << "\n";
      }
      std::cout << "synthetic corpus written to " << cfg.work_dir.string() << "\n";
    }
    if (*serve) {
      if (!bind.empty()) cfg.serve_bind = bind;
      if (port != 0) cfg.serve_port = port;
      if (!data_dir.empty()) cfg.serve_data_dir = data_dir;
      Serve(cfg, manifest);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  }
  return kOk;
}
