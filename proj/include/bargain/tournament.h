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

#ifndef BARGAIN_TOURNAMENT_H_
#define BARGAIN_TOURNAMENT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "bargain/agents.h"

namespace bargain {

struct TournamentConfig {
  int scenarios = 388;
  // Play every scenario a second time with roles exchanged.
  bool swap_roles = true;
  uint64_t seed = 1;
  int cutoff = kDefaultCutoff;
  DecodingConfig decoding{1.0, false, true};
  PoolStats pool = PoolStats::Default();
  int threads = 0;  // 0 = hardware concurrency
  std::string config_hash;
};

// Scenarios drawn from `pool` whose keys are not in `exclude`, in a fixed
// order given the seed.
std::vector<Scenario> HeldOutScenarios(int n, uint64_t seed, const PoolStats& pool,
                                       const std::set<std::string>& exclude = {});

// One dialogue of a pair, seen from the row agent.
struct EpisodeRecord {
  std::string row;
  std::string col;
  int scenario_index = 0;
  Scenario scenario;
  Role row_role = Role::kA;
  std::vector<DialogueAct> acts;
  std::optional<Division> output_a;
  std::optional<Division> output_b;
  Outcome outcome;
  bool pareto_optimal = false;

  int row_points() const { return outcome.points(row_role); }
  int col_points() const { return outcome.points(Other(row_role)); }
  int joint_points() const { return outcome.points_a + outcome.points_b; }
  // Walkaway in the reporting sense: any episode without an agreement.
  bool walkaway() const { return !outcome.agreed(); }
};

struct PairResult {
  std::string row;
  std::string col;
  std::vector<EpisodeRecord> episodes;
};

// Plays every scenario (and its role swap when configured) between `row` and
// `col`. Deterministic given cfg.seed and the agent names.
PairResult RunPair(const Agent& row, const Agent& col, std::span<const Scenario> scenarios,
                   const TournamentConfig& cfg);

// Every ordered pair of agents, in row-major order. Cells run in parallel.
std::vector<PairResult> RunGrid(std::span<const std::shared_ptr<const Agent>> agents,
                                std::span<const Scenario> scenarios,
                                const TournamentConfig& cfg);

struct MeanSe {
  std::optional<double> mean;  // empty when there is nothing to average
  double standard_error = 0.0;
  int n = 0;
};

MeanSe MeanWithError(std::span<const double> xs);

struct EpisodeSummary {
  MeanSe agent_points;
  MeanSe partner_points;
  MeanSe joint_points;
  double walkaway_fraction = 0.0;
  double pareto_fraction = 0.0;  // among agreements
  int episodes = 0;
  int walkaways = 0;
};

// Averages from the row agent's side. Without walkaways, non-agreement
// episodes are dropped before averaging. Throws DomainError on empty input.
EpisodeSummary Summarize(std::span<const EpisodeRecord> episodes, bool include_walkaways);

struct MetricsRow {
  std::string agent;
  EpisodeSummary including;
  EpisodeSummary excluding;
};

// One row per row agent over all its episodes, optionally restricted to
// partners in `partners`. Rows keep the order in which agents first appear.
std::vector<MetricsRow> BuildMetricsTable(std::span<const PairResult> pairs,
                                          const std::set<std::string>& partners = {});

enum class HeatmapMetric { kOwnPoints, kJointPoints, kWalkawayPercent };
const char* HeatmapMetricName(HeatmapMetric m);

struct Heatmap {
  HeatmapMetric metric;
  std::vector<std::string> agents;
  // cells[i][j]: row agent i against column agent j.
  std::vector<std::vector<double>> cells;
};

// Throws IncompleteGridError naming every missing (row, col) pair.
Heatmap BuildHeatmap(std::span<const PairResult> pairs,
                     const std::vector<std::string>& agents, HeatmapMetric metric);

void WriteHeatmapJsonl(std::ostream& out, const Heatmap& h, const std::string& config_hash,
                       uint64_t seed);
void WriteHeatmapCsv(std::ostream& out, const Heatmap& h);
void WriteHeatmapSvg(std::ostream& out, const Heatmap& h);

struct ProportionTest {
  double statistic = 0.0;
  double p_value = 1.0;
  double difference = 0.0;  // first proportion minus second
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::string method;  // "chi2_yates" or "fisher_exact"
};

// 2x2 chi-square with continuity correction plus a percentile bootstrap CI
// for the difference. Falls back to Fisher's exact test when a margin is
// zero. Throws ContractError when either group has fewer than 20 trials.
ProportionTest CompareProportions(int successes_1, int n_1, int successes_2, int n_2,
                                  uint64_t seed = 1, int bootstrap_samples = 4000);

// Bootstrap CI of mean(x) - mean(y) for two independent samples.
std::pair<double, double> BootstrapMeanDifferenceCi(std::span<const double> x,
                                                    std::span<const double> y,
                                                    uint64_t seed, int samples = 4000,
                                                    double level = 0.95);

inline constexpr const char* kEpisodeSchema = "bargain.episode/1";

nlohmann::json EpisodeToJson(const EpisodeRecord& e, const std::string& config_hash,
                             uint64_t seed);
EpisodeRecord EpisodeFromJson(const nlohmann::json& j);
void WriteEpisodes(std::ostream& out, std::span<const PairResult> pairs,
                   const std::string& config_hash, uint64_t seed);
// Regroups persisted episodes into pairs in first-seen order.
std::vector<PairResult> ReadEpisodes(std::istream& in);

// Per-agent metrics as JSON lines and CSV.
void WriteMetricsJsonl(std::ostream& out, std::span<const MetricsRow> rows,
                       const std::string& config_hash, uint64_t seed);
void WriteMetricsCsv(std::ostream& out, std::span<const MetricsRow> rows);

}  // namespace bargain

#endif  // BARGAIN_TOURNAMENT_H_
