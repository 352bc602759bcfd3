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

#include "bargain/tournament.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "bargain/corpus.h"
#include "bargain/errors.h"
#include "bargain/pareto.h"
#include "bargain/serialize.h"

namespace bargain {

using nlohmann::json;

std::vector<Scenario> HeldOutScenarios(int n, uint64_t seed, const PoolStats& pool,
                                       const std::set<std::string>& exclude) {
  if (n < 0) throw ContractError("HeldOutScenarios: negative count");
  std::vector<Scenario> out;
  for (uint64_t i = 0; static_cast<int>(out.size()) < n; ++i) {
    if (i > static_cast<uint64_t>(n) * 1000 + 10000) {
      throw SamplingError("HeldOutScenarios: too few scenarios outside the excluded set");
    }
    Scenario s = SampleScenario(DeriveSeed(seed, {i}), pool);
    if (exclude.count(ScenarioKey(s))) continue;
    s.id = "eval-" + std::to_string(out.size());
    out.push_back(s);
  }
  return out;
}

PairResult RunPair(const Agent& row, const Agent& col, std::span<const Scenario> scenarios,
                   const TournamentConfig& cfg) {
  PairResult result{row.name(), col.name(), {}};
  const uint64_t pair_seed =
      DeriveSeed(cfg.seed, {HashString(row.name()), HashString(col.name())});
  const int orders = cfg.swap_roles ? 2 : 1;
  for (int i = 0; i < static_cast<int>(scenarios.size()); ++i) {
    const Scenario& s = scenarios[i];
    for (int o = 0; o < orders; ++o) {
      const Role row_role = o == 0 ? Role::kA : Role::kB;
      const uint64_t seed = DeriveSeed(pair_seed, {static_cast<uint64_t>(i),
                                                   static_cast<uint64_t>(o)});
      auto r = row.Begin(s, row_role, DeriveSeed(seed, {1}));
      auto c = col.Begin(s, Other(row_role), DeriveSeed(seed, {2}));
      PlayedDialogue p = row_role == Role::kA ? PlayDialogue(s, *r, *c, cfg.cutoff)
                                              : PlayDialogue(s, *c, *r, cfg.cutoff);
      EpisodeRecord e;
      e.row = result.row;
      e.col = result.col;
      e.scenario_index = i;
      e.scenario = s;
      e.row_role = row_role;
      e.acts = p.state.history;
      e.output_a = p.output_a;
      e.output_b = p.output_b;
      e.outcome = p.outcome;
      e.pareto_optimal =
          e.outcome.agreed() && IsParetoOptimal(s, e.outcome.points_a, e.outcome.points_b);
      result.episodes.push_back(std::move(e));
    }
  }
  return result;
}

std::vector<PairResult> RunGrid(std::span<const std::shared_ptr<const Agent>> agents,
                                std::span<const Scenario> scenarios,
                                const TournamentConfig& cfg) {
  const int n = static_cast<int>(agents.size());
  std::vector<PairResult> results(n * n);
  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n * n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int cell; (cell = next.fetch_add(1)) < n * n;) {
      results[cell] = RunPair(*agents[cell / n], *agents[cell % n], scenarios, cfg);
    }
  };
  std::vector<std::future<void>> pool;
  for (int t = 0; t < threads; ++t) pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();
  return results;
}

MeanSe MeanWithError(std::span<const double> xs) {
  MeanSe m;
  m.n = static_cast<int>(xs.size());
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / xs.size();
  m.mean = mean;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    m.standard_error = std::sqrt(ss / (xs.size() - 1)) / std::sqrt(double(xs.size()));
  }
  return m;
}

EpisodeSummary Summarize(std::span<const EpisodeRecord> episodes, bool include_walkaways) {
  if (episodes.empty()) throw DomainError("Summarize: no episodes");
  std::vector<double> own, partner, joint;
  EpisodeSummary s;
  int agreements = 0, pareto = 0;
  for (const EpisodeRecord& e : episodes) {
    if (e.walkaway()) {
      ++s.walkaways;
      if (!include_walkaways) continue;
    } else {
      ++agreements;
      pareto += e.pareto_optimal;
    }
    own.push_back(e.row_points());
    partner.push_back(e.col_points());
    joint.push_back(e.joint_points());
  }
  s.episodes = static_cast<int>(episodes.size());
  s.agent_points = MeanWithError(own);
  s.partner_points = MeanWithError(partner);
  s.joint_points = MeanWithError(joint);
  s.walkaway_fraction = static_cast<double>(s.walkaways) / s.episodes;
  s.pareto_fraction = agreements == 0 ? 0.0 : static_cast<double>(pareto) / agreements;
  return s;
}

std::vector<MetricsRow> BuildMetricsTable(std::span<const PairResult> pairs,
                                          const std::set<std::string>& partners) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<EpisodeRecord>> by_agent;
  for (const PairResult& p : pairs) {
    if (!partners.empty() && !partners.count(p.col)) continue;
    if (!by_agent.count(p.row)) order.push_back(p.row);
    auto& v = by_agent[p.row];
    v.insert(v.end(), p.episodes.begin(), p.episodes.end());
  }
  std::vector<MetricsRow> rows;
  for (const std::string& a : order) {
    const auto& eps = by_agent[a];
    if (eps.empty()) continue;
    rows.push_back({a, Summarize(eps, true), Summarize(eps, false)});
  }
  return rows;
}

const char* HeatmapMetricName(HeatmapMetric m) {
  switch (m) {
    case HeatmapMetric::kOwnPoints: return "own_points";
    case HeatmapMetric::kJointPoints: return "joint_points";
    default: return "walkaway_percent";
  }
}

Heatmap BuildHeatmap(std::span<const PairResult> pairs,
                     const std::vector<std::string>& agents, HeatmapMetric metric) {
  std::map<std::pair<std::string, std::string>, const PairResult*> index;
  for (const PairResult& p : pairs) index[{p.row, p.col}] = &p;
  Heatmap h{metric, agents, {}};
  std::string missing;
  for (const std::string& r : agents) {
    std::vector<double> row;
    for (const std::string& c : agents) {
      auto it = index.find({r, c});
      if (it == index.end() || it->second->episodes.empty()) {
        missing += " (" + r + ", " + c + ")";
        row.push_back(0.0);
        continue;
      }
      EpisodeSummary s = Summarize(it->second->episodes, true);
      switch (metric) {
        case HeatmapMetric::kOwnPoints: row.push_back(*s.agent_points.mean); break;
        case HeatmapMetric::kJointPoints: row.push_back(*s.joint_points.mean); break;
        default: row.push_back(100.0 * s.walkaway_fraction);
      }
    }
    h.cells.push_back(std::move(row));
  }
  if (!missing.empty()) throw IncompleteGridError("heatmap: missing cells:" + missing);
  return h;
}

void WriteHeatmapJsonl(std::ostream& out, const Heatmap& h, const std::string& config_hash,
                       uint64_t seed) {
  for (size_t i = 0; i < h.agents.size(); ++i) {
    for (size_t j = 0; j < h.agents.size(); ++j) {
      out << json{{"schema", "bargain.heatmap/1"},
                  {"metric", HeatmapMetricName(h.metric)},
                  {"config_hash", config_hash},
                  {"seed", seed},
                  {"row", h.agents[i]},
                  {"col", h.agents[j]},
                  {"value", h.cells[i][j]}}
                 .dump()
          << "\n";
    }
  }
}

void WriteHeatmapCsv(std::ostream& out, const Heatmap& h) {
  out << "row";
  for (const auto& a : h.agents) out << "," << a;
  out << "\n";
  for (size_t i = 0; i < h.agents.size(); ++i) {
    out << h.agents[i];
    for (double v : h.cells[i]) out << "," << std::fixed << std::setprecision(4) << v;
    out << "\n";
  }
  out << std::defaultfloat;
}

void WriteHeatmapSvg(std::ostream& out, const Heatmap& h) {
  const int n = static_cast<int>(h.agents.size());
  const int cell = 70, left = 150, top = 150;
  double lo = 0.0, hi = 0.0;
  for (const auto& r : h.cells) {
    for (double v : r) hi = std::max(hi, v);
  }
  if (hi <= lo) hi = lo + 1.0;
  const int width = left + n * cell + 20, height = top + n * cell + 40;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">"
      << HeatmapMetricName(h.metric) << " (row agent vs column agent)</text>\n";
  for (int i = 0; i < n; ++i) {
    out << "<text x=\"" << left - 6 << "\" y=\"" << top + i * cell + cell / 2 + 4
        << "\" text-anchor=\"end\">" << h.agents[i] << "</text>\n";
    const int cx = left + i * cell + cell / 2;
    out << "<text x=\"" << cx << "\" y=\"" << top - 6 << "\" transform=\"rotate(-45 " << cx
        << " " << top - 6 << ")\">" << h.agents[i] << "</text>\n";
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = h.cells[i][j];
      const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
      const int shade = static_cast<int>(std::lround(255 - 200 * t));
      const int x = left + j * cell, y = top + i * cell;
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
          << cell << "\" fill=\"rgb(" << shade << "," << shade << ",255)\" stroke=\"#888\"/>\n";
      std::ostringstream label;
      label << std::fixed << std::setprecision(2) << v;
      out << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
          << "\" text-anchor=\"middle\">" << label.str() << "</text>\n";
    }
  }
  out << "</svg>\n";
}

namespace {

double LogChoose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Two-sided Fisher exact test on [[a, b], [c, d]].
double FisherExact(int a, int b, int c, int d) {
  const int row1 = a + b, row2 = c + d, col1 = a + c, n = row1 + row2;
  auto prob = [&](int x) {
    return std::exp(LogChoose(row1, x) + LogChoose(row2, col1 - x) - LogChoose(n, col1));
  };
  const double observed = prob(a);
  double p = 0.0;
  for (int x = std::max(0, col1 - row2); x <= std::min(row1, col1); ++x) {
    const double px = prob(x);
    if (px <= observed * (1.0 + 1e-7)) p += px;
  }
  return std::min(1.0, p);
}

double Percentile(std::vector<double>& xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double pos = q * (xs.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(xs.size() - 1, lo + 1);
  return xs[lo] + (pos - lo) * (xs[hi] - xs[lo]);
}

}  // namespace

ProportionTest CompareProportions(int k1, int n1, int k2, int n2, uint64_t seed,
                                  int bootstrap_samples) {
  if (n1 < 20 || n2 < 20) {
    throw ContractError("CompareProportions: need at least 20 trials per group");
  }
  if (k1 < 0 || k1 > n1 || k2 < 0 || k2 > n2) {
    throw ContractError("CompareProportions: successes outside [0, n]");
  }
  ProportionTest t;
  const double p1 = static_cast<double>(k1) / n1, p2 = static_cast<double>(k2) / n2;
  t.difference = p1 - p2;
  const double a = k1, b = n1 - k1, c = k2, d = n2 - k2, n = n1 + n2;
  const double col1 = a + c, col2 = b + d;
  if (col1 == 0 || col2 == 0) {
    t.method = "fisher_exact";
    t.p_value = FisherExact(k1, n1 - k1, k2, n2 - k2);
  } else {
    t.method = "chi2_yates";
    const double diff = std::max(0.0, std::abs(a * d - b * c) - n / 2.0);
    t.statistic = n * diff * diff / (double(n1) * n2 * col1 * col2);
    t.p_value = std::erfc(std::sqrt(t.statistic / 2.0));
  }
  Rng rng(seed);
  std::vector<double> diffs;
  diffs.reserve(bootstrap_samples);
  for (int s = 0; s < bootstrap_samples; ++s) {
    int x1 = 0, x2 = 0;
    for (int i = 0; i < n1; ++i) x1 += rng.Below(n1) < k1;
    for (int i = 0; i < n2; ++i) x2 += rng.Below(n2) < k2;
    diffs.push_back(static_cast<double>(x1) / n1 - static_cast<double>(x2) / n2);
  }
  t.ci_low = Percentile(diffs, 0.025);
  t.ci_high = Percentile(diffs, 0.975);
  return t;
}

std::pair<double, double> BootstrapMeanDifferenceCi(std::span<const double> x,
                                                    std::span<const double> y,
                                                    uint64_t seed, int samples,
                                                    double level) {
  if (x.empty() || y.empty()) throw DomainError("bootstrap: empty sample");
  Rng rng(seed);
  std::vector<double> diffs;
  diffs.reserve(samples);
  for (int s = 0; s < samples; ++s) {
    double sx = 0.0, sy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) sx += x[rng.Below(static_cast<int>(x.size()))];
    for (size_t i = 0; i < y.size(); ++i) sy += y[rng.Below(static_cast<int>(y.size()))];
    diffs.push_back(sx / x.size() - sy / y.size());
  }
  const double tail = (1.0 - level) / 2.0;
  return {Percentile(diffs, tail), Percentile(diffs, 1.0 - tail)};
}

json EpisodeToJson(const EpisodeRecord& e, const std::string& config_hash, uint64_t seed) {
  json acts = json::array();
  for (const DialogueAct& a : e.acts) acts.push_back(ActToJson(a));
  auto div = [](const std::optional<Division>& d) {
    return d ? IssueVectorToJson(d->take) : json(nullptr);
  };
  return {{"schema", kEpisodeSchema},
          {"config_hash", config_hash},
          {"seed", seed},
          {"row", e.row},
          {"col", e.col},
          {"scenario_index", e.scenario_index},
          {"scenario", ScenarioToJson(e.scenario)},
          {"row_role", RoleName(e.row_role)},
          {"acts", acts},
          {"output_a", div(e.output_a)},
          {"output_b", div(e.output_b)},
          {"outcome", OutcomeToJson(e.outcome)},
          {"pareto_optimal", e.pareto_optimal}};
}

EpisodeRecord EpisodeFromJson(const json& j) {
  try {
    if (j.at("schema").get<std::string>() != kEpisodeSchema) {
      throw DataError("episode: unsupported schema");
    }
    EpisodeRecord e;
    e.row = j.at("row").get<std::string>();
    e.col = j.at("col").get<std::string>();
    e.scenario_index = j.at("scenario_index").get<int>();
    e.scenario = ScenarioFromJson(j.at("scenario"));
    e.row_role = RoleFromName(j.at("row_role").get<std::string>());
    for (const json& a : j.at("acts")) e.acts.push_back(ActFromJson(a));
    if (!j.at("output_a").is_null()) e.output_a = Division{IssueVectorFromJson(j["output_a"])};
    if (!j.at("output_b").is_null()) e.output_b = Division{IssueVectorFromJson(j["output_b"])};
    e.outcome = OutcomeFromJson(j.at("outcome"));
    e.pareto_optimal = j.at("pareto_optimal").get<bool>();
    return e;
  } catch (const json::exception& ex) {
    throw DataError(std::string("episode: ") + ex.what());
  }
}

void WriteEpisodes(std::ostream& out, std::span<const PairResult> pairs,
                   const std::string& config_hash, uint64_t seed) {
  for (const PairResult& p : pairs) {
    for (const EpisodeRecord& e : p.episodes) {
      out << EpisodeToJson(e, config_hash, seed).dump() << "\n";
    }
  }
}

std::vector<PairResult> ReadEpisodes(std::istream& in) {
  std::vector<PairResult> pairs;
  std::map<std::pair<std::string, std::string>, size_t> index;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("episodes line " + std::to_string(line_number) + ": " + e.what());
    }
    EpisodeRecord e = EpisodeFromJson(j);
    auto key = std::make_pair(e.row, e.col);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, pairs.size()).first;
      pairs.push_back({e.row, e.col, {}});
    }
    pairs[it->second].episodes.push_back(std::move(e));
  }
  return pairs;
}

namespace {

json MeanJson(const MeanSe& m) {
  return {{"mean", m.mean ? json(*m.mean) : json("undefined")},
          {"se", m.standard_error},
          {"n", m.n}};
}

json SummaryJson(const EpisodeSummary& s) {
  return {{"agent_points", MeanJson(s.agent_points)},
          {"partner_points", MeanJson(s.partner_points)},
          {"joint_points", MeanJson(s.joint_points)}};
}

std::string Fmt(const MeanSe& m) {
  if (!m.mean) return "undefined";
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << *m.mean;
  return s.str();
}

}  // namespace

void WriteMetricsJsonl(std::ostream& out, std::span<const MetricsRow> rows,
                       const std::string& config_hash, uint64_t seed) {
  for (const MetricsRow& r : rows) {
    out << json{{"schema", "bargain.metrics/1"},
                {"config_hash", config_hash},
                {"seed", seed},
                {"agent", r.agent},
                {"episodes", r.including.episodes},
                {"walkaway_percent", 100.0 * r.including.walkaway_fraction},
                {"pareto_fraction", r.including.pareto_fraction},
                {"including_walkaways", SummaryJson(r.including)},
                {"excluding_walkaways", SummaryJson(r.excluding)}}
               .dump()
        << "\n";
  }
}

void WriteMetricsCsv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << "agent,partner_points,agent_points,joint_points,partner_points_excl,"
         "agent_points_excl,joint_points_excl,walkaway_percent\n";
  for (const MetricsRow& r : rows) {
    std::ostringstream w;
    w << std::fixed << std::setprecision(2) << 100.0 * r.including.walkaway_fraction;
    out << r.agent << "," << Fmt(r.including.partner_points) << ","
        << Fmt(r.including.agent_points) << "," << Fmt(r.including.joint_points) << ","
        << Fmt(r.excluding.partner_points) << "," << Fmt(r.excluding.agent_points) << ","
        << Fmt(r.excluding.joint_points) << "," << w.str() << "\n";
  }
}

}  // namespace bargain
