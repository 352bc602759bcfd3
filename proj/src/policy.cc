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

#include "bargain/policy.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <optional>

#include "bargain/errors.h"

namespace bargain {
namespace {

using Eigen::Map;
using Eigen::MatrixXd;
using Eigen::VectorXd;

using ConstMat = Map<const MatrixXd>;
using ConstVec = Map<const VectorXd>;
using Mat = Map<MatrixXd>;
using Vec = Map<VectorXd>;

constexpr double kCountScale = 5.0;

struct Views {
  Views(const PolicyParameters& p)
      : arch(p.architecture()),
        layout(arch),
        data(p.values().data()) {}

  ConstMat M(int offset, int rows, int cols) const {
    return ConstMat(data + offset, rows, cols);
  }
  ConstVec V(int offset, int n) const { return ConstVec(data + offset, n); }

  ConstMat goal_w() const { return M(layout.goal_w, arch.goal_dim, kGoalFeatures); }
  ConstVec goal_b() const { return V(layout.goal_b, arch.goal_dim); }
  ConstMat gru_wx() const { return M(layout.gru_wx, 3 * arch.hidden_dim, kActFeatures); }
  ConstMat gru_wh() const {
    return M(layout.gru_wh, 3 * arch.hidden_dim, arch.hidden_dim);
  }
  ConstVec gru_bx() const { return V(layout.gru_bx, 3 * arch.hidden_dim); }
  ConstVec gru_bh() const { return V(layout.gru_bh, 3 * arch.hidden_dim); }
  ConstMat trunk_w() const { return M(layout.trunk_w, arch.trunk_dim, arch.state_dim()); }
  ConstVec trunk_b() const { return V(layout.trunk_b, arch.trunk_dim); }
  ConstMat act_w() const { return M(layout.act_w, kActTypes, arch.trunk_dim); }
  ConstVec act_b() const { return V(layout.act_b, kActTypes); }
  ConstMat prop_w() const {
    return M(layout.prop_w, kQuantityBasis, arch.trunk_dim + kIssueFeatures);
  }
  ConstVec prop_b() const { return V(layout.prop_b, kQuantityBasis); }
  ConstMat out_w() const {
    return M(layout.out_w, kQuantityBasis, arch.trunk_dim + kIssueFeatures);
  }
  ConstVec out_b() const { return V(layout.out_b, kQuantityBasis); }

  const Architecture& arch;
  ParameterLayout layout;
  const double* data;
};

// Mutable views into a gradient vector laid out like the parameters.
struct GradViews {
  GradViews(const Architecture& a, VectorXd& g) : arch(a), layout(a), data(g.data()) {}
  Mat M(int offset, int rows, int cols) { return Mat(data + offset, rows, cols); }
  Vec V(int offset, int n) { return Vec(data + offset, n); }
  const Architecture& arch;
  ParameterLayout layout;
  double* data;
};

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

VectorXd GoalFeatures(const Scenario& s, Role self) {
  VectorXd x(kGoalFeatures);
  const IssueVector& v = s.values(self);
  for (int k = 0; k < kNumIssues; ++k) {
    x[k] = s.counts[k] / kCountScale;
    x[kNumIssues + k] = v[k] / static_cast<double>(kMaxPoints);
    x[2 * kNumIssues + k] = s.counts[k] * v[k] / static_cast<double>(kMaxPoints);
  }
  return x;
}

// Items of each issue that `self` ends up with under `act`'s proposal.
IssueVector MyShare(const DialogueAct& act, const Scenario& s, Role self) {
  const Division& d = *act.proposal;
  return act.speaker == self ? d.take : Complement(d, s.counts).take;
}

double ShareFraction(int share, int count) {
  return count == 0 ? 0.0 : static_cast<double>(share) / count;
}

int MyPoints(const IssueVector& share, const Scenario& s, Role self) {
  return Score(Division{share}, s.values(self));
}

VectorXd ActFeatures(const DialogueAct& act, const Scenario& s, Role self) {
  VectorXd x = VectorXd::Zero(kActFeatures);
  const int side = act.speaker == self ? 0 : 4;
  x[side + static_cast<int>(act.kind)] = 1.0;
  if (act.kind == ActKind::kPropose && act.proposal) {
    IssueVector mine = MyShare(act, s, self);
    for (int k = 0; k < kNumIssues; ++k) x[8 + k] = ShareFraction(mine[k], s.counts[k]);
    x[11] = MyPoints(mine, s, self) / static_cast<double>(kMaxPoints);
  }
  return x;
}

struct TableSummary {
  const DialogueAct* mine = nullptr;     // my latest proposal
  const DialogueAct* partner = nullptr;  // partner's latest proposal
  const DialogueAct* latest = nullptr;   // latest proposal by anyone
  int partner_proposals = 0;
};

TableSummary Summarize(std::span<const DialogueAct> history, Role self) {
  TableSummary t;
  for (const DialogueAct& a : history) {
    if (a.kind != ActKind::kPropose) continue;
    t.latest = &a;
    if (a.speaker == self) {
      t.mine = &a;
    } else {
      t.partner = &a;
      ++t.partner_proposals;
    }
  }
  return t;
}

VectorXd TableFeatures(std::span<const DialogueAct> history, const Scenario& s,
                       Role self) {
  VectorXd x = VectorXd::Zero(kTableFeatures);
  TableSummary t = Summarize(history, self);
  const DialogueAct* last = history.empty() ? nullptr : &history.back();
  auto points = [&](const DialogueAct* a) {
    return MyPoints(MyShare(*a, s, self), s, self) / static_cast<double>(kMaxPoints);
  };
  if (last && last->kind == ActKind::kPropose && last->speaker != self) {
    x[0] = 1.0;
    x[1] = points(last);
  }
  if (t.partner) x[2] = points(t.partner);
  if (t.mine) {
    x[3] = points(t.mine);
    x[4] = 1.0;
  }
  x[5] = static_cast<double>(history.size()) / kDefaultCutoff;
  if (last && last->kind == ActKind::kAccept && last->speaker != self) x[6] = 1.0;
  x[7] = t.partner_proposals / 10.0;
  return x;
}

std::array<VectorXd, kNumIssues> IssueFeatures(std::span<const DialogueAct> history,
                                               const Scenario& s, Role self) {
  TableSummary t = Summarize(history, self);
  std::array<VectorXd, kNumIssues> out;
  const IssueVector& v = s.values(self);
  for (int k = 0; k < kNumIssues; ++k) {
    VectorXd x = VectorXd::Zero(kIssueFeatures);
    x[0] = s.counts[k] / kCountScale;
    x[1] = v[k] / static_cast<double>(kMaxPoints);
    x[2] = s.counts[k] * v[k] / static_cast<double>(kMaxPoints);
    auto frac = [&](const DialogueAct* a) {
      return ShareFraction(MyShare(*a, s, self)[k], s.counts[k]);
    };
    if (t.partner) x[3] = frac(t.partner);
    if (t.mine) x[4] = frac(t.mine);
    if (t.latest) x[5] = frac(t.latest);
    out[k] = x;
  }
  return out;
}

ActMask MaskFor(std::span<const DialogueAct> history, Role self) {
  DialogueState probe;
  probe.turn = self;
  probe.history.assign(history.begin(), history.end());
  if (!history.empty()) {
    ActKind k = history.back().kind;
    probe.terminal = k == ActKind::kSelect || k == ActKind::kWalkaway;
  }
  return AgentLegalActs(probe);
}

void CheckHistory(const Scenario& s, std::span<const DialogueAct> history) {
  if (history.empty()) return;
  DialogueState st = DialogueState::Start(s, history.front().speaker);
  try {
    for (const DialogueAct& a : history) {
      st = ApplyAct(st, a, std::numeric_limits<int>::max());
    }
  } catch (const Error& e) {
    throw ContractError(std::string("EncodeState: illegal history: ") + e.what());
  }
}

struct GruStep {
  VectorXd r, z, n, hb_n;  // gates and the recurrent candidate term
};

VectorXd GruForward(const Views& w, const VectorXd& x, const VectorXd& h,
                    GruStep* cache) {
  const int H = w.arch.hidden_dim;
  VectorXd a = w.gru_wx() * x + w.gru_bx();
  VectorXd b = w.gru_wh() * h + w.gru_bh();
  VectorXd r = (a.segment(0, H) + b.segment(0, H)).unaryExpr(&Sigmoid);
  VectorXd z = (a.segment(H, H) + b.segment(H, H)).unaryExpr(&Sigmoid);
  VectorXd n =
      (a.segment(2 * H, H) + r.cwiseProduct(b.segment(2 * H, H))).array().tanh().matrix();
  VectorXd next = (1.0 - z.array()).matrix().cwiseProduct(n) + z.cwiseProduct(h);
  if (cache) *cache = {r, z, n, b.segment(2 * H, H)};
  return next;
}

VectorXd Goal(const Views& w, const Scenario& s, Role self) {
  return (w.goal_w() * GoalFeatures(s, self) + w.goal_b()).array().tanh().matrix();
}

StateEncoding Assemble(const Views& w, const VectorXd& goal, const VectorXd& hidden,
                       const Scenario& s, Role self,
                       std::span<const DialogueAct> history) {
  StateEncoding e;
  e.vector.resize(w.arch.state_dim());
  e.vector << goal, hidden, TableFeatures(history, s, self);
  e.issue_features = IssueFeatures(history, s, self);
  e.counts = s.counts;
  e.mask = MaskFor(history, self);
  e.selection_due = !history.empty() && history.back().kind == ActKind::kSelect;
  return e;
}

VectorXd Trunk(const Views& w, const VectorXd& state) {
  return (w.trunk_w() * state + w.trunk_b()).array().tanh().matrix();
}

double Basis(int j, int q, int count) {
  const double u = static_cast<double>(q) / count;
  switch (j) {
    case 0: return u;
    case 1: return u * u;
    case 2: return q == 0 ? 1.0 : 0.0;
    default: return q == count ? 1.0 : 0.0;
  }
}

VectorXd HeadInput(const VectorXd& trunk, const VectorXd& issue) {
  VectorXd u(trunk.size() + issue.size());
  u << trunk, issue;
  return u;
}

// Softmax over logits/temperature for entries with allowed[i].
std::vector<double> MaskedSoftmax(const std::vector<double>& logits,
                                  const std::vector<bool>& allowed, double temperature) {
  double top = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < logits.size(); ++i) {
    if (allowed[i]) top = std::max(top, logits[i] / temperature);
  }
  std::vector<double> p(logits.size(), 0.0);
  double total = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    if (!allowed[i]) continue;
    p[i] = std::exp(logits[i] / temperature - top);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

std::vector<double> QuantityProbs(const ConstMat& W, const ConstVec& b,
                                  const VectorXd& trunk, const VectorXd& issue,
                                  int count, double temperature) {
  if (count == 0) return {1.0};
  VectorXd coef = W * HeadInput(trunk, issue) + b;
  std::vector<double> logits(count + 1);
  for (int q = 0; q <= count; ++q) {
    double l = 0.0;
    for (int j = 0; j < kQuantityBasis; ++j) l += coef[j] * Basis(j, q, count);
    logits[q] = l;
  }
  return MaskedSoftmax(logits, std::vector<bool>(count + 1, true), temperature);
}

std::vector<bool> AllowedTypes(const ActMask& m) {
  return {m.propose, m.accept, m.select};
}

int Argmax(const std::vector<double>& p) {
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

int Draw(const std::vector<double>& p, Rng& rng, bool greedy) {
  return greedy ? Argmax(p) : rng.Categorical(p);
}

void CheckTemperature(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw ContractError("policy: temperature must be positive");
  }
}

// Backprop of one categorical over basis-parameterized quantity logits.
// dcoef receives d(objective)/d(coefficients) for weight * log p(q).
void QuantityGrad(const std::vector<double>& p, int chosen, int count, double weight,
                  Eigen::Vector<double, kQuantityBasis>& dcoef) {
  dcoef.setZero();
  for (int q = 0; q <= count; ++q) {
    const double dl = weight * ((q == chosen ? 1.0 : 0.0) - p[q]);
    for (int j = 0; j < kQuantityBasis; ++j) dcoef[j] += dl * Basis(j, q, count);
  }
}

}  // namespace

ParameterLayout::ParameterLayout(const Architecture& a) {
  const int G = a.goal_dim, H = a.hidden_dim, F = a.trunk_dim;
  int off = 0;
  auto take = [&](int n) {
    int o = off;
    off += n;
    return o;
  };
  goal_w = take(G * kGoalFeatures);
  goal_b = take(G);
  gru_wx = take(3 * H * kActFeatures);
  gru_wh = take(3 * H * H);
  gru_bx = take(3 * H);
  gru_bh = take(3 * H);
  trunk_w = take(F * a.state_dim());
  trunk_b = take(F);
  act_w = take(kActTypes * F);
  act_b = take(kActTypes);
  prop_w = take(kQuantityBasis * (F + kIssueFeatures));
  prop_b = take(kQuantityBasis);
  out_w = take(kQuantityBasis * (F + kIssueFeatures));
  out_b = take(kQuantityBasis);
  total = off;
}

PolicyParameters::PolicyParameters(Architecture arch, VectorXd values)
    : arch_(arch), values_(std::move(values)) {
  if (arch_.goal_dim < 1 || arch_.hidden_dim < 1 || arch_.trunk_dim < 1) {
    throw ContractError("PolicyParameters: layer sizes must be positive");
  }
  if (values_.size() != ParameterLayout(arch_).total) {
    throw ContractError("PolicyParameters: parameter count does not match architecture");
  }
}

PolicyParameters PolicyParameters::Initialize(const Architecture& arch) {
  VectorXd v(ParameterLayout(arch).total);
  Rng rng(arch.seed);
  for (int i = 0; i < v.size(); ++i) {
    v[i] = (2.0 * rng.Uniform() - 1.0) * arch.init_range;
  }
  return PolicyParameters(arch, std::move(v));
}

std::string PolicyParameters::Hash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const void* p, size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  const int dims[3] = {arch_.goal_dim, arch_.hidden_dim, arch_.trunk_dim};
  mix(dims, sizeof(dims));
  mix(values_.data(), sizeof(double) * values_.size());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

StateEncoding EncodeState(const PolicyParameters& params, const Scenario& scenario,
                          Role self, std::span<const DialogueAct> history) {
  CheckHistory(scenario, history);
  Views w(params);
  VectorXd h = VectorXd::Zero(w.arch.hidden_dim);
  for (const DialogueAct& a : history) {
    h = GruForward(w, ActFeatures(a, scenario, self), h, nullptr);
  }
  return Assemble(w, Goal(w, scenario, self), h, scenario, self, history);
}

ActDistribution ComputeActDistribution(const PolicyParameters& params,
                                       const StateEncoding& state, double temperature) {
  CheckTemperature(temperature);
  if (!state.mask.Any()) throw ContractError("ComputeActDistribution: no legal act");
  Views w(params);
  VectorXd f = Trunk(w, state.vector);
  VectorXd logits = w.act_w() * f + w.act_b();
  std::vector<double> p = MaskedSoftmax({logits[0], logits[1], logits[2]},
                                        AllowedTypes(state.mask), temperature);
  ActDistribution d;
  std::copy(p.begin(), p.end(), d.act_type.begin());
  for (int k = 0; k < kNumIssues; ++k) {
    d.proposal[k] = QuantityProbs(w.prop_w(), w.prop_b(), f, state.issue_features[k],
                                  state.counts[k], temperature);
  }
  return d;
}

OutputDistribution PredictOutputDeal(const PolicyParameters& params,
                                     const StateEncoding& state) {
  if (!state.selection_due) {
    throw ContractError("PredictOutputDeal: dialogue did not end with a selection");
  }
  Views w(params);
  VectorXd f = Trunk(w, state.vector);
  OutputDistribution out;
  for (int k = 0; k < kNumIssues; ++k) {
    out.share[k] = QuantityProbs(w.out_w(), w.out_b(), f, state.issue_features[k],
                                 state.counts[k], 1.0);
    out.argmax.take[k] = Argmax(out.share[k]);
  }
  return out;
}

SampledAct SampleAct(const PolicyParameters& params, const StateEncoding& state,
                     Role speaker, Rng& rng, double temperature, bool greedy) {
  ActDistribution d = ComputeActDistribution(params, state, temperature);
  std::vector<double> types(d.act_type.begin(), d.act_type.end());
  const int t = Draw(types, rng, greedy);
  SampledAct s;
  s.log_prob = std::log(types[t]);
  switch (static_cast<ActKind>(t)) {
    case ActKind::kAccept:
      s.act = DialogueAct::Accept(speaker);
      break;
    case ActKind::kSelect:
      s.act = DialogueAct::Select(speaker);
      break;
    default: {
      IssueVector take{};
      for (int k = 0; k < kNumIssues; ++k) {
        take[k] = Draw(d.proposal[k], rng, greedy);
        s.log_prob += std::log(d.proposal[k][take[k]]);
      }
      s.act = DialogueAct::Propose(speaker, take);
    }
  }
  return s;
}

SampledDivision SampleOutputDeal(const PolicyParameters& params,
                                 const StateEncoding& state, Rng& rng, bool greedy) {
  OutputDistribution d = PredictOutputDeal(params, state);
  SampledDivision s;
  for (int k = 0; k < kNumIssues; ++k) {
    s.division.take[k] = Draw(d.share[k], rng, greedy);
    s.log_prob += std::log(d.share[k][s.division.take[k]]);
  }
  return s;
}

PolicyRunner::PolicyRunner(const PolicyParameters& params, const Scenario& scenario,
                           Role self)
    : params_(&params), scenario_(scenario), self_(self) {
  Views w(params);
  goal_ = Goal(w, scenario_, self_);
  hidden_ = VectorXd::Zero(w.arch.hidden_dim);
}

void PolicyRunner::Observe(const DialogueAct& act) {
  Views w(*params_);
  hidden_ = GruForward(w, ActFeatures(act, scenario_, self_), hidden_, nullptr);
  history_.push_back(act);
}

StateEncoding PolicyRunner::Encode() const {
  return Assemble(Views(*params_), goal_, hidden_, scenario_, self_, history_);
}

double WeightedLogLikelihood(const PolicyParameters& params, const Scenario& scenario,
                             Role self, std::span<const DialogueAct> history,
                             std::span<const Decision> decisions, VectorXd* grad) {
  CheckHistory(scenario, history);
  Views w(params);
  const Architecture& arch = w.arch;
  const int G = arch.goal_dim, H = arch.hidden_dim, F = arch.trunk_dim;
  const int n = static_cast<int>(history.size());
  if (grad && grad->size() != params.size()) {
    throw ContractError("WeightedLogLikelihood: gradient size mismatch");
  }

  // Forward through goal and recurrent encoders, caching what backprop needs.
  VectorXd xg = GoalFeatures(scenario, self);
  VectorXd g = (w.goal_w() * xg + w.goal_b()).array().tanh().matrix();
  std::vector<VectorXd> xs(n), hs(n + 1);
  std::vector<GruStep> steps(n);
  hs[0] = VectorXd::Zero(H);
  for (int t = 0; t < n; ++t) {
    xs[t] = ActFeatures(history[t], scenario, self);
    hs[t + 1] = GruForward(w, xs[t], hs[t], &steps[t]);
  }

  std::vector<VectorXd> dh(n + 1, VectorXd::Zero(H));
  VectorXd dg = VectorXd::Zero(G);
  std::optional<GradViews> gv;
  if (grad) gv.emplace(arch, *grad);

  double total = 0.0;
  for (const Decision& d : decisions) {
    if (d.step < 0 || d.step > n) throw ContractError("Decision step out of range");
    auto prefix = history.first(d.step);
    StateEncoding enc = Assemble(w, g, hs[d.step], scenario, self, prefix);
    VectorXd f = Trunk(w, enc.vector);
    VectorXd df = VectorXd::Zero(F);

    auto quantity_head = [&](bool output_head, const IssueVector& chosen) {
      ConstMat W = output_head ? w.out_w() : w.prop_w();
      ConstVec b = output_head ? w.out_b() : w.prop_b();
      const int wo = output_head ? w.layout.out_w : w.layout.prop_w;
      const int bo = output_head ? w.layout.out_b : w.layout.prop_b;
      double lp = 0.0;
      for (int k = 0; k < kNumIssues; ++k) {
        const int c = scenario.counts[k];
        if (chosen[k] < 0 || chosen[k] > c) {
          throw ContractError("Decision quantity exceeds item count");
        }
        if (c == 0) continue;
        std::vector<double> p =
            QuantityProbs(W, b, f, enc.issue_features[k], c, 1.0);
        lp += std::log(p[chosen[k]]);
        if (!grad) continue;
        Eigen::Vector<double, kQuantityBasis> dcoef;
        QuantityGrad(p, chosen[k], c, d.weight, dcoef);
        VectorXd u = HeadInput(f, enc.issue_features[k]);
        gv->M(wo, kQuantityBasis, F + kIssueFeatures) += dcoef * u.transpose();
        gv->V(bo, kQuantityBasis) += dcoef;
        df += W.leftCols(F).transpose() * dcoef;
      }
      return lp;
    };

    double lp = 0.0;
    if (d.type == Decision::Type::kOutput) {
      if (!enc.selection_due || d.step != n) {
        throw ContractError("Output decision requires a dialogue ending in a selection");
      }
      lp = quantity_head(true, d.output.take);
    } else {
      if (d.step >= n) throw ContractError("Act decision past end of history");
      const DialogueAct& act = history[d.step];
      if (act.speaker != self) throw ContractError("Act decision by the other side");
      if (!enc.mask.Allows(act.kind)) {
        throw ContractError(std::string("Act decision not allowed for an agent: ") +
                            ActKindName(act.kind));
      }
      VectorXd logits = w.act_w() * f + w.act_b();
      std::vector<double> p = MaskedSoftmax({logits[0], logits[1], logits[2]},
                                            AllowedTypes(enc.mask), 1.0);
      const int chosen = static_cast<int>(act.kind);
      lp = std::log(p[chosen]);
      if (grad) {
        Eigen::Vector3d dl;
        for (int i = 0; i < kActTypes; ++i) {
          dl[i] = p[i] == 0.0 ? 0.0 : d.weight * ((i == chosen ? 1.0 : 0.0) - p[i]);
        }
        gv->M(w.layout.act_w, kActTypes, F) += dl * f.transpose();
        gv->V(w.layout.act_b, kActTypes) += dl;
        df += w.act_w().transpose() * dl;
      }
      if (act.kind == ActKind::kPropose) lp += quantity_head(false, act.proposal->take);
    }
    total += d.weight * lp;

    if (grad) {
      VectorXd dpre = df.cwiseProduct((1.0 - f.array().square()).matrix());
      gv->M(w.layout.trunk_w, F, arch.state_dim()) += dpre * enc.vector.transpose();
      gv->V(w.layout.trunk_b, F) += dpre;
      VectorXd dz = w.trunk_w().transpose() * dpre;
      dg += dz.segment(0, G);
      dh[d.step] += dz.segment(G, H);
    }
  }
  if (!grad) return total;

  // Backprop through time.
  for (int t = n - 1; t >= 0; --t) {
    const GruStep& s = steps[t];
    const VectorXd& hn = dh[t + 1];
    VectorXd dn = hn.cwiseProduct((1.0 - s.z.array()).matrix());
    VectorXd dzg = hn.cwiseProduct(hs[t] - s.n);
    VectorXd dan = dn.cwiseProduct((1.0 - s.n.array().square()).matrix());
    VectorXd dr = dan.cwiseProduct(s.hb_n);
    VectorXd dar = dr.cwiseProduct(s.r.cwiseProduct((1.0 - s.r.array()).matrix()));
    VectorXd daz = dzg.cwiseProduct(s.z.cwiseProduct((1.0 - s.z.array()).matrix()));
    VectorXd da(3 * H), db(3 * H);
    da << dar, daz, dan;
    db << dar, daz, dan.cwiseProduct(s.r);
    gv->M(w.layout.gru_wx, 3 * H, kActFeatures) += da * xs[t].transpose();
    gv->V(w.layout.gru_bx, 3 * H) += da;
    gv->M(w.layout.gru_wh, 3 * H, H) += db * hs[t].transpose();
    gv->V(w.layout.gru_bh, 3 * H) += db;
    dh[t] += hn.cwiseProduct(s.z) + w.gru_wh().transpose() * db;
  }
  VectorXd dpre_g = dg.cwiseProduct((1.0 - g.array().square()).matrix());
  gv->M(w.layout.goal_w, G, kGoalFeatures) += dpre_g * xg.transpose();
  gv->V(w.layout.goal_b, G) += dpre_g;
  return total;
}

}  // namespace bargain
