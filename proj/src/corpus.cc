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

#include "bargain/corpus.h"

#include <fstream>
#include <istream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include "bargain/errors.h"
#include "bargain/surface.h"

namespace bargain {
namespace {

constexpr const char* kSelectionToken = "<selection>";

bool ParseInt(const std::string& s, int* out) {
  if (s.empty()) return false;
  size_t pos = 0;
  try {
    *out = std::stoi(s, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size();
}

// Reads tokens up to `close`, advancing i past it.
bool ReadBlock(const std::vector<std::string>& tokens, size_t* i,
               const std::string& close, std::vector<std::string>* out) {
  while (*i < tokens.size() && tokens[*i] != close) out->push_back(tokens[(*i)++]);
  if (*i >= tokens.size()) return false;
  ++*i;
  return true;
}

bool ParseInputBlock(const std::vector<std::string>& block, IssueVector* counts,
                     IssueVector* values, std::string* error) {
  if (block.size() != 2 * kNumIssues) {
    *error = "expected 6 integers in input block, found " +
             std::to_string(block.size());
    return false;
  }
  for (int k = 0; k < kNumIssues; ++k) {
    if (!ParseInt(block[2 * k], &(*counts)[k]) ||
        !ParseInt(block[2 * k + 1], &(*values)[k])) {
      *error = "non-integer in input block";
      return false;
    }
  }
  return true;
}

bool ParseOutputBlock(const std::vector<std::string>& block, CorpusRecord* r,
                      std::string* error) {
  if (block.size() != 2 * kNumIssues) {
    *error = "expected 6 entries in output block, found " +
             std::to_string(block.size());
    return false;
  }
  int no_agreement = 0;
  int disconnect = 0;
  for (const auto& t : block) {
    no_agreement += t == "<no_agreement>";
    disconnect += t == "<disconnect>";
  }
  if (no_agreement == 2 * kNumIssues) {
    r->no_agreement = true;
    return true;
  }
  if (disconnect == 2 * kNumIssues) {
    r->disconnect = true;
    return true;
  }
  if (no_agreement + disconnect > 0) {
    *error = "mixed markers in output block";
    return false;
  }
  Division mine;
  Division theirs;
  for (int i = 0; i < 2 * kNumIssues; ++i) {
    const std::string& t = block[i];
    const std::string prefix = "item" + std::to_string(i % kNumIssues) + "=";
    int q = 0;
    if (t.rfind(prefix, 0) != 0 || !ParseInt(t.substr(prefix.size()), &q)) {
      *error = "malformed output entry '" + t + "'";
      return false;
    }
    (i < kNumIssues ? mine : theirs).take[i % kNumIssues] = q;
  }
  r->output_a = mine;
  r->output_b = theirs;
  return true;
}

bool ParseDialogueBlock(const std::vector<std::string>& block, CorpusRecord* r,
                        std::string* error) {
  std::optional<CorpusTurn> current;
  auto flush = [&] {
    if (current) r->turns.push_back(std::move(*current));
    current.reset();
  };
  for (const std::string& t : block) {
    if (t == "YOU:" || t == "THEM:") {
      flush();
      current = CorpusTurn{t == "YOU:" ? Role::kA : Role::kB, {}};
    } else if (t == "<eos>") {
      if (!current) {
        *error = "<eos> outside a turn";
        return false;
      }
      flush();
    } else {
      if (!current) {
        *error = "dialogue token before any speaker tag";
        return false;
      }
      current->tokens.push_back(t);
    }
  }
  flush();
  for (size_t i = 1; i < r->turns.size(); ++i) {
    if (r->turns[i].speaker == r->turns[i - 1].speaker) {
      *error = "speaker tags do not alternate at turn " + std::to_string(i);
      return false;
    }
  }
  return true;
}

bool ParseLine(const std::string& line, CorpusRecord* r, std::string* error) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  bool have_input = false, have_dialogue = false, have_output = false,
       have_partner = false;
  IssueVector counts_a{}, counts_b{};
  size_t i = 0;
  while (i < tokens.size()) {
    const std::string tag = tokens[i++];
    std::vector<std::string> block;
    if (tag == "<input>") {
      if (!ReadBlock(tokens, &i, "</input>", &block)) {
        *error = "unterminated <input>";
        return false;
      }
      if (!ParseInputBlock(block, &counts_a, &r->scenario.values_a, error)) {
        return false;
      }
      have_input = true;
    } else if (tag == "<partner_input>") {
      if (!ReadBlock(tokens, &i, "</partner_input>", &block)) {
        *error = "unterminated <partner_input>";
        return false;
      }
      if (!ParseInputBlock(block, &counts_b, &r->scenario.values_b, error)) {
        return false;
      }
      have_partner = true;
    } else if (tag == "<dialogue>") {
      if (!ReadBlock(tokens, &i, "</dialogue>", &block)) {
        *error = "unterminated <dialogue>";
        return false;
      }
      if (!ParseDialogueBlock(block, r, error)) return false;
      have_dialogue = true;
    } else if (tag == "<output>") {
      if (!ReadBlock(tokens, &i, "</output>", &block)) {
        *error = "unterminated <output>";
        return false;
      }
      if (!ParseOutputBlock(block, r, error)) return false;
      have_output = true;
    } else {
      *error = "unexpected token '" + tag + "' outside blocks";
      return false;
    }
  }
  if (!have_input || !have_dialogue || !have_output || !have_partner) {
    *error = "missing block(s):";
    if (!have_input) *error += " <input>";
    if (!have_dialogue) *error += " <dialogue>";
    if (!have_output) *error += " <output>";
    if (!have_partner) *error += " <partner_input>";
    return false;
  }
  if (counts_a != counts_b) {
    *error = "input and partner_input disagree on counts";
    return false;
  }
  r->scenario.counts = counts_a;
  const auto violations = ValidateScenario(r->scenario);
  if (!violations.empty()) {
    *error = "invalid scenario: " + violations[0];
    return false;
  }
  for (const auto* d : {&r->output_a, &r->output_b}) {
    if (*d && !IsFeasible(**d, r->scenario.counts)) {
      *error = "output selection exceeds counts";
      return false;
    }
  }
  r->scenario.id = ScenarioKey(r->scenario);
  return true;
}

std::string InputBlock(const IssueVector& counts, const IssueVector& values) {
  std::string s;
  for (int k = 0; k < kNumIssues; ++k) {
    s += std::to_string(counts[k]) + " " + std::to_string(values[k]) + " ";
  }
  return s;
}

std::string OrientedDialogue(const CorpusRecord& r, bool swap) {
  const IssueVector& va = swap ? r.scenario.values_b : r.scenario.values_a;
  const IssueVector& vb = swap ? r.scenario.values_a : r.scenario.values_b;
  std::string s = InputBlock(r.scenario.counts, va) + "| " +
                  InputBlock(r.scenario.counts, vb) + "|";
  for (const CorpusTurn& t : r.turns) {
    const bool first = (t.speaker == Role::kA) != swap;
    s += first ? " 0:" : " 1:";
    for (const auto& w : t.tokens) s += " " + w;
  }
  return s;
}

}  // namespace

std::string CorpusTurn::Text() const {
  std::string s;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) s += ' ';
    s += tokens[i];
  }
  return s;
}

bool CorpusTurn::IsSelection() const {
  for (const auto& t : tokens) {
    if (t == kSelectionToken) return true;
  }
  return false;
}

bool CorpusRecord::Agreed() const {
  if (!output_a || !output_b || no_agreement || disconnect) return false;
  for (int k = 0; k < kNumIssues; ++k) {
    if (output_a->take[k] + output_b->take[k] != scenario.counts[k]) return false;
  }
  return true;
}

DatasetParse ParseDataset(std::istream& in) {
  DatasetParse result;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    CorpusRecord r;
    std::string error;
    if (ParseLine(line, &r, &error)) {
      r.raw_line = line;
      r.line_number = line_number;
      result.records.push_back(std::move(r));
    } else {
      result.errors.push_back({line_number, error});
    }
  }
  if (in.bad()) throw IoError("ParseDataset: read error");
  return result;
}

DatasetParse ParseDatasetFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  return ParseDataset(in);
}

std::string SerializeRecord(const CorpusRecord& r) {
  std::string s = "<input> " + InputBlock(r.scenario.counts, r.scenario.values_a) +
                  "</input> <dialogue>";
  for (const CorpusTurn& t : r.turns) {
    s += t.speaker == Role::kA ? " YOU:" : " THEM:";
    for (const auto& w : t.tokens) s += " " + w;
    if (!t.IsSelection()) s += " <eos>";
  }
  s += " </dialogue> <output>";
  if (r.no_agreement || r.disconnect || !r.output_a || !r.output_b) {
    const char* marker = r.disconnect ? " <disconnect>" : " <no_agreement>";
    for (int i = 0; i < 2 * kNumIssues; ++i) s += marker;
  } else {
    for (const Division* d : {&*r.output_a, &*r.output_b}) {
      for (int k = 0; k < kNumIssues; ++k) {
        s += " item" + std::to_string(k) + "=" + std::to_string(d->take[k]);
      }
    }
  }
  s += " </output> <partner_input> " +
       InputBlock(r.scenario.counts, r.scenario.values_b) + "</partner_input>";
  return s;
}

std::string ScenarioKey(const Scenario& s) {
  const std::string a = InputBlock(s.counts, s.values_a) + "|" +
                        InputBlock(s.counts, s.values_b);
  const std::string b = InputBlock(s.counts, s.values_b) + "|" +
                        InputBlock(s.counts, s.values_a);
  return std::min(a, b);
}

std::string DialogueKey(const CorpusRecord& r) {
  return std::min(OrientedDialogue(r, false), OrientedDialogue(r, true));
}

CorpusStats ComputeCorpusStats(std::span<const CorpusRecord> records) {
  if (records.empty()) throw DomainError("ComputeCorpusStats: empty corpus");
  CorpusStats stats;
  stats.line_count = static_cast<int>(records.size());
  std::set<std::string> dialogues;
  std::set<std::string> scenarios;
  long agreed = 0;
  long turns = 0;
  long words = 0;
  for (const CorpusRecord& r : records) {
    scenarios.insert(ScenarioKey(r.scenario));
    if (!dialogues.insert(DialogueKey(r)).second) continue;
    agreed += r.Agreed();
    for (const CorpusTurn& t : r.turns) {
      if (t.IsSelection()) continue;
      ++turns;
      words += static_cast<long>(t.tokens.size());
    }
  }
  stats.dialogue_count = static_cast<int>(dialogues.size());
  stats.unique_scenarios = static_cast<int>(scenarios.size());
  stats.agreement_rate = static_cast<double>(agreed) / stats.dialogue_count;
  stats.avg_turns = static_cast<double>(turns) / stats.dialogue_count;
  stats.avg_words_per_turn =
      turns == 0 ? 0.0 : static_cast<double>(words) / turns;
  return stats;
}

ActExtraction ExtractActs(const CorpusRecord& record) {
  ActExtraction out;
  out.acts.resize(record.turns.size());
  for (size_t i = 0; i < record.turns.size(); ++i) {
    const CorpusTurn& turn = record.turns[i];
    const OfferParse p =
        ParseUtterance(turn.Text(), record.scenario, turn.speaker);
    if (p.status == ParseStatus::kParsed && p.act->kind != ActKind::kWalkaway) {
      out.acts[i] = p.act;
    } else {
      out.failures.push_back(static_cast<int>(i));
      out.notes.push_back("turn " + std::to_string(i) + ": " +
                          ParseStatusName(p.status) + " (" + p.notes + ")");
    }
  }
  if (!out.failures.empty() || record.turns.empty()) return out;

  DialogueState state =
      DialogueState::Start(record.scenario, record.turns.front().speaker);
  for (size_t i = 0; i < out.acts.size(); ++i) {
    const DialogueAct& act = *out.acts[i];
    if (!AgentLegalActs(state).Allows(act.kind)) {
      out.failures.push_back(static_cast<int>(i));
      out.notes.push_back("turn " + std::to_string(i) + ": " +
                          ActKindName(act.kind) + " not legal here");
      return out;
    }
    state = ApplyAct(state, act, std::numeric_limits<int>::max());
  }
  out.complete = out.acts.back()->kind == ActKind::kSelect;
  if (!out.complete) out.notes.push_back("dialogue does not end in selection");
  return out;
}

CoverageReport ExtractionCoverage(std::span<const CorpusRecord> records) {
  CoverageReport report;
  for (const CorpusRecord& r : records) {
    const ActExtraction e = ExtractActs(r);
    ++report.records;
    report.complete_records += e.complete;
    report.turns += static_cast<int>(r.turns.size());
    for (const auto& a : e.acts) report.mapped_turns += a.has_value();
  }
  return report;
}

}  // namespace bargain
