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

#ifndef BARGAIN_CORPUS_H_
#define BARGAIN_CORPUS_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bargain/dialogue.h"

namespace bargain {

struct CorpusTurn {
  Role speaker = Role::kA;  // A is the line's author ("YOU"), B is "THEM"
  std::vector<std::string> tokens;

  std::string Text() const;
  bool IsSelection() const;
};

// One line of the corpus, seen from its author's side. The scenario's
// values_a come from the <input> block and values_b from <partner_input>.
struct CorpusRecord {
  Scenario scenario;
  std::vector<CorpusTurn> turns;
  std::optional<Division> output_a;
  std::optional<Division> output_b;
  bool no_agreement = false;
  bool disconnect = false;
  std::string raw_line;
  int line_number = 0;

  // Both sides selected items and the selections are complementary.
  bool Agreed() const;
};

struct ParseErrorEntry {
  int line_number = 0;
  std::string message;
};

struct DatasetParse {
  std::vector<CorpusRecord> records;
  std::vector<ParseErrorEntry> errors;
};

// Reads the corpus line format (see docs/corpus_format.md). Blank lines are
// skipped; every other malformed line becomes an error entry.
DatasetParse ParseDataset(std::istream& in);
// Throws IoError when the file cannot be read.
DatasetParse ParseDatasetFile(const std::filesystem::path& path);

// Inverse of ParseDataset for one record (canonical spacing).
std::string SerializeRecord(const CorpusRecord& r);

// Key shared by a line and its mirror image (the same dialogue written from
// the partner's side).
std::string DialogueKey(const CorpusRecord& r);
std::string ScenarioKey(const Scenario& s);

struct CorpusStats {
  int line_count = 0;
  int dialogue_count = 0;
  int unique_scenarios = 0;
  double agreement_rate = 0.0;
  double avg_turns = 0.0;
  double avg_words_per_turn = 0.0;
};

// Statistics over unique dialogues (mirror lines are counted once). Turns
// exclude the final selection token. Throws DomainError on empty input.
CorpusStats ComputeCorpusStats(std::span<const CorpusRecord> records);

struct ActExtraction {
  // One slot per turn; empty where the turn could not be mapped.
  std::vector<std::optional<DialogueAct>> acts;
  std::vector<int> failures;
  std::vector<std::string> notes;
  // Every turn mapped, the sequence is legal for an agent and ends in SELECT.
  bool complete = false;
};

ActExtraction ExtractActs(const CorpusRecord& record);

struct CoverageReport {
  int records = 0;
  int complete_records = 0;
  int turns = 0;
  int mapped_turns = 0;
  double turn_coverage() const {
    return turns == 0 ? 0.0 : static_cast<double>(mapped_turns) / turns;
  }
};

CoverageReport ExtractionCoverage(std::span<const CorpusRecord> records);

}  // namespace bargain

#endif  // BARGAIN_CORPUS_H_
