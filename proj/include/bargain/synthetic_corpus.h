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

#ifndef BARGAIN_SYNTHETIC_CORPUS_H_
#define BARGAIN_SYNTHETIC_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "bargain/scenario.h"

namespace bargain {

// Generates dialogues in the corpus line format between simulated human
// negotiators. Used when the published corpus is not available, and as a
// test fixture. Each dialogue is written twice, once from each side.
struct SyntheticCorpusOptions {
  int dialogues = 5808;
  int unique_scenarios = 2236;
  uint64_t seed = 7;
  PoolStats pool = PoolStats::Default();
  double train_fraction = 0.8;
  double valid_fraction = 0.1;
};

struct SyntheticCorpus {
  std::vector<std::string> train;
  std::vector<std::string> valid;
  std::vector<std::string> test;
};

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticCorpusOptions& options);

}  // namespace bargain

#endif  // BARGAIN_SYNTHETIC_CORPUS_H_
