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

#ifndef BARGAIN_CHECKPOINT_H_
#define BARGAIN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "bargain/policy.h"

namespace bargain {

inline constexpr const char* kCheckpointSchema = "bargain.checkpoint/1";

struct Provenance {
  std::string name;     // e.g. "S" or "M-selfish-S"
  int stage = 1;
  std::string reward;   // reward preset name, empty for the supervised model
  std::string partner;  // training partner name, empty for stage 1
  uint64_t seed = 0;
  std::string init_hash;
  std::string partner_hash;
  std::string config_hash;
  bool operator==(const Provenance&) const = default;
};

struct Checkpoint {
  PolicyParameters params;
  Provenance provenance;
};

nlohmann::json CheckpointToJson(const Checkpoint& c);
// Throws IntegrityError when the stored hash does not match the parameters
// and DataError on a malformed document.
Checkpoint CheckpointFromJson(const nlohmann::json& j);

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& c);
// Throws IoError when the file cannot be read.
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace bargain

#endif  // BARGAIN_CHECKPOINT_H_
