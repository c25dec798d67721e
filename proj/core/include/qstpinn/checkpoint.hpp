// Copyright 2026 The qstpinn Authors
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


#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qstpinn/nn.hpp"
#include "qstpinn/rng.hpp"

namespace qst {

/// Everything needed to resume training bit-exactly at an epoch boundary.
struct Checkpoint {
  MlpSpec spec;
  std::vector<std::string> names;
  std::vector<Matrix> params;
  AdamWConfig adam;
  std::uint64_t adam_steps = 0;
  std::vector<Matrix> first_moments;
  std::vector<Matrix> second_moments;
  Rng::State rng{};
  /// Number of completed epochs.
  std::uint64_t epoch = 0;
  /// Free-form JSON owned by the caller (model config, history, ...).
  std::string extra;
};

Checkpoint capture_checkpoint(Mlp& net, const AdamW& opt, const Rng& rng, std::uint64_t epoch,
                              std::string extra = "{}");
/// Copies parameters and optimizer state back; the network must have been
/// built from `ck.spec`.
void restore_checkpoint(const Checkpoint& ck, Mlp& net, AdamW& opt, Rng& rng);

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace qst
