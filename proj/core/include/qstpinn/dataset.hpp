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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qstpinn/measurement.hpp"
#include "qstpinn/noise.hpp"

namespace qst {

/// Generation metadata carried in the manifest next to the binary payload.
struct DatasetMeta {
  std::string split = "train";
  std::size_t shots = 512;
  double gauss_sigma = 0.01;
  std::vector<double> noise_grid;
  std::vector<NoiseKind> noise_kinds;
  std::uint64_t seed = 0;
  bool exact = false;
  /// Non-qubit dimension measured in the Gell-Mann basis.
  bool generalized = false;

  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

/// A split of measurement records sharing one ordered settings list.
struct Dataset {
  std::size_t dim = 0;
  std::vector<MeasurementSetting> settings;
  std::vector<MeasurementRecord> records;
  DatasetMeta meta;

  std::size_t size() const { return records.size(); }
  std::size_t feature_dim() const { return settings.size(); }
  std::size_t param_dim() const { return dim * dim; }

  /// Throws DatasetError when a record disagrees with the shared settings or sizes.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Writes `<stem>.bin` (little-endian records) and `<stem>.json` (manifest).
void save_dataset(const Dataset& ds, const std::filesystem::path& stem);
Dataset load_dataset(const std::filesystem::path& stem);

/// Row-major (records x settings) feature block.
std::vector<double> feature_matrix(const Dataset& ds);
/// Row-major (records x D^2) Cholesky targets.
std::vector<double> target_matrix(const Dataset& ds);

}  // namespace qst
