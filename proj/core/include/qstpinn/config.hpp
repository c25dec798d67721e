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

#include "qstpinn/classical.hpp"
#include "qstpinn/measurement.hpp"
#include "qstpinn/noise.hpp"
#include "qstpinn/pinn.hpp"

namespace qst {

enum class ExperimentKind { Monitor, NoiseRobustness, Scalability, Ablation };
enum class Method { PINN, NN, LS, MLE };
/// AllChannels: every sample passes through the full channel list.
/// PerChannel: one sweep per channel kind.
enum class NoiseMode { AllChannels, PerChannel };

std::string to_string(ExperimentKind k);
std::string to_string(Method m);
std::string to_string(NoiseMode m);
ExperimentKind experiment_kind_from_string(const std::string& s);
Method method_from_string(const std::string& s);
NoiseMode noise_mode_from_string(const std::string& s);

inline const std::vector<double> kDefaultNoiseGrid = {0.02, 0.05, 0.10, 0.15, 0.19};

struct DataConfig {
  /// Settings per sample; 0 picks the default for the qubit count.
  std::size_t settings = 0;
  std::size_t shots = 512;
  double gauss_sigma = 0.01;
  /// 0 picks the experiment's default split sizes.
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::vector<double> noise_grid = kDefaultNoiseGrid;
  std::vector<NoiseKind> noise_kinds{kAllNoiseKinds.begin(), kAllNoiseKinds.end()};
  NoiseMode noise_mode = NoiseMode::AllChannels;
  bool exact = false;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Scalability;
  std::vector<std::size_t> qubit_grid = {2};
  /// Non-qubit dimensions (Gell-Mann basis); used instead of qubit_grid when nonempty.
  std::vector<std::size_t> dim_grid;
  DataConfig data;
  std::vector<Method> methods = {Method::PINN, Method::NN};
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  TrainConfig train;
  /// Learning rate of the NN baseline.
  double baseline_lr = 1e-3;
  ModelOptions model;
  MleConfig mle;
  double severity_threshold = 0.7;
  double fidelity_threshold = 0.85;
  /// Ablation configuration names; empty runs all seven.
  std::vector<std::string> ablation_configs;
  std::size_t threads = 1;
  /// Forces one worker and zeroes wall times in the report.
  bool single_thread = false;
  bool paper_scale = false;
  double memory_cap_gb = 4.0;
  std::filesystem::path out_dir = "out";

  void validate() const;
};

/// Desk-scale defaults for an experiment kind.
ExperimentConfig default_config(ExperimentKind kind);

/// Paper-scale split sizes for a qubit count and experiment kind.
std::pair<std::size_t, std::size_t> paper_split(ExperimentKind kind, std::size_t n_qubits);
/// Desk scale divides the paper's split sizes by five.
std::pair<std::size_t, std::size_t> default_split(const ExperimentConfig& cfg, std::size_t n_qubits);
/// Default settings count for a qubit count, capped at 4^n - 1.
std::size_t default_settings(std::size_t n_qubits);

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace qst
