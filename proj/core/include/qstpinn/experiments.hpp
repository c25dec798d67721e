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
#include <functional>
#include <string>
#include <vector>

#include "qstpinn/config.hpp"
#include "qstpinn/dataset.hpp"
#include "qstpinn/report.hpp"
#include "qstpinn/stats.hpp"

namespace qst {

/// Everything needed to synthesize one split.
struct SplitRequest {
  std::size_t dim = 4;
  std::vector<MeasurementSetting> settings;
  std::size_t count = 0;
  /// Each sample draws its noise level uniformly from this list.
  std::vector<double> levels = {0.0};
  std::vector<NoiseKind> kinds;
  std::size_t shots = 512;
  double gauss_sigma = 0.01;
  bool exact = false;
  std::uint64_t seed = 0;
  std::string split = "train";
};

/// Sample i uses Rng(seed ^ i): state family i mod 4 (GHZ, W, random pure,
/// random mixed; qubit-free families only for non-qubit dimensions), then
/// noise, then measurement. The target is the noiseless state.
Dataset generate_split(const SplitRequest& req);

struct DatasetPair {
  Dataset train;
  Dataset test;
};

/// Settings drawn once from `seed` and shared by both splits.
DatasetPair generate_datasets(const ExperimentConfig& cfg, std::size_t dim, std::vector<double> levels,
                              std::vector<NoiseKind> kinds, std::size_t n_train, std::size_t n_test,
                              std::uint64_t seed);

/// Writes `<dir>/train.{bin,json}` and `<dir>/test.{bin,json}`.
void save_dataset_pair(const DatasetPair& data, const std::filesystem::path& dir);

/// Dimensions the config sweeps over (qubit registers or generalized dims).
std::vector<std::size_t> experiment_dims(const ExperimentConfig& cfg);
/// Noise kinds usable at `dim`: only crosstalk acts on non-qubit dimensions.
std::vector<NoiseKind> usable_kinds(const std::vector<NoiseKind>& kinds, std::size_t dim);
/// Number of settings per sample at `dim` after defaults and capping.
std::size_t settings_for(const ExperimentConfig& cfg, std::size_t dim);

/// Metrics of one method on one test split.
struct MethodResult {
  double fidelity_mean = 0.0;
  double fidelity_std = 0.0;
  double violation_mean = 0.0;
  double raw_violation_mean = 0.0;
  double mse = 0.0;
  double mean_lambda = 0.0;
  double wall_time_s = 0.0;
  std::size_t n_test = 0;
  std::vector<double> fidelities;
  /// Predicted severities (PINN with a severity head only).
  std::vector<double> severities;
};

/// Trains (PINN/NN) or runs (LS/MLE) one method and evaluates on the test split.
MethodResult run_method(Method method, const ExperimentConfig& cfg, const DatasetPair& data,
                        const ModelOptions& model, std::uint64_t seed);

/// Runs fn(0..n-1) on `threads` workers (1 means inline). Exceptions propagate.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

/// Estimated peak bytes for training a model with the given spec on `n_train` samples.
double estimate_training_bytes(const MlpSpec& spec, std::size_t n_train, std::size_t batch);

/// Level-by-level comparison of method `a` against method `b` over report rows
/// of a single dimension and configuration.
struct SweepComparison {
  std::vector<double> levels;
  std::vector<double> delta;  ///< mean over seeds of F_a - F_b per level
  std::vector<MeanCi> delta_ci;
  std::vector<double> p_values;  ///< paired over seeds per level (1 with fewer than two seeds)
  LinearFit fit_a;
  LinearFit fit_b;
  double ratio = 1.0;      ///< |slope_b| / |slope_a|
  double p_overall = 1.0;  ///< paired over all (seed, level) cells
  std::size_t nonnegative_levels = 0;
};

/// Pairs only cells present for both methods. Needs at least two noise levels.
SweepComparison compare_sweep(const std::vector<ReportRow>& rows, const std::string& a, const std::string& b);

ExperimentReport run_monitoring(const ExperimentConfig& cfg);
ExperimentReport run_noise_robustness(const ExperimentConfig& cfg);
ExperimentReport run_scalability(const ExperimentConfig& cfg);
ExperimentReport run_ablation(const ExperimentConfig& cfg);
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Ablation configuration names in report order.
const std::vector<std::string>& ablation_names();

/// Moves wall times into a CSV (method,config,dim,noise_level,seed,wall_time_s)
/// and zeroes them in the report, so the report itself is reproducible.
std::string extract_timings(ExperimentReport& report);

}  // namespace qst
