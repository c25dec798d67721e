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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qstpinn/autodiff.hpp"
#include "qstpinn/dataset.hpp"
#include "qstpinn/nn.hpp"
#include "qstpinn/states.hpp"

namespace qst {

/// lambda(s) = lambda0 * max(0.5, 1 - alpha * s).
struct AdaptiveWeightConfig {
  double lambda0 = 0.15;
  double alpha = 0.5;

  void validate() const;
  friend bool operator==(const AdaptiveWeightConfig&, const AdaptiveWeightConfig&) = default;
};

inline constexpr double kLambdaFloor = 0.5;

double adaptive_lambda(double s, const AdaptiveWeightConfig& cfg);
/// B x 1 severities -> B x 1 weights. Unless `flow_through`, the result is a
/// constant on the tape.
Var adaptive_lambda(Var s, const AdaptiveWeightConfig& cfg, bool flow_through);

// Differentiable pieces of the parameter -> state map. Complex D x D matrices
// travel as B x 2D^2 rows: real parts row-major, then imaginary parts.

/// Softplus on the D diagonal entries of each flattened Cholesky row.
Var cholesky_transform(Var y, std::size_t dim);
/// Rows of transformed Cholesky parameters -> rows of L L^dagger.
Var gram(Var params, std::size_t dim);
/// G / Re Tr G per row. Throws DegenerateFactorError when a trace is below 1e-12.
Var trace_normalize(Var g, std::size_t dim);
/// Per-row (||M - M^dag||_F^2 + |Tr M - 1|^2 + max(0, -lambda_min)^2) / sqrt(D), B x 1.
Var physics_loss(Var m, std::size_t dim);

struct Reconstruction {
  Var params;  ///< transformed Cholesky parameters
  Var gram;    ///< L L^dagger
  Var rho;     ///< L L^dagger / Tr(L L^dagger)
};
Reconstruction reconstruct_differentiable(Var y, std::size_t dim);

/// Row `row` of a B x 2D^2 block as a complex matrix.
ComplexMatrix unpack_complex(const Matrix& m, Eigen::Index row, std::size_t dim);
Matrix pack_complex(const ComplexMatrix& c);

struct ModelOptions {
  /// Empty: default widths for the qubit count.
  std::vector<std::size_t> hidden_widths;
  Activation activation = Activation::GELU;
  bool residual = true;
  AttentionPlacement attention = AttentionPlacement::Final;
  bool aux_head = true;
  std::vector<double> dropout;
  AdaptiveWeightConfig weights;
};

/// Options for the unconstrained baseline: same trunk, no physics term, no severity head.
ModelOptions baseline_options(ModelOptions base = {});

class PinnModel {
 public:
  PinnModel(std::size_t dim, std::size_t input_dim, const ModelOptions& opts);
  PinnModel(std::size_t dim, MlpSpec spec, AdaptiveWeightConfig weights);

  std::size_t dim() const { return dim_; }
  Mlp& net() { return net_; }
  const MlpSpec& spec() const { return net_.spec(); }
  const AdaptiveWeightConfig& weights() const { return weights_; }
  bool has_severity_head() const { return net_.spec().aux_output; }
  bool physics_enabled() const { return weights_.lambda0 > 0.0; }
  void init(Rng& rng) { net_.init(rng); }

 private:
  std::size_t dim_;
  Mlp net_;
  AdaptiveWeightConfig weights_;
};

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double lr = 1.5e-3;
  double lr_min = 1e-5;
  std::size_t warmup_epochs = 5;
  double aux_weight = 0.1;
  AdamWConfig adam;
  std::uint64_t seed = 0;
  std::size_t eval_every = 1;
  /// Let gradients flow through lambda(s).
  bool lambda_flow_through = false;
  /// Evaluate constraints on L L^dagger before trace normalization.
  bool physics_on_raw = true;
  /// When set, a checkpoint is written here after every epoch.
  std::optional<std::filesystem::path> checkpoint_path;
  /// Return once this many epochs are complete; the schedule still spans `epochs`.
  std::optional<std::size_t> stop_after;

  void validate() const;
};

/// Learning rate 1e-3 variant used for the baseline network.
TrainConfig baseline_train_config(TrainConfig base = {});

struct Batch {
  Matrix x;         ///< B x d
  Matrix y;         ///< B x D^2
  Matrix severity;  ///< B x 1
};

Batch make_batch(const Dataset& ds, std::span<const std::size_t> indices);
Batch make_batch(const Dataset& ds);

struct LossTerms {
  Var total;
  double data = 0.0;
  double physics = 0.0;
  double aux = 0.0;
  double mean_lambda = 0.0;
};

/// Mean per-sample squared error on the Cholesky parameters, plus the
/// lambda-weighted mean constraint term, plus aux_weight times the severity MSE.
LossTerms total_loss(Tape& tape, PinnModel& model, const Batch& batch, const TrainConfig& cfg,
                     bool train, Rng* rng);

struct LevelStats {
  std::size_t n = 0;
  double fidelity_mean = 0.0;
  double fidelity_std = 0.0;
  double mean_lambda = 0.0;
};

struct EvalSummary {
  std::size_t n = 0;
  double fidelity_mean = 0.0;
  double fidelity_std = 0.0;
  /// Constraint violation of the normalized reconstruction.
  double violation_mean = 0.0;
  /// Constraint violation of L L^dagger before normalization.
  double raw_violation_mean = 0.0;
  /// Mean squared error per Cholesky parameter.
  double mse = 0.0;
  double severity_mae = 0.0;
  double mean_lambda = 0.0;
  std::vector<double> fidelities;
  std::map<double, LevelStats> per_level;
};

struct Prediction {
  Matrix params;     ///< transformed Cholesky parameters, N x D^2
  Matrix severity;   ///< N x 1, empty without a severity head
};

Prediction predict(PinnModel& model, const Matrix& features);
std::vector<DensityMatrix> reconstruct_states(const Prediction& pred, std::size_t dim);

EvalSummary evaluate(PinnModel& model, const Dataset& split);

struct HistoryRow {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double fidelity = 0.0;
  double violation = 0.0;
  double lr = 0.0;
  double mean_lambda = 0.0;
};

struct History {
  std::vector<HistoryRow> rows;
  std::string to_csv() const;
};

/// Initializes the model from cfg.seed (unless resuming), then trains.
/// `val` is optional; without it validation columns repeat the train loss and
/// the fidelity columns stay zero.
History train(PinnModel& model, const Dataset& train_split, const Dataset* val,
              const TrainConfig& cfg, const std::optional<std::filesystem::path>& resume = {});

/// Rebuilds a model from a checkpoint written by train().
PinnModel load_model(const std::filesystem::path& checkpoint);

}  // namespace qst
