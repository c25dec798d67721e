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
#include <optional>
#include <string>
#include <vector>

#include "qstpinn/autodiff.hpp"
#include "qstpinn/rng.hpp"

namespace qst {

enum class Activation { ReLU, GELU, SiLU };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);
Var activate(Var x, Activation a);

/// y = x W + b with W stored as (in x out).
class Linear {
 public:
  Linear() = default;
  Linear(std::string name, std::size_t in, std::size_t out, bool bias = true);

  /// Kaiming-uniform weights (bound sqrt(6 / fan_in)), zero bias.
  void init(Rng& rng);
  Var forward(Tape& tape, Var x);

  std::size_t in_features() const { return static_cast<std::size_t>(weight.value.rows()); }
  std::size_t out_features() const { return static_cast<std::size_t>(weight.value.cols()); }
  bool has_bias() const { return bias_.has_value(); }
  void collect(std::vector<Parameter*>& out);

  Parameter weight;

 private:
  std::optional<Parameter> bias_;
};

/// dropout(act(W h + b)) + Proj(h). Proj is the identity when widths match and
/// a bias-free learned map otherwise; with `residual` off only the first term remains.
class ResidualBlock {
 public:
  ResidualBlock() = default;
  ResidualBlock(std::string name, std::size_t in, std::size_t out, Activation act, double dropout,
                bool residual);

  void init(Rng& rng);
  Var forward(Tape& tape, Var h, bool train, Rng* rng);
  bool has_projection() const { return proj_.has_value(); }
  double dropout() const { return dropout_; }
  void collect(std::vector<Parameter*>& out);

 private:
  Linear fc_;
  std::optional<Linear> proj_;
  Activation act_ = Activation::GELU;
  double dropout_ = 0.0;
  bool residual_ = true;
};

/// h * sigmoid(relu(h W1) W2), bias free, bottleneck k = max(8, width / 4).
class AttentionGate {
 public:
  AttentionGate() = default;
  AttentionGate(std::string name, std::size_t width);

  static std::size_t bottleneck(std::size_t width);
  void init(Rng& rng);
  Var forward(Tape& tape, Var h);
  void collect(std::vector<Parameter*>& out);

  Linear w1;
  Linear w2;
};

enum class AttentionPlacement { None, Final, PerBlock };

struct MlpSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_widths;
  std::size_t output_dim = 0;
  bool aux_output = true;
  Activation activation = Activation::GELU;
  bool residual = true;
  AttentionPlacement attention = AttentionPlacement::Final;
  /// Per-layer dropout; empty means 0.1 for widths >= 256 and 0.05 below.
  std::vector<double> dropout;

  double dropout_for(std::size_t layer) const;
  void validate() const;
  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

/// Default hidden widths per qubit count.
std::vector<std::size_t> default_hidden_widths(std::size_t n_qubits);

/// Residual trunk, optional attention, main head and optional sigmoid severity head.
class Mlp {
 public:
  struct Output {
    Var main;
    std::optional<Var> severity;  ///< B x 1, in (0, 1)
  };

  Mlp() = default;
  explicit Mlp(MlpSpec spec);

  void init(Rng& rng);
  /// `rng` drives dropout and is only read when `train` is true.
  Output forward(Tape& tape, Var x, bool train, Rng* rng);

  const MlpSpec& spec() const { return spec_; }
  std::vector<Parameter*> parameters();
  std::size_t parameter_count();

 private:
  MlpSpec spec_;
  std::vector<ResidualBlock> blocks_;
  std::vector<AttentionGate> gates_;
  Linear head_;
  std::optional<Linear> aux_;
};

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
  /// Global L2 clip threshold; <= 0 disables clipping.
  double clip_norm = 3.0;
};

/// AdamW: global-norm clip, decoupled weight decay, Adam update with bias correction.
class AdamW {
 public:
  AdamW() = default;
  AdamW(AdamWConfig cfg, const std::vector<Parameter*>& params);

  /// Applies one update using each parameter's grad. Returns the pre-clip
  /// global gradient norm. Throws TrainingDivergedError on non-finite grads.
  double step(const std::vector<Parameter*>& params, double lr);

  const AdamWConfig& config() const { return cfg_; }
  std::uint64_t steps() const { return t_; }
  std::vector<Matrix>& first_moments() { return m_; }
  std::vector<Matrix>& second_moments() { return v_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }
  void set_steps(std::uint64_t t) { t_ = t; }

 private:
  AdamWConfig cfg_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::uint64_t t_ = 0;
};

/// Global L2 norm of all parameter gradients.
double global_grad_norm(const std::vector<Parameter*>& params);
/// Rescales all grads so the global norm is at most `max_norm`; returns the pre-clip norm.
double clip_grad_norm(const std::vector<Parameter*>& params, double max_norm);

/// Linear warmup then cosine annealing.
struct LrSchedule {
  double eta_max = 1.5e-3;
  double eta_min = 1e-5;
  std::size_t warmup_epochs = 5;
  std::size_t total_epochs = 1;

  /// `progress` in (0, 1] is the fraction of `epoch` completed after the current step.
  double at(std::size_t epoch, double progress = 0.0) const;
};

/// eta_min + (eta_max - eta_min) (1 + cos(pi t / T)) / 2.
double cosine_lr(double t, double T, double eta_max, double eta_min);

}  // namespace qst
