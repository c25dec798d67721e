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


#include "qstpinn/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qstpinn/errors.hpp"

namespace qst {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::ReLU: return "relu";
    case Activation::GELU: return "gelu";
    case Activation::SiLU: return "silu";
  }
  return "unknown";
}

Activation activation_from_string(const std::string& s) {
  for (auto a : {Activation::ReLU, Activation::GELU, Activation::SiLU}) {
    if (to_string(a) == s) return a;
  }
  throw ConfigError("unknown activation '" + s + "'");
}

Var activate(Var x, Activation a) {
  switch (a) {
    case Activation::ReLU: return relu(x);
    case Activation::GELU: return gelu(x);
    case Activation::SiLU: return silu(x);
  }
  return x;
}

Linear::Linear(std::string name, std::size_t in, std::size_t out, bool bias) {
  if (in == 0 || out == 0) throw ShapeError("Linear: dimensions must be positive");
  weight.name = name + ".weight";
  weight.value = Matrix::Zero(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out));
  weight.zero_grad();
  if (bias) {
    bias_ = Parameter{name + ".bias", Matrix::Zero(1, static_cast<Eigen::Index>(out)), {}};
    bias_->zero_grad();
  }
}

void Linear::init(Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(weight.value.rows()));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (Eigen::Index i = 0; i < weight.value.size(); ++i) weight.value.data()[i] = u(rng);
  if (bias_) bias_->value.setZero();
}

Var Linear::forward(Tape& tape, Var x) {
  Var y = matmul(x, tape.parameter(weight));
  if (bias_) y = add_row(y, tape.parameter(*bias_));
  return y;
}

void Linear::collect(std::vector<Parameter*>& out) {
  out.push_back(&weight);
  if (bias_) out.push_back(&*bias_);
}

ResidualBlock::ResidualBlock(std::string name, std::size_t in, std::size_t out, Activation act,
                             double dropout, bool residual)
    : fc_(name + ".fc", in, out), act_(act), dropout_(dropout), residual_(residual) {
  if (residual && in != out) proj_.emplace(name + ".proj", in, out, false);
}

void ResidualBlock::init(Rng& rng) {
  fc_.init(rng);
  if (proj_) proj_->init(rng);
}

Var ResidualBlock::forward(Tape& tape, Var h, bool train, Rng* rng) {
  Var y = activate(fc_.forward(tape, h), act_);
  if (train && dropout_ > 0.0) {
    if (rng == nullptr) throw Error("ResidualBlock: training forward needs an rng");
    y = qst::dropout(y, dropout_, *rng);
  }
  if (!residual_) return y;
  return add(y, proj_ ? proj_->forward(tape, h) : h);
}

void ResidualBlock::collect(std::vector<Parameter*>& out) {
  fc_.collect(out);
  if (proj_) proj_->collect(out);
}

std::size_t AttentionGate::bottleneck(std::size_t width) { return std::max<std::size_t>(8, width / 4); }

AttentionGate::AttentionGate(std::string name, std::size_t width)
    : w1(name + ".w1", width, bottleneck(width), false),
      w2(name + ".w2", bottleneck(width), width, false) {}

void AttentionGate::init(Rng& rng) {
  w1.init(rng);
  w2.init(rng);
}

Var AttentionGate::forward(Tape& tape, Var h) {
  Var a = sigmoid(w2.forward(tape, relu(w1.forward(tape, h))));
  return mul(h, a);
}

void AttentionGate::collect(std::vector<Parameter*>& out) {
  w1.collect(out);
  w2.collect(out);
}

double MlpSpec::dropout_for(std::size_t layer) const {
  if (!dropout.empty()) return dropout.at(layer);
  return hidden_widths.at(layer) >= 256 ? 0.1 : 0.05;
}

void MlpSpec::validate() const {
  if (input_dim == 0 || output_dim == 0) throw ConfigError("MlpSpec: dimensions must be positive");
  if (hidden_widths.empty()) throw ConfigError("MlpSpec: at least one hidden layer is required");
  for (auto w : hidden_widths) {
    if (w == 0) throw ConfigError("MlpSpec: hidden widths must be positive");
  }
  if (!dropout.empty() && dropout.size() != hidden_widths.size()) {
    throw ConfigError("MlpSpec: dropout list must match hidden_widths");
  }
  for (std::size_t i = 0; i < hidden_widths.size(); ++i) {
    const double p = dropout_for(i);
    if (!(p >= 0.0 && p < 1.0)) throw ConfigError("MlpSpec: dropout must lie in [0, 1)");
  }
}

std::vector<std::size_t> default_hidden_widths(std::size_t n_qubits) {
  if (n_qubits <= 3) return {512, 512, 256};
  return {1024, 1024, 512};
}

Mlp::Mlp(MlpSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  std::size_t in = spec_.input_dim;
  for (std::size_t i = 0; i < spec_.hidden_widths.size(); ++i) {
    const std::size_t out = spec_.hidden_widths[i];
    const std::string name = "block" + std::to_string(i);
    blocks_.emplace_back(name, in, out, spec_.activation, spec_.dropout_for(i), spec_.residual);
    const bool last = i + 1 == spec_.hidden_widths.size();
    if (spec_.attention == AttentionPlacement::PerBlock ||
        (spec_.attention == AttentionPlacement::Final && last)) {
      gates_.emplace_back(name + ".attn", out);
    }
    in = out;
  }
  head_ = Linear("head", in, spec_.output_dim);
  if (spec_.aux_output) aux_.emplace("aux", in, 1);
}

void Mlp::init(Rng& rng) {
  for (auto& b : blocks_) b.init(rng);
  for (auto& g : gates_) g.init(rng);
  head_.init(rng);
  if (aux_) aux_->init(rng);
}

Mlp::Output Mlp::forward(Tape& tape, Var x, bool train, Rng* rng) {
  if (static_cast<std::size_t>(x.cols()) != spec_.input_dim) {
    throw ShapeError("Mlp: expected " + std::to_string(spec_.input_dim) + " input features, got " +
                     std::to_string(x.cols()));
  }
  Var h = x;
  std::size_t gate = 0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    h = blocks_[i].forward(tape, h, train, rng);
    const bool last = i + 1 == blocks_.size();
    if (spec_.attention == AttentionPlacement::PerBlock ||
        (spec_.attention == AttentionPlacement::Final && last)) {
      h = gates_[gate++].forward(tape, h);
    }
  }
  Output out{head_.forward(tape, h), std::nullopt};
  if (aux_) out.severity = sigmoid(aux_->forward(tape, h));
  return out;
}

std::vector<Parameter*> Mlp::parameters() {
  std::vector<Parameter*> out;
  for (auto& b : blocks_) b.collect(out);
  for (auto& g : gates_) g.collect(out);
  head_.collect(out);
  if (aux_) aux_->collect(out);
  return out;
}

std::size_t Mlp::parameter_count() {
  std::size_t n = 0;
  for (auto* p : parameters()) n += p->size();
  return n;
}

double global_grad_norm(const std::vector<Parameter*>& params) {
  double sq = 0.0;
  for (auto* p : params) sq += p->grad.squaredNorm();
  return std::sqrt(sq);
}

double clip_grad_norm(const std::vector<Parameter*>& params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (auto* p : params) p->grad *= s;
  }
  return norm;
}

AdamW::AdamW(AdamWConfig cfg, const std::vector<Parameter*>& params) : cfg_(cfg) {
  for (auto* p : params) {
    m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

double AdamW::step(const std::vector<Parameter*>& params, double lr) {
  if (params.size() != m_.size()) throw ShapeError("AdamW: parameter list changed size");
  for (auto* p : params) {
    if (p->grad.rows() != p->value.rows() || p->grad.cols() != p->value.cols()) p->zero_grad();
    if (!p->grad.allFinite()) {
      throw TrainingDivergedError("non-finite gradient in parameter '" + p->name + "' at step " +
                                  std::to_string(t_ + 1));
    }
  }
  const double norm = clip_grad_norm(params, cfg_.clip_norm);
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    if (m_[i].rows() != p.value.rows() || m_[i].cols() != p.value.cols()) {
      throw ShapeError("AdamW: moment shape mismatch for '" + p.name + "'");
    }
    if (cfg_.weight_decay > 0.0) p.value *= (1.0 - lr * cfg_.weight_decay);
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * p.grad;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= lr * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + cfg_.eps);
  }
  return norm;
}

double cosine_lr(double t, double T, double eta_max, double eta_min) {
  if (T <= 0.0) return eta_max;
  t = std::clamp(t, 0.0, T);
  return eta_min + (eta_max - eta_min) * 0.5 * (1.0 + std::cos(std::numbers::pi * t / T));
}

double LrSchedule::at(std::size_t epoch, double progress) const {
  const std::size_t warm = std::min(warmup_epochs, total_epochs);
  if (epoch < warm) {
    return eta_max * (static_cast<double>(epoch) + progress) / static_cast<double>(warm);
  }
  return cosine_lr(static_cast<double>(epoch - warm), static_cast<double>(total_epochs - warm),
                   eta_max, eta_min);
}

}  // namespace qst
