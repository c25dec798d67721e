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


#include <gtest/gtest.h>

#include <cmath>

#include "qstpinn/errors.hpp"
#include "qstpinn/nn.hpp"
#include "test_util.hpp"

namespace qst {
namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(gen);
  return m;
}

void zero_all(std::vector<Parameter*>& ps) {
  for (auto* p : ps) p->value.setZero();
}

double loss_of(Tape& tape, Var out, const Matrix& w) { return sum(mul(out, tape.constant(w))).value()(0, 0); }

TEST(Linear, IdentityAndBias) {
  Linear lin("l", 3, 3);
  std::vector<Parameter*> ps;
  lin.collect(ps);
  ASSERT_EQ(ps.size(), 2u);
  ps[0]->value = Matrix::Identity(3, 3);
  ps[1]->value.setZero();
  const Matrix x = random_matrix(4, 3, 1);
  Tape t;
  EXPECT_TRUE(lin.forward(t, t.constant(x)).value().isApprox(x));
  ps[1]->value = random_matrix(1, 3, 2);
  Tape t2;
  const Matrix y = lin.forward(t2, t2.constant(Matrix::Zero(1, 3))).value();
  EXPECT_TRUE(y.isApprox(ps[1]->value));
  for (auto* p : ps) p->zero_grad();
  Tape t3;
  t3.backward(sum(lin.forward(t3, t3.constant(random_matrix(1, 3, 3)))));
  EXPECT_TRUE(ps[1]->grad.isApprox(Matrix::Ones(1, 3)));
  EXPECT_FALSE(Linear("n", 3, 2, false).has_bias());
}

TEST(Linear, KaimingUniformRange) {
  Linear lin("l", 64, 32);
  Rng rng(1);
  lin.init(rng);
  const double bound = std::sqrt(6.0 / 64.0);
  EXPECT_LE(lin.weight.value.cwiseAbs().maxCoeff(), bound);
  EXPECT_GT(lin.weight.value.cwiseAbs().maxCoeff(), 0.8 * bound);
}

TEST(ResidualBlock, ZeroWeightsPassThrough) {
  ResidualBlock blk("b", 5, 5, Activation::GELU, 0.0, true);
  EXPECT_FALSE(blk.has_projection());
  std::vector<Parameter*> ps;
  blk.collect(ps);
  EXPECT_EQ(ps.size(), 2u);
  zero_all(ps);
  const Matrix h = random_matrix(3, 5, 4);
  Tape t;
  EXPECT_TRUE(blk.forward(t, t.constant(h), false, nullptr).value().isApprox(h));
  ResidualBlock wide("w", 5, 7, Activation::GELU, 0.0, true);
  EXPECT_TRUE(wide.has_projection());
}

TEST(AttentionGate, ZeroWeightsHalve) {
  AttentionGate gate("g", 16);
  EXPECT_EQ(AttentionGate::bottleneck(16), 8u);
  EXPECT_EQ(AttentionGate::bottleneck(512), 128u);
  std::vector<Parameter*> ps;
  gate.collect(ps);
  zero_all(ps);
  const Matrix h = random_matrix(2, 16, 5);
  Tape t;
  EXPECT_TRUE(gate.forward(t, t.constant(h)).value().isApprox(0.5 * h));
  Rng rng(2);
  gate.init(rng);
  Tape t2;
  EXPECT_TRUE(gate.forward(t2, t2.constant(Matrix::Zero(2, 16))).value().isZero());
}

template <typename Layer>
double layer_fd_error(Layer& layer, Eigen::Index in, Eigen::Index out, std::uint64_t seed) {
  std::vector<Parameter*> ps;
  layer.collect(ps);
  const Matrix x = random_matrix(4, in, seed);
  const Matrix w = random_matrix(4, out, seed + 1);
  auto eval = [&](bool grad) {
    Tape t;
    Var o = layer.forward(t, t.constant(x));
    Var l = sum(mul(o, t.constant(w)));
    if (grad) t.backward(l);
    return l.value()(0, 0);
  };
  for (auto* p : ps) p->zero_grad();
  eval(true);
  return testing::fd_max_rel_error(ps, [&] { return eval(false); });
}

struct BlockAdapter {
  ResidualBlock blk;
  Var forward(Tape& t, Var x) { return blk.forward(t, x, false, nullptr); }
  void collect(std::vector<Parameter*>& out) { blk.collect(out); }
};

TEST(LayerGradients, FiniteDifferences) {
  Rng rng(3);
  Linear lin("l", 6, 4);
  lin.init(rng);
  EXPECT_LT(layer_fd_error(lin, 6, 4, 10), 1e-4);
  for (Activation a : {Activation::GELU, Activation::SiLU}) {
    BlockAdapter b{ResidualBlock("b", 6, 9, a, 0.0, true)};
    b.blk.init(rng);
    EXPECT_LT(layer_fd_error(b, 6, 9, 20), 1e-4);
  }
  AttentionGate gate("g", 12);
  gate.init(rng);
  EXPECT_LT(layer_fd_error(gate, 12, 12, 30), 1e-4);
}

TEST(Mlp, FiveLayerGradientCheck) {
  MlpSpec spec;
  spec.input_dim = 7;
  spec.hidden_widths = {12, 12, 10, 10, 8};
  spec.output_dim = 4;
  spec.attention = AttentionPlacement::PerBlock;
  Mlp net(spec);
  Rng rng(4);
  net.init(rng);
  auto ps = net.parameters();
  const Matrix x = random_matrix(5, 7, 40);
  const Matrix w = random_matrix(5, 4, 41);
  auto eval = [&](bool grad) {
    Tape t;
    auto out = net.forward(t, t.constant(x), false, nullptr);
    Var l = add(sum(mul(out.main, t.constant(w))), sum(*out.severity));
    if (grad) t.backward(l);
    return l.value()(0, 0);
  };
  for (auto* p : ps) p->zero_grad();
  eval(true);
  EXPECT_LT(testing::fd_max_rel_error(ps, [&] { return eval(false); }), 1e-4);
}

TEST(Mlp, StructureAndSeverityRange) {
  MlpSpec spec;
  spec.input_dim = 15;
  spec.hidden_widths = default_hidden_widths(2);
  spec.output_dim = 16;
  Mlp net(spec);
  Rng rng(5);
  net.init(rng);
  EXPECT_EQ(spec.dropout_for(0), 0.1);
  MlpSpec narrow = spec;
  narrow.hidden_widths = {64};
  EXPECT_EQ(narrow.dropout_for(0), 0.05);
  Tape t;
  auto out = net.forward(t, t.constant(random_matrix(20, 15, 6) * 50.0), false, nullptr);
  ASSERT_TRUE(out.severity.has_value());
  const Matrix& s = out.severity->value();
  // Large inputs may saturate the sigmoid, but never leave [0, 1].
  EXPECT_GE(s.minCoeff(), 0.0);
  EXPECT_LE(s.maxCoeff(), 1.0);
  EXPECT_TRUE(s.allFinite());
  EXPECT_EQ(out.main.cols(), 16);
  spec.input_dim = 0;
  EXPECT_THROW(Mlp{spec}, ConfigError);
}

TEST(Mlp, TrainingForwardNeedsRng) {
  MlpSpec spec{4, {8}, 2};
  spec.dropout = {0.5};
  Mlp net(spec);
  Rng rng(1);
  net.init(rng);
  Tape t;
  EXPECT_THROW(net.forward(t, t.constant(Matrix::Ones(1, 4)), true, nullptr), Error);
}

TEST(AdamW, ZeroGradientsLeaveParametersUnchanged) {
  Parameter p{"p", random_matrix(3, 3, 7), Matrix()};
  p.zero_grad();
  const Matrix before = p.value;
  AdamWConfig cfg;
  cfg.weight_decay = 0.0;
  std::vector<Parameter*> ps = {&p};
  AdamW opt(cfg, ps);
  for (int i = 0; i < 5; ++i) opt.step(ps, 1e-2);
  EXPECT_EQ(p.value, before);
}

TEST(AdamW, ClipsToThreshold) {
  Parameter p{"p", Matrix::Zero(1, 2), Matrix(1, 2)};
  p.grad << 6.0, 0.0;
  std::vector<Parameter*> ps = {&p};
  EXPECT_DOUBLE_EQ(clip_grad_norm(ps, 3.0), 6.0);
  EXPECT_NEAR(global_grad_norm(ps), 3.0, 1e-12);
  p.grad << 6.0, 0.0;
  AdamW opt(AdamWConfig{}, ps);
  EXPECT_DOUBLE_EQ(opt.step(ps, 1e-3), 6.0);
  EXPECT_LE(global_grad_norm(ps), 3.0 + 1e-9);
}

TEST(AdamW, ScalarQuadraticConverges) {
  Parameter p{"p", Matrix::Constant(1, 1, 5.0), Matrix::Zero(1, 1)};
  AdamWConfig cfg;
  cfg.weight_decay = 0.0;
  std::vector<Parameter*> ps = {&p};
  AdamW opt(cfg, ps);
  const double target = 1.25;
  int steps = 0;
  for (; steps < 5000; ++steps) {
    if (std::abs(p.value(0, 0) - target) < 1e-6) break;
    p.grad(0, 0) = 2.0 * (p.value(0, 0) - target);
    const double lr = cosine_lr(steps, 5000, 0.05, 0.0);
    opt.step(ps, lr);
  }
  EXPECT_LT(std::abs(p.value(0, 0) - target), 1e-6);
  EXPECT_LT(steps, 5000);
}

TEST(AdamW, RejectsNonFiniteGradients) {
  Parameter p{"p", Matrix::Zero(1, 1), Matrix::Constant(1, 1, std::nan(""))};
  std::vector<Parameter*> ps = {&p};
  AdamW opt(AdamWConfig{}, ps);
  EXPECT_THROW(opt.step(ps, 1e-3), TrainingDivergedError);
}

TEST(LrSchedule, WarmupAndCosine) {
  LrSchedule s{1.5e-3, 1e-5, 5, 25};
  EXPECT_DOUBLE_EQ(s.at(0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(s.at(2, 0.5), 1.5e-3 * 2.5 / 5.0);
  EXPECT_DOUBLE_EQ(s.at(5), 1.5e-3);
  EXPECT_DOUBLE_EQ(cosine_lr(0.0, 20.0, 1.0, 0.1), 1.0);
  EXPECT_DOUBLE_EQ(cosine_lr(20.0, 20.0, 1.0, 0.1), 0.1);
  EXPECT_NEAR(cosine_lr(10.0, 20.0, 1.0, 0.1), 0.55, 1e-15);
  for (std::size_t e = 5; e + 1 < 25; ++e) EXPECT_GE(s.at(e), s.at(e + 1));
}

TEST(Activation, NamesRoundTrip) {
  for (auto a : {Activation::ReLU, Activation::GELU, Activation::SiLU}) {
    EXPECT_EQ(activation_from_string(to_string(a)), a);
  }
  EXPECT_THROW(activation_from_string("tanh"), ConfigError);
}

}  // namespace
}  // namespace qst
