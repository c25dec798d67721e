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
#include <filesystem>

#include "qstpinn/checkpoint.hpp"
#include "qstpinn/errors.hpp"
#include "qstpinn/experiments.hpp"
#include "qstpinn/pinn.hpp"
#include "test_util.hpp"

namespace qst {
namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(gen);
  return m;
}

ExperimentConfig small_config(std::size_t n_qubits) {
  ExperimentConfig cfg = default_config(ExperimentKind::Scalability);
  cfg.qubit_grid = {n_qubits};
  return cfg;
}

DatasetPair small_data(std::size_t n_qubits, std::size_t n_train, std::size_t n_test, std::uint64_t seed,
                       std::vector<double> levels = {0.02, 0.1, 0.19}) {
  const auto cfg = small_config(n_qubits);
  const std::vector<NoiseKind> kinds(kAllNoiseKinds.begin(), kAllNoiseKinds.end());
  return generate_datasets(cfg, std::size_t{1} << n_qubits, levels, kinds, n_train, n_test, seed);
}

TEST(AdaptiveLambda, ClosedFormValues) {
  const AdaptiveWeightConfig cfg;
  EXPECT_EQ(adaptive_lambda(0.0, cfg), 0.15);
  EXPECT_EQ(adaptive_lambda(1.0, cfg), 0.075);
  EXPECT_NEAR(adaptive_lambda(0.4, cfg), 0.12, 1e-15);
  for (int i = 0; i <= 100; ++i) {
    const double l = adaptive_lambda(i / 100.0, cfg);
    EXPECT_GE(l, 0.5 * cfg.lambda0);
    EXPECT_LE(l, cfg.lambda0);
  }
  const AdaptiveWeightConfig steep{0.2, 3.0};
  EXPECT_DOUBLE_EQ(adaptive_lambda(0.9, steep), 0.1);
  EXPECT_THROW((AdaptiveWeightConfig{-0.1, 0.5}.validate()), ConfigError);
}

TEST(AdaptiveLambda, GradientFlowFlag) {
  Parameter s{"s", Matrix::Constant(3, 1, 0.3), Matrix()};
  for (bool flow : {false, true}) {
    s.zero_grad();
    Tape t;
    t.backward(sum(adaptive_lambda(t.parameter(s), AdaptiveWeightConfig{}, flow)));
    if (flow) {
      EXPECT_NEAR(s.grad(0, 0), -0.15 * 0.5, 1e-15);
    } else {
      EXPECT_EQ(s.grad.norm(), 0.0);
    }
  }
}

TEST(Reconstruction, IdentityEncoding) {
  for (std::size_t d : {2u, 4u}) {
    Matrix y = Matrix::Zero(1, static_cast<Eigen::Index>(d * d));
    for (std::size_t i = 0; i < d; ++i) y(0, i) = softplus_inverse(1.0 / std::sqrt(double(d)));
    Tape t;
    const auto r = reconstruct_differentiable(t.constant(y), d);
    const auto rho = unpack_complex(r.rho.value(), 0, d);
    EXPECT_LT(testing::max_abs_diff(rho, DensityMatrix::maximally_mixed(d).matrix()), 1e-14);
  }
}

TEST(Reconstruction, AlwaysPhysicalAndMatchesScalarPath) {
  const Matrix y = random_matrix(20, 16, 3, 2.0);
  Tape t;
  const auto r = reconstruct_differentiable(t.constant(y), 4);
  for (Eigen::Index b = 0; b < y.rows(); ++b) {
    const auto rho = unpack_complex(r.rho.value(), b, 4);
    EXPECT_LE(constraint_violation(rho), 1e-12);
    std::vector<double> p(r.params.value().row(b).data(), r.params.value().row(b).data() + 16);
    EXPECT_LT(testing::max_abs_diff(rho, cholesky_to_rho(CholeskyFactor::unflatten(4, p)).matrix()), 1e-14);
  }
}

TEST(Reconstruction, PurityGradientMatchesFiniteDifferences) {
  Parameter y{"y", random_matrix(3, 9, 4), Matrix()};
  auto eval = [&](bool grad) {
    Tape t;
    const auto r = reconstruct_differentiable(t.parameter(y), 3);
    Var rho = r.rho;
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    Var purity = sum(square(rho));
    if (grad) t.backward(purity);
    return purity.value()(0, 0);
  };
  y.zero_grad();
  eval(true);
  EXPECT_LT(testing::fd_max_rel_error({&y}, [&] { return eval(false); }), 1e-4);
}

TEST(PhysicsLoss, FormulaValues) {
  const std::vector<double> a = {0.5, 0.6}, b = {1.2, -0.2};
  Matrix m(2, 8);
  m.row(0) = pack_complex(ComplexMatrix::diagonal(a));
  m.row(1) = pack_complex(ComplexMatrix::diagonal(b));
  Tape t;
  const Matrix c = physics_loss(t.constant(m), 2).value();
  EXPECT_NEAR(c(0, 0), 0.007071, 1e-6);
  EXPECT_NEAR(c(1, 0), 0.028284, 1e-6);
  const Matrix y = random_matrix(5, 16, 5);
  const auto r = reconstruct_differentiable(t.constant(y), 4);
  EXPECT_LE(physics_loss(r.rho, 4).value().maxCoeff(), 1e-12);
}

TEST(PhysicsLoss, GradientOnUnphysicalMatrices) {
  // Non-Hermitian, wrong trace, one clearly negative eigenvalue.
  Matrix m = random_matrix(4, 18, 6, 0.3);
  for (Eigen::Index b = 0; b < 4; ++b) {
    m(b, 0) += 1.0;
    m(b, 8) -= 1.0;
  }
  Parameter p{"m", m, Matrix()};
  auto eval = [&](bool grad) {
    Tape t;
    Var l = sum(physics_loss(t.parameter(p), 3));
    if (grad) t.backward(l);
    return l.value()(0, 0);
  };
  p.zero_grad();
  eval(true);
  EXPECT_LT(testing::fd_max_rel_error({&p}, [&] { return eval(false); }), 1e-4);
}

TEST(PhysicsLoss, DegenerateMinimumUsesAverageProjector) {
  const std::vector<double> d = {-0.1, -0.1, 1.2};
  Parameter p{"m", pack_complex(ComplexMatrix::diagonal(d)), Matrix()};
  p.zero_grad();
  Tape t;
  t.backward(sum(physics_loss(t.parameter(p), 3)));
  // d C_pos / d diag = 2 lambda_min / 2 on each degenerate direction, scaled by 1/sqrt(3).
  const double s = 1.0 / std::sqrt(3.0);
  EXPECT_NEAR(p.grad(0, 0), (2.0 * 0.0 + 2.0 * -0.1 / 2.0) * s, 1e-12);
  // Real parts are packed row-major, so the diagonal sits at columns 0, 4 and 8.
  EXPECT_NEAR(p.grad(0, 4), p.grad(0, 0), 1e-12);
  EXPECT_NEAR(p.grad(0, 8), 0.0, 1e-12);
  EXPECT_NEAR(p.grad(0, 1), 0.0, 1e-12);
}

class TinyModel : public ::testing::Test {
 protected:
  static PinnModel make(bool aux, double lambda0, std::uint64_t seed, double alpha = 0.5) {
    MlpSpec spec;
    spec.input_dim = 3;
    spec.hidden_widths = {8, 8};
    spec.output_dim = 4;
    spec.aux_output = aux;
    PinnModel m(2, spec, AdaptiveWeightConfig{lambda0, alpha});
    Rng rng(seed);
    m.init(rng);
    return m;
  }
  static Batch batch(std::uint64_t seed) {
    Batch b{random_matrix(6, 3, seed), Matrix(6, 4), Matrix(6, 1)};
    Rng rng(seed);
    for (Eigen::Index r = 0; r < 6; ++r) {
      const auto p = rho_to_cholesky(random_mixed(2, 2, rng)).flatten();
      for (Eigen::Index c = 0; c < 4; ++c) b.y(r, c) = p[static_cast<std::size_t>(c)];
      b.severity(r, 0) = rng.uniform();
    }
    return b;
  }
};

TEST_F(TinyModel, FullLossGradient) {
  for (bool raw : {true, false}) {
    for (bool flow : {false, true}) {
      SCOPED_TRACE(std::string("raw=") + (raw ? "1" : "0") + " flow=" + (flow ? "1" : "0"));
      // Without flow-through lambda is a tape constant, so finite differences
      // only agree when lambda does not move (alpha = 0).
      PinnModel m = make(true, 0.15, 11, flow ? 0.5 : 0.0);
      const Batch b = batch(12);
      TrainConfig cfg;
      cfg.physics_on_raw = raw;
      cfg.lambda_flow_through = flow;
      auto ps = m.net().parameters();
      auto eval = [&](bool grad) {
        Tape t;
        const auto terms = total_loss(t, m, b, cfg, false, nullptr);
        if (grad) t.backward(terms.total);
        return terms.total.value()(0, 0);
      };
      for (auto* p : ps) p->zero_grad();
      eval(true);
      EXPECT_LT(testing::fd_max_rel_error(ps, [&] { return eval(false); }), 1e-4);
    }
  }
}

TEST_F(TinyModel, PerfectPredictionsLeaveOnlyPhysics) {
  PinnModel m = make(true, 0.15, 13);
  Batch b = batch(14);
  const Prediction pred = predict(m, b.x);
  b.y = pred.params;
  b.severity = pred.severity;
  TrainConfig cfg;
  cfg.physics_on_raw = false;
  Tape t;
  const auto terms = total_loss(t, m, b, cfg, false, nullptr);
  EXPECT_NEAR(terms.data, 0.0, 1e-24);
  EXPECT_NEAR(terms.aux, 0.0, 1e-24);
  EXPECT_NEAR(terms.total.value()(0, 0), terms.physics, 1e-24);
  EXPECT_LE(terms.physics, 1e-12);
}

TEST_F(TinyModel, ZeroLambdaReducesToBaseline) {
  PinnModel m = make(true, 0.0, 15);
  const Batch b = batch(16);
  TrainConfig cfg;
  Tape t;
  const auto terms = total_loss(t, m, b, cfg, false, nullptr);
  EXPECT_EQ(terms.physics, 0.0);
  EXPECT_NEAR(terms.total.value()(0, 0), terms.data + cfg.aux_weight * terms.aux, 1e-14);
  EXPECT_GT(terms.data, 0.0);
}

TEST_F(TinyModel, LossFiniteAndNonNegative) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    PinnModel m = make(s % 2 == 0, 0.15, s);
    Tape t;
    Rng rng(s);
    const auto terms = total_loss(t, m, batch(100 + s), TrainConfig{}, true, &rng);
    EXPECT_TRUE(std::isfinite(terms.total.value()(0, 0)));
    EXPECT_GE(terms.total.value()(0, 0), 0.0);
  }
  PinnModel m = make(true, 0.15, 1);
  Batch empty{Matrix(0, 3), Matrix(0, 4), Matrix(0, 1)};
  Tape t;
  EXPECT_THROW(total_loss(t, m, empty, TrainConfig{}, false, nullptr), DomainError);
  Batch wrong{Matrix::Zero(2, 3), Matrix::Zero(2, 3), Matrix::Zero(2, 1)};
  EXPECT_THROW(total_loss(t, m, wrong, TrainConfig{}, false, nullptr), DatasetError);
}

TEST(Training, HistoryAndPhysicalOutputs) {
  const auto data = small_data(2, 96, 32, 1);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.warmup_epochs = 1;
  ModelOptions opts;
  opts.hidden_widths = {32, 32};
  std::vector<double> violations;
  for (double l0 : {0.0, 0.15}) {
    opts.weights.lambda0 = l0;
    PinnModel m(4, data.train.feature_dim(), opts);
    const History h = train(m, data.train, &data.test, cfg);
    EXPECT_EQ(h.rows.size(), 3u);
    const EvalSummary ev = evaluate(m, data.test);
    EXPECT_LE(ev.violation_mean, 1e-12);
    EXPECT_EQ(ev.n, 32u);
    EXPECT_EQ(ev.per_level.size(), 3u);
    violations.push_back(ev.violation_mean);
  }
  EXPECT_NEAR(violations[0], violations[1], 1e-12);
  const std::string csv = History{}.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,train_loss,val_loss,fidelity,violation,lr,mean_lambda");
}

TEST(Training, DeterministicUnderFixedSeed) {
  const auto data = small_data(2, 64, 16, 2);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.seed = 5;
  ModelOptions opts;
  opts.hidden_widths = {16, 16};
  PinnModel a(4, 15, opts), b(4, 15, opts);
  const History ha = train(a, data.train, &data.test, cfg);
  const History hb = train(b, data.train, &data.test, cfg);
  EXPECT_EQ(ha.to_csv(), hb.to_csv());
  const auto pa = a.net().parameters(), pb = b.net().parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i]->value, pb[i]->value);
  const EvalSummary ea = evaluate(a, data.test), eb = evaluate(b, data.test);
  EXPECT_EQ(ea.fidelities, eb.fidelities);
}

TEST(Training, MemorizesTinyDataset) {
  const auto data = small_data(2, 10, 1, 3);
  TrainConfig cfg;
  cfg.epochs = 1500;
  cfg.seed = 1;
  ModelOptions opts;
  opts.hidden_widths = {64, 64};
  opts.dropout = {0.0, 0.0};
  PinnModel m(4, 15, opts);
  train(m, data.train, nullptr, cfg);
  EXPECT_GE(evaluate(m, data.train).fidelity_mean, 0.99);
}

TEST(Training, ResumeMatchesUninterruptedRun) {
  const auto data = small_data(2, 80, 16, 4);
  const auto dir = std::filesystem::temp_directory_path() / "qstpinn_resume_test";
  std::filesystem::create_directories(dir);
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.warmup_epochs = 1;
  cfg.seed = 9;
  ModelOptions opts;
  opts.hidden_widths = {16, 16};

  PinnModel straight(4, 15, opts);
  const History h_straight = train(straight, data.train, &data.test, cfg);

  TrainConfig first = cfg;
  first.stop_after = 2;
  first.checkpoint_path = dir / "half.ckpt";
  PinnModel part(4, 15, opts);
  EXPECT_EQ(train(part, data.train, &data.test, first).rows.size(), 2u);
  PinnModel resumed(4, 15, opts);
  const History h_resumed = train(resumed, data.train, &data.test, cfg, dir / "half.ckpt");

  EXPECT_EQ(h_straight.to_csv(), h_resumed.to_csv());
  const auto pa = straight.net().parameters(), pb = resumed.net().parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i]->value, pb[i]->value);

  PinnModel loaded = load_model(dir / "half.ckpt");
  EXPECT_EQ(loaded.spec(), part.spec());
  EXPECT_EQ(evaluate(loaded, data.test).fidelities, evaluate(part, data.test).fidelities);
  std::filesystem::remove_all(dir);
}

TEST(Training, DivergenceWritesLastGoodCheckpoint) {
  const auto data = small_data(2, 32, 8, 5);
  const auto dir = std::filesystem::temp_directory_path() / "qstpinn_diverge_test";
  std::filesystem::create_directories(dir);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.warmup_epochs = 0;
  cfg.stop_after = 1;
  cfg.checkpoint_path = dir / "run.ckpt";
  ModelOptions opts;
  opts.hidden_widths = {16};
  PinnModel m(4, 15, opts);
  train(m, data.train, nullptr, cfg);
  cfg.stop_after.reset();
  cfg.lr = 1e300;
  PinnModel again(4, 15, opts);
  EXPECT_THROW(train(again, data.train, nullptr, cfg, dir / "run.ckpt"), TrainingDivergedError);
  ASSERT_TRUE(std::filesystem::exists(dir / "run.ckpt.last_good"));
  EXPECT_EQ(load_checkpoint(dir / "run.ckpt.last_good").epoch, 1u);
  std::filesystem::remove_all(dir);
}

TEST(Evaluate, EmptySplitRejected) {
  auto data = small_data(2, 8, 2, 6);
  data.test.records.clear();
  PinnModel m(4, 15, ModelOptions{{16}});
  EXPECT_THROW(evaluate(m, data.test), DomainError);
}

TEST(Baseline, OptionsAndConfig) {
  const ModelOptions b = baseline_options();
  EXPECT_FALSE(b.aux_head);
  EXPECT_EQ(b.weights.lambda0, 0.0);
  PinnModel m(4, 15, b);
  EXPECT_FALSE(m.has_severity_head());
  EXPECT_FALSE(m.physics_enabled());
  EXPECT_EQ(baseline_train_config().lr, 1e-3);
  EXPECT_EQ(TrainConfig{}.lr, 1.5e-3);
}

}  // namespace
}  // namespace qst
