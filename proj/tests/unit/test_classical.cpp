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

#include <Eigen/Dense>

#include "qstpinn/classical.hpp"
#include "qstpinn/errors.hpp"
#include "test_util.hpp"

namespace qst {
namespace {

using testing::max_abs_diff;

MeasurementRecord exact_record(const DensityMatrix& rho, Rng& rng) {
  const auto settings = choose_settings(rho.dim(), rho.dim() * rho.dim() - 1, rng, SettingMode::FullPauli);
  RecordParams p;
  p.exact = true;
  p.gauss_sigma = 0.0;
  return make_record(rho, rho, settings, p, rng);
}

// Independent linear inversion: solve Tr(O_i rho) = e_i, Tr(rho) = 1 over a
// real Hermitian basis with a QR least-squares solve.
ComplexMatrix qr_inversion(const MeasurementRecord& rec) {
  const std::size_t d = rec.dim();
  std::vector<ComplexMatrix> basis;
  for (std::size_t i = 0; i < d; ++i) {
    ComplexMatrix b(d, d);
    b(i, i) = 1.0;
    basis.push_back(b);
    for (std::size_t j = 0; j < i; ++j) {
      ComplexMatrix re(d, d), im(d, d);
      re(i, j) = re(j, i) = 1.0;
      im(i, j) = Complex(0.0, 1.0);
      im(j, i) = Complex(0.0, -1.0);
      basis.push_back(re);
      basis.push_back(im);
    }
  }
  const auto m = static_cast<Eigen::Index>(rec.settings.size() + 1);
  Eigen::MatrixXd a(m, static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd b(m);
  for (std::size_t r = 0; r < rec.settings.size(); ++r) {
    const auto op = setting_operator(rec.settings[r]);
    for (std::size_t k = 0; k < basis.size(); ++k) a(r, k) = trace(matmul(op, basis[k])).real();
    b(r) = rec.estimates[r];
  }
  for (std::size_t k = 0; k < basis.size(); ++k) a(m - 1, k) = trace(basis[k]).real();
  b(m - 1) = 1.0;
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
  ComplexMatrix rho(d, d);
  for (std::size_t k = 0; k < basis.size(); ++k) rho += basis[k] * Complex(x(static_cast<Eigen::Index>(k)));
  return rho;
}

TEST(LeastSquares, ExactGhzRecovered) {
  Rng rng(1);
  const auto ghz = make_ghz(2);
  EXPECT_GE(fidelity(least_squares_reconstruct(exact_record(ghz, rng)), ghz), 0.999);
}

TEST(LeastSquares, ZeroEstimatesGiveMaximallyMixed) {
  Rng rng(2);
  auto rec = exact_record(make_ghz(2), rng);
  std::fill(rec.estimates.begin(), rec.estimates.end(), 0.0);
  EXPECT_LT(max_abs_diff(least_squares_reconstruct(rec).matrix(), DensityMatrix::maximally_mixed(4).matrix()), 1e-15);
  const auto mm = DensityMatrix::maximally_mixed(4);
  EXPECT_LT(max_abs_diff(least_squares_reconstruct(exact_record(mm, rng)).matrix(), mm.matrix()), 1e-15);
}

TEST(LeastSquares, RawMatchesQrSolveOnNoisyData) {
  Rng rng(3);
  for (std::size_t d : {3u, 4u, 8u}) {
    const auto rho = random_mixed(d, 2, rng);
    const auto settings = choose_settings(d, d * d - 1, rng, SettingMode::FullPauli);
    RecordParams p;
    p.shots = 64;
    const auto rec = make_record(rho, rho, settings, p, rng);
    EXPECT_LT(max_abs_diff(least_squares_raw(rec), qr_inversion(rec)), 1e-10) << "dim " << d;
  }
}

TEST(LeastSquares, ProjectionIsPhysical) {
  Rng rng(4);
  const auto rho = random_pure(4, rng);
  const auto settings = choose_settings(4, 15, rng, SettingMode::FullPauli);
  RecordParams p;
  p.shots = 16;
  const auto out = least_squares_reconstruct(make_record(rho, rho, settings, p, rng));
  EXPECT_LE(constraint_violation(out.matrix()), 1e-12);
}

TEST(Mle, TrueStateIsFixedPoint) {
  Rng rng(5);
  const auto rho = random_mixed(4, 4, rng);
  MleConfig cfg;
  cfg.initial = rho;
  cfg.max_iters = 1;
  const auto res = mle_rhor(exact_record(rho, rng), cfg);
  EXPECT_LE(frobenius_norm(res.rho.matrix() - rho.matrix()), 1e-9);
}

TEST(Mle, GhzRecoveredAndAgreesWithLs) {
  Rng rng(6);
  const auto ghz = make_ghz(2);
  const auto rec = exact_record(ghz, rng);
  const auto res = mle_rhor(rec);
  EXPECT_GE(fidelity(res.rho, ghz), 0.99);
  EXPECT_GE(fidelity(res.rho, least_squares_reconstruct(rec)), 0.99);
}

TEST(Mle, LikelihoodNeverDecreases) {
  Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto rho = random_mixed(4, 2, rng);
    const auto settings = choose_settings(4, 15, rng, SettingMode::FullPauli);
    RecordParams p;
    p.shots = 100;
    const auto res = mle_rhor(make_record(rho, rho, settings, p, rng));
    for (std::size_t i = 1; i < res.log_likelihood.size(); ++i) {
      EXPECT_GE(res.log_likelihood[i], res.log_likelihood[i - 1]);
    }
  }
}

TEST(Mle, ConfigValidation) {
  Rng rng(8);
  const auto rec = exact_record(make_ghz(2), rng);
  MleConfig cfg;
  cfg.max_iters = 0;
  EXPECT_THROW(mle_rhor(rec, cfg), ConfigError);
  cfg.max_iters = 10;
  cfg.dilution = 1.0;
  EXPECT_THROW(mle_rhor(rec, cfg), ConfigError);
}

}  // namespace
}  // namespace qst
