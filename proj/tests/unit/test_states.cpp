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

#include <vector>

#include <cmath>

#include "qstpinn/errors.hpp"
#include "qstpinn/states.hpp"
#include "test_util.hpp"

namespace qst {
namespace {

using testing::max_abs_diff;
using testing::to_eigen;

TEST(Ghz, Entries) {
  const auto g = make_ghz(2).matrix();
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const bool corner = (i == 0 || i == 3) && (j == 0 || j == 3);
      EXPECT_NEAR(std::abs(g(i, j)), corner ? 0.5 : 0.0, 1e-15);
    }
  }
  const auto plus = make_ghz(1).matrix();
  EXPECT_LT(max_abs_diff(plus, ComplexMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}})), 1e-15);
  EXPECT_NEAR(trace(make_ghz(5).matrix()).real(), 1.0, 1e-14);
  EXPECT_THROW(make_ghz(11), CapacityError);
}

TEST(WState, Entries) {
  const auto w = make_w(3);
  for (std::size_t i : {1u, 2u, 4u}) EXPECT_NEAR(w.matrix()(i, i).real(), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(w.purity(), 1.0, 1e-14);
  ComplexMatrix bell(4, 4);
  bell(1, 1) = bell(1, 2) = bell(2, 1) = bell(2, 2) = 0.5;
  EXPECT_LT(max_abs_diff(make_w(2).matrix(), bell), 1e-15);
  EXPECT_THROW(make_w(1), DomainError);
}

TEST(RandomStates, PureProperties) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto rho = random_pure(8, rng);
    EXPECT_NEAR(trace(rho.matrix()).real(), 1.0, 1e-12);
    EXPECT_NEAR(rho.purity(), 1.0, 1e-10);
  }
  Rng a(42), b(42);
  EXPECT_EQ(random_pure(4, a), random_pure(4, b));
}

TEST(RandomStates, MixedProperties) {
  Rng rng(9);
  EXPECT_NEAR(random_mixed(4, 1, rng).purity(), 1.0, 1e-10);
  for (int t = 0; t < 10; ++t) {
    const auto rho = random_mixed(4, 100, rng);
    EXPECT_GE(rho.purity(), 0.25 - 1e-12);
    EXPECT_LE(rho.purity(), 1.0 + 1e-12);
    EXPECT_GE(min_eigenvalue(rho.matrix()), -1e-12);
  }
}

TEST(DensityMatrixInvariants, Validation) {
  EXPECT_THROW(DensityMatrix::from_matrix(ComplexMatrix::identity(2)), NotAStateError);
  const std::vector<double> neg = {1.2, -0.2};
  EXPECT_THROW(DensityMatrix::from_matrix(ComplexMatrix::diagonal(neg)), NotAStateError);
  EXPECT_THROW(DensityMatrix::from_matrix(ComplexMatrix::from_rows({{0.5, 0.1}, {0.0, 0.5}})), NotAStateError);
  EXPECT_NO_THROW(DensityMatrix::from_matrix(ComplexMatrix::identity(2) * Complex(0.5)));
}

TEST(Cholesky, MaximallyMixedRoundTrip) {
  for (std::size_t d : {2u, 4u, 8u}) {
    const auto l = rho_to_cholesky(DensityMatrix::maximally_mixed(d));
    EXPECT_LT(max_abs_diff(l.lower(), ComplexMatrix::identity(d) * Complex(1.0 / std::sqrt(double(d)))), 1e-12);
    EXPECT_LT(max_abs_diff(cholesky_to_rho(l).matrix(), DensityMatrix::maximally_mixed(d).matrix()), 1e-14);
  }
}

TEST(Cholesky, RankOneRoundTrip) {
  ComplexMatrix e0(3, 3);
  e0(0, 0) = 1.0;
  const auto rho = cholesky_to_rho(CholeskyFactor::from_lower(e0));
  EXPECT_LT(max_abs_diff(rho.matrix(), e0), 1e-15);
  EXPECT_LT(frobenius_norm(cholesky_to_rho(rho_to_cholesky(rho)).matrix() - e0), 1e-8);
}

TEST(Cholesky, RandomRoundTrip) {
  Rng rng(17);
  for (std::size_t d : {2u, 4u, 8u}) {
    for (std::size_t k : std::vector<std::size_t>{1, 2, d}) {
      const auto rho = random_mixed(d, k, rng);
      EXPECT_LT(frobenius_norm(cholesky_to_rho(rho_to_cholesky(rho)).matrix() - rho.matrix()), 1e-8);
    }
  }
}

TEST(Cholesky, FlattenLayout) {
  auto l = ComplexMatrix(2, 2);
  l(0, 0) = 0.6;
  l(1, 1) = 0.7;
  l(1, 0) = Complex(0.2, -0.3);
  const auto p = CholeskyFactor::from_lower(l).flatten();
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p[0], 0.6);
  EXPECT_EQ(p[1], 0.7);
  EXPECT_EQ(p[2], 0.2);
  EXPECT_EQ(p[3], -0.3);
  EXPECT_EQ(CholeskyFactor::unflatten(2, p).lower(), l);
  EXPECT_THROW(CholeskyFactor::unflatten(2, std::vector<double>(3)), ShapeError);
}

TEST(Cholesky, ConstructionIsPhysical) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> g;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> p(16);
    for (std::size_t i = 0; i < 4; ++i) p[i] = std::abs(g(gen));
    for (std::size_t i = 4; i < 16; ++i) p[i] = g(gen);
    const auto rho = cholesky_to_rho(CholeskyFactor::unflatten(4, p));
    EXPECT_GE(min_eigenvalue(rho.matrix()), -1e-14);
    EXPECT_NEAR(trace(rho.matrix()).real(), 1.0, 1e-14);
  }
  EXPECT_THROW(cholesky_to_rho(CholeskyFactor::unflatten(2, std::vector<double>(4, 0.0))), DegenerateFactorError);
}

TEST(Fidelity, KnownValues) {
  Rng rng(4);
  const auto rho = random_mixed(4, 3, rng);
  EXPECT_NEAR(fidelity(rho, rho), 1.0, 1e-8);
  ComplexMatrix p0(2, 2), p1(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  EXPECT_NEAR(fidelity(p0, p1), 0.0, 1e-12);
  EXPECT_NEAR(fidelity(make_ghz(2), DensityMatrix::maximally_mixed(4)), 0.25, 1e-10);
  EXPECT_THROW(fidelity(p0, ComplexMatrix::identity(4)), ShapeError);
}

TEST(Fidelity, SymmetricAndBounded) {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_mixed(4, 2, rng);
    const auto b = random_mixed(4, 3, rng);
    const double fab = fidelity(a, b);
    EXPECT_NEAR(fab, fidelity(b, a), 1e-8);
    EXPECT_GE(fab, 0.0);
    EXPECT_LE(fab, 1.0);
  }
}

TEST(Fidelity, PureStateOverlap) {
  Rng rng(10);
  const auto a = random_pure(4, rng);
  const auto b = random_pure(4, rng);
  // Tr(rho sigma) equals the fidelity when one argument is pure.
  const Eigen::MatrixXcd prod = to_eigen(a.matrix()) * to_eigen(b.matrix());
  EXPECT_NEAR(fidelity(a, b), prod.trace().real(), 1e-8);
}

TEST(ConstraintViolation, FormulaValues) {
  const std::vector<double> a = {0.5, 0.6}, b = {1.2, -0.2};
  EXPECT_NEAR(constraint_violation(ComplexMatrix::diagonal(a)), 0.01 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(constraint_violation(ComplexMatrix::diagonal(a)), 0.007071, 1e-6);
  EXPECT_NEAR(constraint_violation(ComplexMatrix::diagonal(b)), 0.028284, 1e-6);
  Rng rng(1);
  EXPECT_LE(constraint_violation(random_mixed(8, 3, rng).matrix()), 1e-12);
}

TEST(StateSpecs, MakeState) {
  StateSpec s;
  s.kind = StateKind::GHZ;
  s.n_qubits = 3;
  EXPECT_EQ(make_state(s), make_ghz(3));
  s.kind = StateKind::RandomMixed;
  s.dim = 5;
  s.n_qubits = 0;
  s.mix_components = 2;
  s.seed = 3;
  EXPECT_EQ(make_state(s), make_state(s));
  EXPECT_EQ(make_state(s).dim(), 5u);
  EXPECT_EQ(state_kind_from_string(to_string(StateKind::W)), StateKind::W);
}

}  // namespace
}  // namespace qst
