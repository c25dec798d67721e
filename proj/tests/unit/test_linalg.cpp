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

#include <algorithm>

#include "qstpinn/errors.hpp"
#include "qstpinn/linalg.hpp"
#include "test_util.hpp"

namespace qst {
namespace {

using testing::from_eigen;
using testing::max_abs_diff;
using testing::random_hermitian;
using testing::to_eigen;

const Complex kI{0.0, 1.0};

ComplexMatrix pauli_x() { return ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}); }
ComplexMatrix pauli_z() { return ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}}); }

TEST(Matmul, IdentityAndPauli) {
  const auto a = ComplexMatrix::from_rows({{1.0, 2.0 * kI}, {3.0, -4.0}});
  EXPECT_EQ(matmul(ComplexMatrix::identity(2), a), a);
  EXPECT_EQ(matmul(pauli_x(), pauli_x()), ComplexMatrix::identity(2));
  const auto ket0 = ComplexMatrix::from_rows({{1.0}, {0.0}});
  EXPECT_EQ(matmul(pauli_x(), ket0), ComplexMatrix::from_rows({{0.0}, {1.0}}));
}

TEST(Matmul, ShapeMismatchThrows) {
  EXPECT_THROW(matmul(ComplexMatrix(2, 3), ComplexMatrix(2, 3)), ShapeError);
}

TEST(Matmul, AgreesWithEigen) {
  std::mt19937_64 gen(3);
  const auto a = random_hermitian(5, gen);
  const auto b = random_hermitian(5, gen);
  EXPECT_LT(max_abs_diff(matmul(a, b), from_eigen(to_eigen(a) * to_eigen(b))), 1e-12);
}

TEST(Kron, KnownProducts) {
  EXPECT_EQ(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
  const std::vector<double> zz = {1.0, -1.0, -1.0, 1.0};
  EXPECT_EQ(kron(pauli_z(), pauli_z()), ComplexMatrix::diagonal(zz));
  const auto p0 = ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 0.0}});
  const auto p1 = ComplexMatrix::from_rows({{0.0, 0.0}, {0.0, 1.0}});
  ComplexMatrix e11(4, 4);
  e11(1, 1) = 1.0;
  EXPECT_EQ(kron(p0, p1), e11);
}

TEST(Kron, MatchesIndexDefinition) {
  std::mt19937_64 gen(11);
  const auto a = random_hermitian(3, gen);
  const auto b = random_hermitian(2, gen);
  const auto k = kron(a, b);
  ASSERT_EQ(k.rows(), 6u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(k(i * 2 + r, j * 2 + c), a(i, j) * b(r, c));
}

TEST(Kron, CapacityGuard) {
  EXPECT_THROW(kron(ComplexMatrix::identity(64), ComplexMatrix::identity(64), 1024), CapacityError);
}

TEST(HermitianEig, SmallKnownSpectra) {
  const std::vector<double> d = {0.7, 0.3};
  auto e = hermitian_eig(ComplexMatrix::diagonal(d));
  EXPECT_NEAR(e.eigenvalues[0], 0.3, 1e-14);
  EXPECT_NEAR(e.eigenvalues[1], 0.7, 1e-14);
  e = hermitian_eig(pauli_x());
  EXPECT_NEAR(e.eigenvalues[0], -1.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues[1], 1.0, 1e-14);
}

TEST(HermitianEig, MixedGhzSpectrum) {
  ComplexMatrix ghz(4, 4);
  ghz(0, 0) = ghz(0, 3) = ghz(3, 0) = ghz(3, 3) = 0.5;
  const auto m = ComplexMatrix::identity(4) * Complex(0.125) + ghz * Complex(0.5);
  const auto e = hermitian_eig(m);
  const std::vector<double> want = {0.125, 0.125, 0.125, 0.625};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(e.eigenvalues[i], want[i], 1e-13);
}

class EigAgainstEigen : public ::testing::TestWithParam<std::size_t> {};

TEST_P(EigAgainstEigen, ValuesAndReconstruction) {
  const std::size_t n = GetParam();
  std::mt19937_64 gen(100 + n);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_hermitian(n, gen);
    const auto e = hermitian_eig(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ref(to_eigen(a));
    ASSERT_TRUE(std::is_sorted(e.eigenvalues.begin(), e.eigenvalues.end()));
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(e.eigenvalues[i], ref.eigenvalues()(i), 1e-10);
    EXPECT_LT(max_abs_diff(compose_spectral(e.eigenvectors, e.eigenvalues), a), 1e-10);
    const auto v = to_eigen(e.eigenvectors);
    EXPECT_LT((v.adjoint() * v - Eigen::MatrixXcd::Identity(n, n)).norm(), 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, EigAgainstEigen, ::testing::Values(2, 3, 4, 8, 16, 32));

TEST(HermitianEig, RejectsBadInput) {
  EXPECT_THROW(hermitian_eig(ComplexMatrix(2, 3)), ShapeError);
  EXPECT_THROW(hermitian_eig(ComplexMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}})), DomainError);
  auto nan = ComplexMatrix::identity(2);
  nan(0, 0) = std::nan("");
  EXPECT_THROW(hermitian_eig(nan), NumericalError);
}

TEST(MatrixSqrt, KnownRoots) {
  EXPECT_LT(max_abs_diff(matrix_sqrt_psd(ComplexMatrix::identity(4)), ComplexMatrix::identity(4)), 1e-14);
  const std::vector<double> d = {4.0, 9.0}, r = {2.0, 3.0};
  EXPECT_LT(max_abs_diff(matrix_sqrt_psd(ComplexMatrix::diagonal(d)), ComplexMatrix::diagonal(r)), 1e-13);
  ComplexMatrix ghz(4, 4);
  ghz(0, 0) = ghz(0, 3) = ghz(3, 0) = ghz(3, 3) = 0.5;
  EXPECT_LT(max_abs_diff(matrix_sqrt_psd(ghz), ghz), 1e-12);
  const std::vector<double> neg = {-1.0, 1.0};
  EXPECT_THROW(matrix_sqrt_psd(ComplexMatrix::diagonal(neg)), NotPsdError);
}

TEST(MatrixSqrt, SquaresBack) {
  std::mt19937_64 gen(5);
  const auto h = random_hermitian(6, gen);
  const auto psd = matmul(h, h);
  const auto s = matrix_sqrt_psd(psd);
  EXPECT_LT(max_abs_diff(matmul(s, s), psd), 1e-9);
}

TEST(Norms, FrobeniusAndTrace) {
  EXPECT_EQ(frobenius_norm(ComplexMatrix(3, 3)), 0.0);
  EXPECT_NEAR(frobenius_norm(ComplexMatrix::identity(4)), 2.0, 1e-15);
  EXPECT_NEAR(frobenius_norm(ComplexMatrix::from_rows({{3.0, 4.0 * kI}, {0.0, 0.0}})), 5.0, 1e-15);
  EXPECT_EQ(trace(ComplexMatrix::identity(8)), Complex(8.0));
  const std::vector<double> d = {0.5, 0.6};
  EXPECT_NEAR(trace(ComplexMatrix::diagonal(d)).real(), 1.1, 1e-15);
  EXPECT_THROW(trace(ComplexMatrix(2, 3)), ShapeError);
}

}  // namespace
}  // namespace qst
