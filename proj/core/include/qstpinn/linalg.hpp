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

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qst {

using Complex = std::complex<double>;

/// Dense row-major complex matrix. Holds density matrices, Cholesky factors,
/// Kraus operators, Pauli strings and unitaries alike.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  /// Zero-filled rows x cols matrix.
  ComplexMatrix(std::size_t rows, std::size_t cols);
  /// Takes ownership of row-major entries; throws ShapeError if the count is wrong.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const double> diag);
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);
  /// |v><v| for a column vector given as a flat list.
  static ComplexMatrix outer(std::span<const Complex> v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<Complex> entries() { return entries_; }
  std::span<const Complex> entries() const { return entries_; }

  ComplexMatrix adjoint() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

/// Spectral decomposition of a Hermitian matrix. Eigenvalues ascending;
/// column k of `eigenvectors` belongs to eigenvalues[k].
struct HermitianEigen {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;
};

/// Largest dimension kron() will produce unless told otherwise.
inline constexpr std::size_t kDefaultMaxKronDim = 1024;

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t max_dim = kDefaultMaxKronDim);

/// Cyclic complex Jacobi. The input is symmetrized as (a + a^dagger)/2 first;
/// inputs further than 1e-8 (Frobenius) from Hermitian are rejected.
HermitianEigen hermitian_eig(const ComplexMatrix& a);

/// Only the smallest eigenvalue, computed through hermitian_eig.
double min_eigenvalue(const ComplexMatrix& a);

/// Principal square root of a PSD matrix. Eigenvalues in [-1e-6, 0) are
/// clamped to zero; anything more negative raises NotPsdError.
ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& a);

double frobenius_norm(const ComplexMatrix& a);
Complex trace(const ComplexMatrix& a);

/// ||a - a^dagger||_F
double hermiticity_defect(const ComplexMatrix& a);

/// V diag(values) V^dagger
ComplexMatrix compose_spectral(const ComplexMatrix& vectors, std::span<const double> values);

}  // namespace qst
