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

#include "qstpinn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qstpinn/errors.hpp"

namespace qst {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kHermitianInputTol = 1e-8;
constexpr double kSqrtClampFloor = -1e-6;

std::string shape_str(const ComplexMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw ShapeError("ComplexMatrix: " + std::to_string(entries_.size()) +
                     " entries given for shape " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(
    std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<Complex> entries;
  entries.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ComplexMatrix::from_rows: ragged rows");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return ComplexMatrix(r, c, std::move(entries));
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> v) {
  const std::size_t n = v.size();
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = v[i] * std::conj(v[j]);
  }
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  }
  return out;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw ShapeError("ComplexMatrix +=: " + shape_str(*this) + " vs " + shape_str(other));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw ShapeError("ComplexMatrix -=: " + shape_str(*this) + " vs " + shape_str(other));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& z : entries_) z *= scale;
  return *this;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + shape_str(a) + " x " + shape_str(b));
  }
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t max_dim) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  if (rows > max_dim || cols > max_dim) {
    throw CapacityError("kron: result " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " exceeds max dimension " + std::to_string(max_dim));
  }
  ComplexMatrix out(rows, cols);
  for (std::size_t ar = 0; ar < a.rows(); ++ar) {
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const Complex s = a(ar, ac);
      for (std::size_t br = 0; br < b.rows(); ++br) {
        for (std::size_t bc = 0; bc < b.cols(); ++bc) {
          out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
        }
      }
    }
  }
  return out;
}

double frobenius_norm(const ComplexMatrix& a) {
  double sum = 0.0;
  for (const auto& z : a.entries()) sum += std::norm(z);
  return std::sqrt(sum);
}

Complex trace(const ComplexMatrix& a) {
  if (!a.is_square()) throw ShapeError("trace: non-square " + shape_str(a));
  Complex t{};
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

double hermiticity_defect(const ComplexMatrix& a) {
  if (!a.is_square()) throw ShapeError("hermiticity_defect: non-square " + shape_str(a));
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) sum += std::norm(a(i, j) - std::conj(a(j, i)));
  }
  return std::sqrt(sum);
}

HermitianEigen hermitian_eig(const ComplexMatrix& input) {
  if (!input.is_square()) throw ShapeError("hermitian_eig: non-square " + shape_str(input));
  if (!input.all_finite()) throw NumericalError("hermitian_eig: non-finite input");
  const std::size_t n = input.rows();
  const double input_norm = frobenius_norm(input);
  const double defect = hermiticity_defect(input);
  if (defect > kHermitianInputTol * std::max(1.0, input_norm)) {
    throw DomainError("hermitian_eig: input is not Hermitian (defect " +
                      std::to_string(defect) + ")");
  }

  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (input(i, j) + std::conj(input(j, i)));
    a(i, i) = a(i, i).real();
  }
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double tol = 1e-12 * frobenius_norm(a);
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < n; ++q) {
        if (p != q) s += std::norm(a(p, q));
      }
    }
    return std::sqrt(s);
  };

  bool converged = false;
  double residual = off_norm();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    residual = off_norm();
    if (residual <= tol) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double g = std::abs(apq);
        if (g == 0.0) continue;
        // Phase-shift column q so the (p,q) entry becomes real, then apply
        // the real symmetric Jacobi rotation to the 2x2 block.
        const Complex phase_conj = std::conj(apq / g);
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * g);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex u_pp = c;
        const Complex u_pq = s;
        const Complex u_qp = -s * phase_conj;
        const Complex u_qq = c * phase_conj;

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = akp * u_pp + akq * u_qp;
          a(k, q) = akp * u_pq + akq * u_qq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = std::conj(u_pp) * apk + std::conj(u_qp) * aqk;
          a(q, k) = std::conj(u_pq) * apk + std::conj(u_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = vkp * u_pp + vkq * u_qp;
          v(k, q) = vkp * u_pq + vkq * u_qq;
        }
      }
    }
  }
  if (!converged) {
    residual = off_norm();
    if (residual > tol) {
      throw NumericalError("hermitian_eig: no convergence after " + std::to_string(kMaxSweeps) +
                           " sweeps, off-diagonal residual " + std::to_string(residual));
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });
  HermitianEigen out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

double min_eigenvalue(const ComplexMatrix& a) {
  const auto eig = hermitian_eig(a);
  return eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.front();
}

ComplexMatrix compose_spectral(const ComplexMatrix& vectors, std::span<const double> values) {
  const std::size_t n = vectors.rows();
  if (vectors.cols() != values.size()) throw ShapeError("compose_spectral: value count mismatch");
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vik = vectors(i, k) * values[k];
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(vectors(j, k));
    }
  }
  return out;
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& a) {
  auto eig = hermitian_eig(a);
  if (!eig.eigenvalues.empty() && eig.eigenvalues.front() < kSqrtClampFloor) {
    throw NotPsdError("matrix_sqrt_psd: eigenvalue " + std::to_string(eig.eigenvalues.front()) +
                      " below " + std::to_string(kSqrtClampFloor));
  }
  for (auto& ev : eig.eigenvalues) ev = std::sqrt(std::max(ev, 0.0));
  return compose_spectral(eig.eigenvectors, eig.eigenvalues);
}

}  // namespace qst
