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

#include "qstpinn/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qstpinn/errors.hpp"

namespace qst {

namespace {

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  ComplexMatrix h(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  }
  return h;
}

std::vector<Complex> gaussian_vector(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Complex> psi(dim);
  for (auto& z : psi) {
    const double re = normal(rng);
    const double im = normal(rng);
    z = Complex(re, im);
  }
  return psi;
}

// Plain Cholesky of a Hermitian matrix. Returns false on a nonpositive pivot.
bool factor_in_place(const ComplexMatrix& a, ComplexMatrix& l) {
  const std::size_t n = a.rows();
  l = ComplexMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) pivot -= std::norm(l(j, k));
    if (!(pivot > 0.0)) return false;
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return true;
}

CholeskyFactor factor_regularized(const ComplexMatrix& rho) {
  const std::size_t n = rho.rows();
  ComplexMatrix shifted = hermitian_part(rho);
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) += kCholeskyRegularizer;
  ComplexMatrix l;
  if (!factor_in_place(shifted, l)) {
    // Tiny negative eigenvalues beat the shift: clamp the spectrum and retry.
    auto eig = hermitian_eig(shifted);
    for (auto& ev : eig.eigenvalues) ev = std::max(ev, kCholeskyRegularizer);
    shifted = compose_spectral(eig.eigenvectors, eig.eigenvalues);
    if (!factor_in_place(hermitian_part(shifted), l)) {
      throw NumericalError("rho_to_cholesky: factorization failed after spectral clamp");
    }
  }
  const double norm = frobenius_norm(l);
  l *= 1.0 / norm;
  return CholeskyFactor::from_lower(std::move(l));
}

}  // namespace

StateViolations state_violations(const ComplexMatrix& m) {
  if (!m.is_square()) throw ShapeError("state_violations: non-square matrix");
  StateViolations v;
  v.hermiticity = hermiticity_defect(m);
  v.trace_error = std::abs(trace(m) - Complex(1.0, 0.0));
  v.min_eigenvalue = m.rows() == 0 ? 0.0 : min_eigenvalue(hermitian_part(m));
  return v;
}

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix m, double tol) {
  if (!m.is_square() || m.rows() == 0) throw ShapeError("DensityMatrix: matrix must be square");
  if (!m.all_finite()) throw NotAStateError("DensityMatrix: non-finite entries");
  const auto v = state_violations(m);
  if (v.hermiticity > tol) {
    throw NotAStateError("DensityMatrix: not Hermitian (defect " + std::to_string(v.hermiticity) +
                         ")");
  }
  if (v.trace_error > tol) {
    throw NotAStateError("DensityMatrix: trace differs from 1 by " +
                         std::to_string(v.trace_error));
  }
  if (v.min_eigenvalue < -tol) {
    throw NotAStateError("DensityMatrix: negative eigenvalue " +
                         std::to_string(v.min_eigenvalue));
  }
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::from_pure(std::span<const Complex> psi) {
  double norm_sq = 0.0;
  for (const auto& z : psi) norm_sq += std::norm(z);
  if (!(norm_sq > 0.0) || !std::isfinite(norm_sq)) {
    throw DomainError("DensityMatrix::from_pure: zero or non-finite vector");
  }
  ComplexMatrix m = ComplexMatrix::outer(psi);
  m *= 1.0 / norm_sq;
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) = m(i, i).real();
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  if (dim == 0) throw DomainError("maximally_mixed: dim must be positive");
  ComplexMatrix m = ComplexMatrix::identity(dim);
  m *= 1.0 / static_cast<double>(dim);
  return DensityMatrix(std::move(m));
}

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  const double f = frobenius_norm(matrix_);
  return f * f;
}

CholeskyFactor CholeskyFactor::from_lower(ComplexMatrix lower) {
  if (!lower.is_square()) throw DomainError("CholeskyFactor: matrix must be square");
  const std::size_t n = lower.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (lower(i, j) != Complex{}) throw DomainError("CholeskyFactor: nonzero above diagonal");
    }
    if (lower(i, i).imag() != 0.0) throw DomainError("CholeskyFactor: complex diagonal entry");
    if (!(lower(i, i).real() >= 0.0)) throw DomainError("CholeskyFactor: negative diagonal entry");
  }
  return CholeskyFactor(std::move(lower));
}

CholeskyFactor CholeskyFactor::unflatten(std::size_t dim, std::span<const double> params) {
  if (params.size() != cholesky_param_count(dim)) {
    throw ShapeError("CholeskyFactor::unflatten: expected " +
                     std::to_string(cholesky_param_count(dim)) + " parameters, got " +
                     std::to_string(params.size()));
  }
  ComplexMatrix l(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) l(i, i) = params[i];
  std::size_t k = dim;
  for (std::size_t i = 1; i < dim; ++i) {
    for (std::size_t j = 0; j < i; ++j, k += 2) l(i, j) = Complex(params[k], params[k + 1]);
  }
  return from_lower(std::move(l));
}

std::vector<double> CholeskyFactor::flatten() const {
  const std::size_t n = dim();
  std::vector<double> out;
  out.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(lower_(i, i).real());
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      out.push_back(lower_(i, j).real());
      out.push_back(lower_(i, j).imag());
    }
  }
  return out;
}

std::string to_string(StateKind kind) {
  switch (kind) {
    case StateKind::GHZ: return "ghz";
    case StateKind::W: return "w";
    case StateKind::RandomPure: return "random_pure";
    case StateKind::RandomMixed: return "random_mixed";
  }
  return "unknown";
}

StateKind state_kind_from_string(const std::string& s) {
  if (s == "ghz") return StateKind::GHZ;
  if (s == "w") return StateKind::W;
  if (s == "random_pure") return StateKind::RandomPure;
  if (s == "random_mixed") return StateKind::RandomMixed;
  throw DomainError("unknown state kind '" + s + "'");
}

std::size_t StateSpec::dimension() const {
  if (dim != 0) return dim;
  return std::size_t{1} << n_qubits;
}

void StateSpec::validate() const {
  switch (kind) {
    case StateKind::GHZ:
      if (n_qubits < 1 || n_qubits > kMaxQubits) throw CapacityError("GHZ needs 1..10 qubits");
      break;
    case StateKind::W:
      if (n_qubits < 2) throw DomainError("W state needs at least 2 qubits");
      if (n_qubits > kMaxQubits) throw CapacityError("W state supports at most 10 qubits");
      break;
    case StateKind::RandomPure:
    case StateKind::RandomMixed:
      if (dimension() < 2) throw DomainError("random states need dim >= 2");
      break;
  }
  if (mix_components < 1) throw DomainError("mix_components must be >= 1");
}

DensityMatrix make_ghz(std::size_t n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw CapacityError("make_ghz: n must be in [1, 10], got " + std::to_string(n_qubits));
  }
  const std::size_t dim = std::size_t{1} << n_qubits;
  std::vector<Complex> psi(dim);
  psi.front() = 1.0;
  psi.back() = 1.0;
  return DensityMatrix::from_pure(psi);
}

DensityMatrix make_w(std::size_t n_qubits) {
  if (n_qubits < 2) throw DomainError("make_w: n must be >= 2, got " + std::to_string(n_qubits));
  if (n_qubits > kMaxQubits) throw CapacityError("make_w: n must be <= 10");
  const std::size_t dim = std::size_t{1} << n_qubits;
  std::vector<Complex> psi(dim);
  for (std::size_t q = 0; q < n_qubits; ++q) psi[std::size_t{1} << q] = 1.0;
  return DensityMatrix::from_pure(psi);
}

DensityMatrix random_pure(std::size_t dim, Rng& rng) {
  if (dim < 2) throw DomainError("random_pure: dim must be >= 2");
  return DensityMatrix::from_pure(gaussian_vector(dim, rng));
}

DensityMatrix random_mixed(std::size_t dim, std::size_t k, Rng& rng) {
  if (dim < 2) throw DomainError("random_mixed: dim must be >= 2");
  if (k < 1) throw DomainError("random_mixed: k must be >= 1");
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> weights(k);
  double total = 0.0;
  for (auto& w : weights) {
    w = expo(rng);
    total += w;
  }
  ComplexMatrix m(dim, dim);
  for (std::size_t c = 0; c < k; ++c) {
    ComplexMatrix component = random_pure(dim, rng).matrix();
    component *= weights[c] / total;
    m += component;
  }
  // Exact Hermiticity and unit trace despite round-off.
  ComplexMatrix h = hermitian_part(m);
  const double tr = trace(h).real();
  h *= 1.0 / tr;
  for (std::size_t i = 0; i < dim; ++i) h(i, i) = h(i, i).real();
  return DensityMatrix::from_matrix(std::move(h), 1e-9);
}

DensityMatrix make_state(const StateSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  switch (spec.kind) {
    case StateKind::GHZ: return make_ghz(spec.n_qubits);
    case StateKind::W: return make_w(spec.n_qubits);
    case StateKind::RandomPure: return random_pure(spec.dimension(), rng);
    case StateKind::RandomMixed:
      return random_mixed(spec.dimension(), spec.mix_components, rng);
  }
  throw DomainError("make_state: unknown kind");
}

DensityMatrix cholesky_to_rho(const CholeskyFactor& l) {
  const ComplexMatrix& lower = l.lower();
  if (frobenius_norm(lower) < 1e-12) {
    throw DegenerateFactorError("cholesky_to_rho: factor norm below 1e-12");
  }
  const std::size_t n = lower.rows();
  ComplexMatrix g(n, n);
  // (L L^dagger)_ij = sum_{k <= min(i,j)} L_ik conj(L_jk)
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      Complex s{};
      for (std::size_t k = 0; k <= j; ++k) s += lower(i, k) * std::conj(lower(j, k));
      g(i, j) = s;
      g(j, i) = std::conj(s);
    }
    g(i, i) = g(i, i).real();
  }
  const double tr = trace(g).real();
  g *= 1.0 / tr;
  return DensityMatrix::from_matrix(std::move(g), 1e-9);
}

CholeskyFactor rho_to_cholesky(const DensityMatrix& rho) { return factor_regularized(rho.matrix()); }

CholeskyFactor rho_to_cholesky(const ComplexMatrix& rho) {
  if (!rho.is_square()) throw ShapeError("rho_to_cholesky: non-square matrix");
  auto eig = hermitian_eig(rho);
  if (eig.eigenvalues.front() < -1e-6) {
    throw NotAStateError("rho_to_cholesky: eigenvalue " + std::to_string(eig.eigenvalues.front()) +
                         " is not a state");
  }
  double total = 0.0;
  for (auto& ev : eig.eigenvalues) {
    ev = std::max(ev, 0.0);
    total += ev;
  }
  if (!(total > 0.0)) throw NotAStateError("rho_to_cholesky: zero matrix");
  for (auto& ev : eig.eigenvalues) ev /= total;
  return factor_regularized(compose_spectral(eig.eigenvectors, eig.eigenvalues));
}

double fidelity(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || !a.is_square()) {
    throw ShapeError("fidelity: dimension mismatch");
  }
  // Eigenvalues at rounding level are zeroed before the square root; their
  // square roots would otherwise leak ~1e-8 into the result.
  auto ea = hermitian_eig(a);
  if (!ea.eigenvalues.empty() && ea.eigenvalues.front() < -1e-6) {
    throw NotPsdError("fidelity: first argument has eigenvalue " + std::to_string(ea.eigenvalues.front()));
  }
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(ea.eigenvalues.back(), 0.0) *
                       static_cast<double>(a.rows());
  for (auto& ev : ea.eigenvalues) ev = ev > floor ? std::sqrt(ev) : 0.0;
  const ComplexMatrix sa = compose_spectral(ea.eigenvectors, ea.eigenvalues);
  const ComplexMatrix inner = hermitian_part(matmul(matmul(sa, b), sa));
  const auto eig = hermitian_eig(inner);
  const double inner_floor = 64.0 * std::numeric_limits<double>::epsilon() *
                             std::max(eig.eigenvalues.back(), 0.0) * static_cast<double>(a.rows());
  double root_sum = 0.0;
  for (double ev : eig.eigenvalues) {
    if (ev > inner_floor) root_sum += std::sqrt(ev);
  }
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  return fidelity(a.matrix(), b.matrix());
}

double constraint_violation(const ComplexMatrix& rho_raw) {
  if (!rho_raw.is_square()) throw ShapeError("constraint_violation: non-square matrix");
  const auto v = state_violations(rho_raw);
  const double pos = std::max(0.0, -v.min_eigenvalue);
  const double total = v.hermiticity * v.hermiticity + v.trace_error * v.trace_error + pos * pos;
  return total / std::sqrt(static_cast<double>(rho_raw.rows()));
}

}  // namespace qst
