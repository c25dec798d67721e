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
#include <span>
#include <string>
#include <vector>

#include "qstpinn/linalg.hpp"
#include "qstpinn/rng.hpp"

namespace qst {

/// Tolerance used for the Hermitian / unit-trace / PSD checks.
inline constexpr double kStateTol = 1e-10;
/// Diagonal shift applied before factoring rank-deficient states.
inline constexpr double kCholeskyRegularizer = 1e-12;
inline constexpr std::size_t kMaxQubits = 10;

struct StateViolations {
  double hermiticity = 0.0;     ///< ||rho - rho^dagger||_F
  double trace_error = 0.0;     ///< |Tr(rho) - 1|
  double min_eigenvalue = 0.0;  ///< of the Hermitian part
};

StateViolations state_violations(const ComplexMatrix& m);

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
 public:
  /// Validates all three invariants at `tol`; throws NotAStateError.
  static DensityMatrix from_matrix(ComplexMatrix m, double tol = kStateTol);
  /// |psi><psi| / <psi|psi>.
  static DensityMatrix from_pure(std::span<const Complex> psi);
  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  double purity() const;

  friend bool operator==(const DensityMatrix&, const DensityMatrix&) = default;

 private:
  explicit DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {}
  ComplexMatrix matrix_;
};

/// Lower-triangular L with real, nonnegative diagonal; rho = L L^dagger / Tr(L L^dagger).
///
/// Flattened layout (D^2 reals): the D diagonal entries first, then the strictly
/// lower entries in row-major order (i > j, i ascending, j ascending) as
/// (real, imag) pairs.
class CholeskyFactor {
 public:
  /// Throws DomainError if `lower` is not square lower-triangular with a real
  /// nonnegative diagonal.
  static CholeskyFactor from_lower(ComplexMatrix lower);
  static CholeskyFactor unflatten(std::size_t dim, std::span<const double> params);

  std::size_t dim() const { return lower_.rows(); }
  const ComplexMatrix& lower() const { return lower_; }
  std::vector<double> flatten() const;

 private:
  explicit CholeskyFactor(ComplexMatrix l) : lower_(std::move(l)) {}
  ComplexMatrix lower_;
};

constexpr std::size_t cholesky_param_count(std::size_t dim) { return dim * dim; }

enum class StateKind { GHZ, W, RandomPure, RandomMixed };

std::string to_string(StateKind kind);
StateKind state_kind_from_string(const std::string& s);

struct StateSpec {
  StateKind kind = StateKind::RandomPure;
  /// Qubit count for GHZ/W and qubit systems; 0 when `dim` is given directly.
  std::size_t n_qubits = 0;
  /// Explicit Hilbert-space dimension for non-qubit random states.
  std::size_t dim = 0;
  std::size_t mix_components = 1;
  std::uint64_t seed = 0;

  std::size_t dimension() const;
  void validate() const;
};

DensityMatrix make_ghz(std::size_t n_qubits);
DensityMatrix make_w(std::size_t n_qubits);
/// Haar-random pure state from normalized complex Gaussians.
DensityMatrix random_pure(std::size_t dim, Rng& rng);
/// sum_i p_i |psi_i><psi_i| with p ~ flat Dirichlet over k components.
DensityMatrix random_mixed(std::size_t dim, std::size_t k, Rng& rng);
DensityMatrix make_state(const StateSpec& spec);

DensityMatrix cholesky_to_rho(const CholeskyFactor& l);
/// Canonical factor of rho + eps*I (eps = 1e-12), rescaled so Tr(L L^dagger) = 1.
CholeskyFactor rho_to_cholesky(const DensityMatrix& rho);
/// Same, for a raw matrix: eigenvalues in [-1e-6, 0) are clamped, lower ones
/// raise NotAStateError.
CholeskyFactor rho_to_cholesky(const ComplexMatrix& rho);

/// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2, clamped to [0, 1].
double fidelity(const DensityMatrix& a, const DensityMatrix& b);
double fidelity(const ComplexMatrix& a, const ComplexMatrix& b);

/// (||rho - rho^dagger||_F^2 + |Tr rho - 1|^2 + max(0, -lambda_min)^2) / sqrt(D)
double constraint_violation(const ComplexMatrix& rho_raw);

}  // namespace qst
