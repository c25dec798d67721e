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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qstpinn/linalg.hpp"
#include "qstpinn/rng.hpp"
#include "qstpinn/states.hpp"

namespace qst {

enum class NoiseKind { AmplitudeDamping, PhaseDamping, CorrelatedZ, Crosstalk };

/// Where a single-qubit channel is applied. CorrelatedZ and Crosstalk always
/// act on the whole register.
enum class NoiseTarget { AllQubitsIndependently, Collective, SingleQubit };

inline constexpr std::array<NoiseKind, 4> kAllNoiseKinds = {
    NoiseKind::AmplitudeDamping, NoiseKind::PhaseDamping, NoiseKind::CorrelatedZ,
    NoiseKind::Crosstalk};

/// Upper end of the experiment-level noise range.
inline constexpr double kMaxNoiseLevel = 0.19;

struct NoiseSpec {
  NoiseKind kind = NoiseKind::AmplitudeDamping;
  /// gamma, lambda or epsilon in [0, 1]; the phase alpha (radians) for CorrelatedZ.
  double strength = 0.0;
  NoiseTarget target = NoiseTarget::AllQubitsIndependently;
  /// Only read when target == SingleQubit.
  std::size_t qubit = 0;

  void validate() const;
  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& s);

/// Kraus pair {K0, K1} of the single-qubit channels.
std::array<ComplexMatrix, 2> amplitude_damping_kraus(double gamma);
std::array<ComplexMatrix, 2> phase_damping_kraus(double lambda);

/// K_q rho K_q^dagger with K acting on `qubit` (qubit 0 is the leftmost tensor
/// factor, i.e. the most significant bit of the basis index).
ComplexMatrix apply_local(const ComplexMatrix& rho, const ComplexMatrix& k, std::size_t qubit,
                          std::size_t n_qubits);

DensityMatrix apply_amplitude_damping(const DensityMatrix& rho, double gamma, std::size_t qubit);
DensityMatrix apply_phase_damping(const DensityMatrix& rho, double lambda, std::size_t qubit);
/// U rho U^dagger with U = exp(i alpha Z x ... x Z).
DensityMatrix apply_correlated_z(const DensityMatrix& rho, double alpha);
/// (1 - eps) rho + eps sigma, sigma = random_mixed(D, D).
DensityMatrix apply_crosstalk(const DensityMatrix& rho, double eps, Rng& rng);

DensityMatrix apply_noise_stack(const DensityMatrix& rho, std::span<const NoiseSpec> specs,
                                Rng& rng);

/// Experiment noise level nu -> per-channel strengths: gamma = lambda = eps = nu,
/// alpha = nu * pi / 4. Channels are listed in `kinds` order.
std::vector<NoiseSpec> severity_stack(double nu, std::span<const NoiseKind> kinds);

/// Number of qubits for a power-of-two dimension, nullopt otherwise.
std::optional<std::size_t> qubit_count(std::size_t dim);

}  // namespace qst
