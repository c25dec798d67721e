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
#include <string_view>
#include <variant>
#include <vector>

#include "qstpinn/linalg.hpp"
#include "qstpinn/noise.hpp"
#include "qstpinn/rng.hpp"
#include "qstpinn/states.hpp"

namespace qst {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Tensor product of single-qubit Paulis; axes[0] acts on qubit 0 (leftmost factor).
struct PauliSetting {
  std::vector<Pauli> axes;

  std::size_t n_qubits() const { return axes.size(); }
  /// Base-4 index with axes[0] as the most significant digit; never 0 for a valid setting.
  std::uint64_t index() const;
  std::string label() const;  ///< e.g. "XIZ"
  void validate() const;      ///< nonempty, at least one non-identity axis

  static PauliSetting from_index(std::size_t n_qubits, std::uint64_t index);
  static PauliSetting parse(std::string_view label);

  friend bool operator==(const PauliSetting&, const PauliSetting&) = default;
};

/// Generalized Gell-Mann observable for a qudit of dimension `dim`, rescaled to
/// spectral norm 1. Indices [0, D(D-1)/2) are the symmetric pairs, the next
/// D(D-1)/2 the antisymmetric pairs, the last D-1 the diagonal ones.
struct GellMannSetting {
  std::size_t dim = 0;
  std::size_t index = 0;

  std::string label() const;  ///< "GM<index>"
  friend bool operator==(const GellMannSetting&, const GellMannSetting&) = default;
};

using MeasurementSetting = std::variant<PauliSetting, GellMannSetting>;

enum class SettingMode { FullPauli, RandomSubset };

std::string setting_label(const MeasurementSetting& s);
MeasurementSetting parse_setting(std::string_view label, std::size_t dim);
std::size_t setting_dim(const MeasurementSetting& s);

/// Dense Hermitian observable with spectrum inside [-1, 1].
ComplexMatrix setting_operator(const MeasurementSetting& s);
ComplexMatrix pauli_operator(const PauliSetting& s);
/// Tr(O^2) of the observable.
double setting_norm_sq(const MeasurementSetting& s);

/// Tr(rho P) through index arithmetic on the Pauli string (no dense operator).
double pauli_expectation(const DensityMatrix& rho, const PauliSetting& setting);
double expectation(const DensityMatrix& rho, const MeasurementSetting& setting);

/// 2k/M - 1 with k ~ Binomial(M, (1 + p_true)/2).
double sample_estimate(double p_true, std::size_t shots, Rng& rng);

/// Distinct settings, ascending by index. FullPauli requires d == D^2 - 1;
/// RandomSubset clamps d to D^2 - 1 with a warning on stderr. Power-of-two
/// dimensions yield Pauli strings, other dimensions Gell-Mann observables.
std::vector<MeasurementSetting> choose_settings(std::size_t dim, std::size_t d, Rng& rng,
                                                SettingMode mode);

struct MeasurementRecord {
  std::vector<MeasurementSetting> settings;
  std::vector<double> estimates;
  std::size_t shots = 0;
  double noise_level = 0.0;
  std::vector<NoiseKind> noise_kinds;
  std::vector<double> target_cholesky;
  double true_severity = 0.0;
  StateKind family = StateKind::RandomPure;

  std::size_t dim() const;
  friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

struct RecordParams {
  std::size_t shots = 512;
  double gauss_sigma = 0.01;
  double noise_level = 0.0;
  std::vector<NoiseKind> noise_kinds;
  StateKind family = StateKind::RandomPure;
  /// Infinite-shot, noiseless estimates.
  bool exact = false;
};

/// Default systematic noise: base sigma scaled by (1 + nu).
inline double systematic_sigma(double base_sigma, double nu) { return base_sigma * (1.0 + nu); }

MeasurementRecord make_record(const DensityMatrix& rho_noisy, const DensityMatrix& rho_clean_target,
                              std::span<const MeasurementSetting> settings,
                              const RecordParams& params, Rng& rng);

}  // namespace qst
