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
#include <optional>
#include <vector>

#include "qstpinn/measurement.hpp"
#include "qstpinn/states.hpp"

namespace qst {

/// Linear inversion followed by eigenvalue clamping and trace renormalization.
DensityMatrix least_squares_reconstruct(const MeasurementRecord& record);
/// The unprojected linear-inversion estimate.
ComplexMatrix least_squares_raw(const MeasurementRecord& record);

struct MleConfig {
  std::size_t max_iters = 500;
  /// Stop once the Frobenius change between iterates drops below this.
  double convergence_eps = 1e-10;
  /// rho <- (1 - delta) N[R rho R] + delta rho. Larger values are tried
  /// automatically whenever a step would lower the likelihood.
  double dilution = 0.0;
  /// Starting point; maximally mixed when empty.
  std::optional<DensityMatrix> initial;

  void validate() const;
};

struct MleResult {
  DensityMatrix rho = DensityMatrix::maximally_mixed(2);
  std::size_t iterations = 0;
  /// Log-likelihood of the start point followed by one entry per accepted iterate.
  std::vector<double> log_likelihood;
  bool converged = false;
};

/// sum_i sum_(+/-) f log Tr(rho Pi) over the two-outcome effects (I +/- O_i)/2.
double log_likelihood(const ComplexMatrix& rho, const MeasurementRecord& record);

MleResult mle_rhor(const MeasurementRecord& record, const MleConfig& cfg = {});
DensityMatrix mle_rhor_reconstruct(const MeasurementRecord& record, const MleConfig& cfg = {});

}  // namespace qst
