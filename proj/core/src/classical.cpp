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


#include "qstpinn/classical.hpp"

#include <algorithm>
#include <cmath>

#include "qstpinn/errors.hpp"

namespace qst {

namespace {

constexpr double kMinProbability = 1e-14;
constexpr double kMixing = 1e-12;

struct Observables {
  std::vector<ComplexMatrix> ops;
  std::vector<double> f_plus;
  std::vector<double> f_minus;
};

Observables observables(const MeasurementRecord& record) {
  if (record.settings.empty()) throw DomainError("reconstruction needs at least one setting");
  if (record.settings.size() != record.estimates.size()) {
    throw ShapeError("record has mismatched settings and estimates");
  }
  Observables obs;
  for (std::size_t i = 0; i < record.settings.size(); ++i) {
    obs.ops.push_back(setting_operator(record.settings[i]));
    const double e = std::clamp(record.estimates[i], -1.0, 1.0);
    obs.f_plus.push_back(0.5 * (1.0 + e));
    obs.f_minus.push_back(0.5 * (1.0 - e));
  }
  return obs;
}

double expect(const ComplexMatrix& rho, const ComplexMatrix& op) {
  double t = 0.0;
  const std::size_t n = rho.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) t += (rho(i, k) * op(k, i)).real();
  }
  return t;
}

double likelihood(const ComplexMatrix& rho, const Observables& obs) {
  double ll = 0.0;
  for (std::size_t i = 0; i < obs.ops.size(); ++i) {
    const double e = expect(rho, obs.ops[i]);
    const double pp = 0.5 * (1.0 + e), pm = 0.5 * (1.0 - e);
    if (obs.f_plus[i] > 0.0) ll += obs.f_plus[i] * std::log(std::max(pp, 1e-300));
    if (obs.f_minus[i] > 0.0) ll += obs.f_minus[i] * std::log(std::max(pm, 1e-300));
  }
  return ll;
}

ComplexMatrix hermitize(const ComplexMatrix& m) {
  ComplexMatrix h(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    h(i, i) = m(i, i).real();
    for (std::size_t j = 0; j < i; ++j) {
      const Complex avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
      h(i, j) = avg;
      h(j, i) = std::conj(avg);
    }
  }
  return h;
}

ComplexMatrix mix(const ComplexMatrix& a, const ComplexMatrix& b, double delta) {
  return a * Complex(1.0 - delta) + b * Complex(delta);
}

// Returns false when some effect with positive frequency has vanishing probability.
bool build_r(const ComplexMatrix& rho, const Observables& obs, ComplexMatrix& r) {
  const std::size_t n = rho.rows();
  double id_coeff = 0.0;
  r = ComplexMatrix(n, n);
  for (std::size_t i = 0; i < obs.ops.size(); ++i) {
    const double e = expect(rho, obs.ops[i]);
    const double pp = 0.5 * (1.0 + e), pm = 0.5 * (1.0 - e);
    double wp = 0.0, wm = 0.0;
    if (obs.f_plus[i] > 0.0) {
      if (pp < kMinProbability) return false;
      wp = obs.f_plus[i] / pp;
    }
    if (obs.f_minus[i] > 0.0) {
      if (pm < kMinProbability) return false;
      wm = obs.f_minus[i] / pm;
    }
    // wp (I + O)/2 + wm (I - O)/2
    id_coeff += 0.5 * (wp + wm);
    r += obs.ops[i] * Complex(0.5 * (wp - wm));
  }
  for (std::size_t k = 0; k < n; ++k) r(k, k) += id_coeff;
  return true;
}

}  // namespace

ComplexMatrix least_squares_raw(const MeasurementRecord& record) {
  if (record.settings.empty()) throw DomainError("least squares: empty settings");
  if (record.settings.size() != record.estimates.size()) {
    throw ShapeError("least squares: mismatched settings and estimates");
  }
  const std::size_t dim = setting_dim(record.settings.front());
  ComplexMatrix rho = ComplexMatrix::identity(dim) * Complex(1.0 / static_cast<double>(dim));
  for (std::size_t i = 0; i < record.settings.size(); ++i) {
    const auto& s = record.settings[i];
    rho += setting_operator(s) * Complex(record.estimates[i] / setting_norm_sq(s));
  }
  return rho;
}

DensityMatrix least_squares_reconstruct(const MeasurementRecord& record) {
  auto eig = hermitian_eig(least_squares_raw(record));
  double total = 0.0;
  for (auto& ev : eig.eigenvalues) {
    ev = std::max(ev, 0.0);
    total += ev;
  }
  // The trace of the raw estimate is exactly 1, so the clamped spectrum is never empty.
  for (auto& ev : eig.eigenvalues) ev /= total;
  return DensityMatrix::from_matrix(hermitize(compose_spectral(eig.eigenvectors, eig.eigenvalues)),
                                    1e-9);
}

void MleConfig::validate() const {
  if (max_iters < 1) throw ConfigError("MleConfig: max_iters must be >= 1");
  if (!(convergence_eps > 0.0)) throw ConfigError("MleConfig: convergence_eps must be positive");
  if (!(dilution >= 0.0 && dilution < 1.0)) throw ConfigError("MleConfig: dilution must lie in [0, 1)");
}

double log_likelihood(const ComplexMatrix& rho, const MeasurementRecord& record) {
  return likelihood(rho, observables(record));
}

MleResult mle_rhor(const MeasurementRecord& record, const MleConfig& cfg) {
  cfg.validate();
  const Observables obs = observables(record);
  const std::size_t dim = setting_dim(record.settings.front());
  if (cfg.initial && cfg.initial->dim() != dim) throw ShapeError("MLE: initial state dim mismatch");

  const ComplexMatrix mixed = DensityMatrix::maximally_mixed(dim).matrix();
  ComplexMatrix rho = cfg.initial ? cfg.initial->matrix() : mixed;

  MleResult out;
  double ll = likelihood(rho, obs);
  out.log_likelihood.push_back(ll);

  ComplexMatrix r;
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    while (!build_r(rho, obs, r)) rho = mix(rho, mixed, kMixing);

    ComplexMatrix next = hermitize(matmul(matmul(r, rho), r));
    next *= Complex(1.0 / trace(next).real());

    // Dilute toward the current iterate until the likelihood does not drop.
    ComplexMatrix candidate;
    double cand_ll = 0.0;
    bool accepted = false;
    double delta = cfg.dilution;
    for (int attempt = 0; attempt < 60; ++attempt) {
      candidate = hermitize(mix(next, rho, delta));
      cand_ll = likelihood(candidate, obs);
      if (cand_ll >= ll) {
        accepted = true;
        break;
      }
      delta = 0.5 * (1.0 + delta);
    }
    if (!accepted) {
      out.converged = true;
      break;
    }
    const double change = frobenius_norm(candidate - rho);
    rho = std::move(candidate);
    ll = cand_ll;
    out.log_likelihood.push_back(cand_ll);
    out.iterations = it + 1;
    if (change < cfg.convergence_eps) {
      out.converged = true;
      break;
    }
  }
  out.rho = DensityMatrix::from_matrix(rho, 1e-9);
  return out;
}

DensityMatrix mle_rhor_reconstruct(const MeasurementRecord& record, const MleConfig& cfg) {
  return mle_rhor(record, cfg).rho;
}

}  // namespace qst
