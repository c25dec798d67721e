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

#include "qstpinn/noise.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "qstpinn/errors.hpp"

namespace qst {

namespace {

constexpr double kChannelTol = 1e-9;

void check_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1], got " + std::to_string(v));
  }
}

std::size_t require_qubits(const DensityMatrix& rho, const char* what) {
  const auto n = qubit_count(rho.dim());
  if (!n) {
    throw DomainError(std::string(what) + ": dimension " + std::to_string(rho.dim()) +
                      " is not a qubit register");
  }
  return *n;
}

DensityMatrix finish(ComplexMatrix m) {
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = m(i, i).real();
    for (std::size_t j = 0; j < i; ++j) {
      const Complex avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
      m(i, j) = avg;
      m(j, i) = std::conj(avg);
    }
  }
  return DensityMatrix::from_matrix(std::move(m), kChannelTol);
}

DensityMatrix apply_kraus_pair(const DensityMatrix& rho, const std::array<ComplexMatrix, 2>& ks,
                               std::size_t qubit, const char* what) {
  const std::size_t n = require_qubits(rho, what);
  if (qubit >= n) {
    throw DomainError(std::string(what) + ": qubit " + std::to_string(qubit) +
                      " out of range for " + std::to_string(n) + " qubits");
  }
  ComplexMatrix out = apply_local(rho.matrix(), ks[0], qubit, n);
  out += apply_local(rho.matrix(), ks[1], qubit, n);
  return finish(std::move(out));
}

}  // namespace

std::optional<std::size_t> qubit_count(std::size_t dim) {
  if (dim < 2 || !std::has_single_bit(dim)) return std::nullopt;
  return static_cast<std::size_t>(std::countr_zero(dim));
}

void NoiseSpec::validate() const {
  if (kind != NoiseKind::CorrelatedZ) check_unit_interval(strength, "noise strength");
  if (!std::isfinite(strength)) throw DomainError("noise strength must be finite");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::AmplitudeDamping: return "amplitude_damping";
    case NoiseKind::PhaseDamping: return "phase_damping";
    case NoiseKind::CorrelatedZ: return "correlated_z";
    case NoiseKind::Crosstalk: return "crosstalk";
  }
  return "unknown";
}

NoiseKind noise_kind_from_string(const std::string& s) {
  for (auto k : kAllNoiseKinds) {
    if (to_string(k) == s) return k;
  }
  throw DomainError("unknown noise kind '" + s + "'");
}

std::array<ComplexMatrix, 2> amplitude_damping_kraus(double gamma) {
  check_unit_interval(gamma, "amplitude damping gamma");
  return {ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, std::sqrt(1.0 - gamma)}}),
          ComplexMatrix::from_rows({{0.0, std::sqrt(gamma)}, {0.0, 0.0}})};
}

std::array<ComplexMatrix, 2> phase_damping_kraus(double lambda) {
  check_unit_interval(lambda, "phase damping lambda");
  return {ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, std::sqrt(1.0 - lambda)}}),
          ComplexMatrix::from_rows({{0.0, 0.0}, {0.0, std::sqrt(lambda)}})};
}

ComplexMatrix apply_local(const ComplexMatrix& rho, const ComplexMatrix& k, std::size_t qubit,
                          std::size_t n_qubits) {
  const std::size_t dim = rho.rows();
  if (k.rows() != 2 || k.cols() != 2) throw ShapeError("apply_local: operator must be 2x2");
  if (dim != (std::size_t{1} << n_qubits) || !rho.is_square()) {
    throw ShapeError("apply_local: matrix is not a " + std::to_string(n_qubits) + "-qubit operator");
  }
  if (qubit >= n_qubits) throw DomainError("apply_local: qubit out of range");
  const std::size_t mask = std::size_t{1} << (n_qubits - 1 - qubit);

  ComplexMatrix left(dim, dim);
  for (std::size_t r0 = 0; r0 < dim; ++r0) {
    if (r0 & mask) continue;
    const std::size_t r1 = r0 | mask;
    for (std::size_t c = 0; c < dim; ++c) {
      left(r0, c) = k(0, 0) * rho(r0, c) + k(0, 1) * rho(r1, c);
      left(r1, c) = k(1, 0) * rho(r0, c) + k(1, 1) * rho(r1, c);
    }
  }
  ComplexMatrix out(dim, dim);
  const Complex k00 = std::conj(k(0, 0)), k01 = std::conj(k(0, 1));
  const Complex k10 = std::conj(k(1, 0)), k11 = std::conj(k(1, 1));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c0 = 0; c0 < dim; ++c0) {
      if (c0 & mask) continue;
      const std::size_t c1 = c0 | mask;
      out(r, c0) = left(r, c0) * k00 + left(r, c1) * k01;
      out(r, c1) = left(r, c0) * k10 + left(r, c1) * k11;
    }
  }
  return out;
}

DensityMatrix apply_amplitude_damping(const DensityMatrix& rho, double gamma, std::size_t qubit) {
  return apply_kraus_pair(rho, amplitude_damping_kraus(gamma), qubit, "amplitude damping");
}

DensityMatrix apply_phase_damping(const DensityMatrix& rho, double lambda, std::size_t qubit) {
  return apply_kraus_pair(rho, phase_damping_kraus(lambda), qubit, "phase damping");
}

DensityMatrix apply_correlated_z(const DensityMatrix& rho, double alpha) {
  require_qubits(rho, "correlated Z");
  if (!std::isfinite(alpha)) throw DomainError("correlated Z: alpha must be finite");
  const std::size_t dim = rho.dim();
  // Z x ... x Z is diagonal with entry (-1)^popcount(index).
  std::vector<Complex> phase(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double z = (std::popcount(i) % 2 == 0) ? 1.0 : -1.0;
    phase[i] = std::polar(1.0, alpha * z);
  }
  ComplexMatrix out = rho.matrix();
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) out(i, j) *= phase[i] * std::conj(phase[j]);
  }
  return finish(std::move(out));
}

DensityMatrix apply_crosstalk(const DensityMatrix& rho, double eps, Rng& rng) {
  check_unit_interval(eps, "crosstalk epsilon");
  const DensityMatrix sigma = random_mixed(rho.dim(), rho.dim(), rng);
  ComplexMatrix out = rho.matrix();
  out *= (1.0 - eps);
  ComplexMatrix perturbation = sigma.matrix();
  perturbation *= eps;
  out += perturbation;
  return finish(std::move(out));
}

DensityMatrix apply_noise_stack(const DensityMatrix& rho, std::span<const NoiseSpec> specs,
                                Rng& rng) {
  DensityMatrix current = rho;
  for (const auto& spec : specs) {
    spec.validate();
    switch (spec.kind) {
      case NoiseKind::AmplitudeDamping:
      case NoiseKind::PhaseDamping: {
        const bool amp = spec.kind == NoiseKind::AmplitudeDamping;
        auto apply_one = [&](std::size_t q) {
          current = amp ? apply_amplitude_damping(current, spec.strength, q)
                        : apply_phase_damping(current, spec.strength, q);
        };
        if (spec.target == NoiseTarget::SingleQubit) {
          apply_one(spec.qubit);
        } else {
          const std::size_t n = require_qubits(current, "noise stack");
          for (std::size_t q = 0; q < n; ++q) apply_one(q);
        }
        break;
      }
      case NoiseKind::CorrelatedZ: current = apply_correlated_z(current, spec.strength); break;
      case NoiseKind::Crosstalk: current = apply_crosstalk(current, spec.strength, rng); break;
    }
  }
  return current;
}

std::vector<NoiseSpec> severity_stack(double nu, std::span<const NoiseKind> kinds) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw DomainError("severity_stack: nu must lie in [0, 1]");
  std::vector<NoiseSpec> out;
  out.reserve(kinds.size());
  for (auto kind : kinds) {
    NoiseSpec spec;
    spec.kind = kind;
    spec.strength = kind == NoiseKind::CorrelatedZ ? nu * std::numbers::pi / 4.0 : nu;
    spec.target = (kind == NoiseKind::AmplitudeDamping || kind == NoiseKind::PhaseDamping)
                      ? NoiseTarget::AllQubitsIndependently
                      : NoiseTarget::Collective;
    out.push_back(spec);
  }
  return out;
}

}  // namespace qst
