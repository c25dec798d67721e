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

#include "qstpinn/measurement.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>

#include "qstpinn/errors.hpp"

namespace qst {

namespace {

ComplexMatrix single_pauli(Pauli p) {
  const Complex i(0.0, 1.0);
  switch (p) {
    case Pauli::I: return ComplexMatrix::identity(2);
    case Pauli::X: return ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
    case Pauli::Y: return ComplexMatrix::from_rows({{0.0, -i}, {i, 0.0}});
    case Pauli::Z: return ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
  }
  return {};
}

std::size_t pair_count(std::size_t dim) { return dim * (dim - 1) / 2; }

// (j, k) with j < k for pair number `p` in row-major order.
std::pair<std::size_t, std::size_t> pair_at(std::size_t dim, std::size_t p) {
  for (std::size_t j = 0; j < dim; ++j) {
    const std::size_t row = dim - 1 - j;
    if (p < row) return {j, j + 1 + p};
    p -= row;
  }
  throw DomainError("Gell-Mann pair index out of range");
}

ComplexMatrix gell_mann_operator(const GellMannSetting& s) {
  const std::size_t dim = s.dim;
  const std::size_t pairs = pair_count(dim);
  if (dim < 2 || s.index >= dim * dim - 1) {
    throw DomainError("Gell-Mann index " + std::to_string(s.index) + " out of range for dim " +
                      std::to_string(dim));
  }
  ComplexMatrix m(dim, dim);
  if (s.index < pairs) {
    const auto [j, k] = pair_at(dim, s.index);
    m(j, k) = 1.0;
    m(k, j) = 1.0;
  } else if (s.index < 2 * pairs) {
    const auto [j, k] = pair_at(dim, s.index - pairs);
    m(j, k) = Complex(0.0, -1.0);
    m(k, j) = Complex(0.0, 1.0);
  } else {
    const std::size_t l = s.index - 2 * pairs + 1;
    for (std::size_t j = 0; j < l; ++j) m(j, j) = 1.0 / static_cast<double>(l);
    m(l, l) = -1.0;
  }
  return m;
}

double trace_product_real(const ComplexMatrix& rho, const ComplexMatrix& op) {
  Complex t{};
  for (std::size_t i = 0; i < rho.rows(); ++i) {
    for (std::size_t k = 0; k < rho.cols(); ++k) t += rho(i, k) * op(k, i);
  }
  return t.real();
}

}  // namespace

std::uint64_t PauliSetting::index() const {
  std::uint64_t idx = 0;
  for (auto a : axes) idx = idx * 4 + static_cast<std::uint64_t>(a);
  return idx;
}

std::string PauliSetting::label() const {
  std::string out;
  out.reserve(axes.size());
  for (auto a : axes) out.push_back("IXYZ"[static_cast<int>(a)]);
  return out;
}

void PauliSetting::validate() const {
  if (axes.empty()) throw DomainError("PauliSetting: empty axis list");
  if (std::all_of(axes.begin(), axes.end(), [](Pauli p) { return p == Pauli::I; })) {
    throw DomainError("PauliSetting: all-identity setting carries no information");
  }
}

PauliSetting PauliSetting::from_index(std::size_t n_qubits, std::uint64_t index) {
  PauliSetting s;
  s.axes.resize(n_qubits);
  for (std::size_t q = n_qubits; q-- > 0;) {
    s.axes[q] = static_cast<Pauli>(index % 4);
    index /= 4;
  }
  if (index != 0) throw DomainError("PauliSetting::from_index: index too large");
  return s;
}

PauliSetting PauliSetting::parse(std::string_view label) {
  PauliSetting s;
  for (char c : label) {
    switch (c) {
      case 'I': s.axes.push_back(Pauli::I); break;
      case 'X': s.axes.push_back(Pauli::X); break;
      case 'Y': s.axes.push_back(Pauli::Y); break;
      case 'Z': s.axes.push_back(Pauli::Z); break;
      default: throw DomainError("PauliSetting::parse: bad character in '" + std::string(label) + "'");
    }
  }
  s.validate();
  return s;
}

std::string GellMannSetting::label() const { return "GM" + std::to_string(index); }

std::string setting_label(const MeasurementSetting& s) {
  return std::visit([](const auto& v) { return v.label(); }, s);
}

MeasurementSetting parse_setting(std::string_view label, std::size_t dim) {
  if (label.starts_with("GM")) {
    GellMannSetting g;
    g.dim = dim;
    const auto digits = label.substr(2);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), g.index);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
      throw DomainError("parse_setting: bad Gell-Mann label '" + std::string(label) + "'");
    }
    gell_mann_operator(g);  // range check
    return g;
  }
  auto p = PauliSetting::parse(label);
  if ((std::size_t{1} << p.n_qubits()) != dim) {
    throw DomainError("parse_setting: '" + std::string(label) + "' does not match dim " +
                      std::to_string(dim));
  }
  return p;
}

std::size_t setting_dim(const MeasurementSetting& s) {
  if (const auto* p = std::get_if<PauliSetting>(&s)) return std::size_t{1} << p->n_qubits();
  return std::get<GellMannSetting>(s).dim;
}

ComplexMatrix pauli_operator(const PauliSetting& s) {
  s.validate();
  ComplexMatrix out = single_pauli(s.axes.front());
  for (std::size_t q = 1; q < s.axes.size(); ++q) out = kron(out, single_pauli(s.axes[q]));
  return out;
}

ComplexMatrix setting_operator(const MeasurementSetting& s) {
  if (const auto* p = std::get_if<PauliSetting>(&s)) return pauli_operator(*p);
  return gell_mann_operator(std::get<GellMannSetting>(s));
}

double setting_norm_sq(const MeasurementSetting& s) {
  if (const auto* p = std::get_if<PauliSetting>(&s)) {
    return static_cast<double>(std::size_t{1} << p->n_qubits());
  }
  const auto& g = std::get<GellMannSetting>(s);
  const std::size_t pairs = pair_count(g.dim);
  if (g.index < 2 * pairs) return 2.0;
  const double l = static_cast<double>(g.index - 2 * pairs + 1);
  return (l + 1.0) / l;
}

double pauli_expectation(const DensityMatrix& rho, const PauliSetting& setting) {
  setting.validate();
  const std::size_t n = setting.n_qubits();
  if (rho.dim() != (std::size_t{1} << n)) {
    throw DomainError("pauli_expectation: " + std::to_string(n) + "-qubit setting on dim " +
                      std::to_string(rho.dim()));
  }
  std::size_t flip = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const Pauli a = setting.axes[q];
    if (a == Pauli::X || a == Pauli::Y) flip |= std::size_t{1} << (n - 1 - q);
  }
  const auto& m = rho.matrix();
  Complex total{};
  for (std::size_t j = 0; j < rho.dim(); ++j) {
    // P|j> = phase(j) |j ^ flip>, so P_{j^flip, j} = phase(j).
    Complex phase = 1.0;
    for (std::size_t q = 0; q < n; ++q) {
      const bool bit = (j >> (n - 1 - q)) & 1U;
      switch (setting.axes[q]) {
        case Pauli::I:
        case Pauli::X: break;
        case Pauli::Y: phase *= bit ? Complex(0.0, -1.0) : Complex(0.0, 1.0); break;
        case Pauli::Z:
          if (bit) phase = -phase;
          break;
      }
    }
    total += m(j, j ^ flip) * phase;
  }
  return std::clamp(total.real(), -1.0, 1.0);
}

double expectation(const DensityMatrix& rho, const MeasurementSetting& setting) {
  if (const auto* p = std::get_if<PauliSetting>(&setting)) return pauli_expectation(rho, *p);
  const auto& g = std::get<GellMannSetting>(setting);
  if (g.dim != rho.dim()) throw DomainError("expectation: Gell-Mann dimension mismatch");
  return std::clamp(trace_product_real(rho.matrix(), gell_mann_operator(g)), -1.0, 1.0);
}

double sample_estimate(double p_true, std::size_t shots, Rng& rng) {
  if (shots < 1) throw DomainError("sample_estimate: shots must be >= 1");
  const double p_plus = std::clamp((1.0 + p_true) / 2.0, 0.0, 1.0);
  std::binomial_distribution<long long> binom(static_cast<long long>(shots), p_plus);
  const long long k = binom(rng);
  return 2.0 * static_cast<double>(k) / static_cast<double>(shots) - 1.0;
}

std::vector<MeasurementSetting> choose_settings(std::size_t dim, std::size_t d, Rng& rng,
                                                SettingMode mode) {
  if (dim < 2) throw DomainError("choose_settings: dim must be >= 2");
  const std::size_t total = dim * dim - 1;
  if (d == 0) throw DomainError("choose_settings: d must be positive");
  if (mode == SettingMode::FullPauli && d != total) {
    throw DomainError("choose_settings: full basis needs d = " + std::to_string(total) +
                      ", got " + std::to_string(d));
  }
  if (d > total) {
    std::cerr << "warning: choose_settings: d = " << d << " exceeds the " << total
              << " available settings for dim " << dim << "; clamping\n";
    d = total;
  }
  std::vector<std::size_t> picks;
  if (d == total) {
    picks.resize(total);
    std::iota(picks.begin(), picks.end(), std::size_t{0});
  } else {
    std::vector<std::size_t> pool(total);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t span = total - i;
      const std::size_t j = i + static_cast<std::size_t>(rng() % span);
      std::swap(pool[i], pool[j]);
    }
    picks.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(d));
    std::sort(picks.begin(), picks.end());
  }
  const auto n = qubit_count(dim);
  std::vector<MeasurementSetting> out;
  out.reserve(picks.size());
  for (std::size_t p : picks) {
    if (n) {
      out.emplace_back(PauliSetting::from_index(*n, p + 1));  // skip the identity string
    } else {
      out.emplace_back(GellMannSetting{dim, p});
    }
  }
  return out;
}

std::size_t MeasurementRecord::dim() const {
  if (!settings.empty()) return setting_dim(settings.front());
  return static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(target_cholesky.size()))));
}

MeasurementRecord make_record(const DensityMatrix& rho_noisy, const DensityMatrix& rho_clean_target,
                              std::span<const MeasurementSetting> settings,
                              const RecordParams& params, Rng& rng) {
  if (settings.empty()) throw DomainError("make_record: settings must be nonempty");
  if (rho_noisy.dim() != rho_clean_target.dim()) throw ShapeError("make_record: dim mismatch");
  if (!params.exact && params.shots < 1) throw DomainError("make_record: shots must be >= 1");
  if (params.gauss_sigma < 0.0) throw DomainError("make_record: gauss_sigma must be >= 0");

  MeasurementRecord rec;
  rec.settings.assign(settings.begin(), settings.end());
  rec.estimates.reserve(settings.size());
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto& s : settings) {
    const double exact = expectation(rho_noisy, s);
    if (params.exact) {
      rec.estimates.push_back(exact);
      continue;
    }
    double est = sample_estimate(exact, params.shots, rng);
    if (params.gauss_sigma > 0.0) est += params.gauss_sigma * gauss(rng);
    rec.estimates.push_back(std::clamp(est, -1.0, 1.0));
  }
  rec.shots = params.shots;
  rec.noise_level = params.noise_level;
  rec.noise_kinds = params.noise_kinds;
  rec.target_cholesky = rho_to_cholesky(rho_clean_target).flatten();
  rec.true_severity = std::clamp(params.noise_level / kMaxNoiseLevel, 0.0, 1.0);
  rec.family = params.family;
  return rec;
}

}  // namespace qst
