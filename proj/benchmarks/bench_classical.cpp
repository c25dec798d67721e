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


#include <benchmark/benchmark.h>

#include "qstpinn/classical.hpp"
#include "qstpinn/measurement.hpp"
#include "qstpinn/states.hpp"

namespace {

qst::MeasurementRecord record(std::size_t n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  qst::Rng rng(9);
  const auto rho = qst::random_mixed(dim, 2, rng);
  const auto settings = qst::choose_settings(dim, dim * dim - 1, rng, qst::SettingMode::FullPauli);
  qst::RecordParams p;
  p.shots = 512;
  return qst::make_record(rho, rho, settings, p, rng);
}

void BM_LeastSquares(benchmark::State& state) {
  const auto rec = record(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qst::least_squares_reconstruct(rec));
}
BENCHMARK(BM_LeastSquares)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_MleRhoR(benchmark::State& state) {
  const auto rec = record(static_cast<std::size_t>(state.range(0)));
  qst::MleConfig cfg;
  cfg.max_iters = 200;
  for (auto _ : state) benchmark::DoNotOptimize(qst::mle_rhor(rec, cfg));
}
BENCHMARK(BM_MleRhoR)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

}  // namespace
