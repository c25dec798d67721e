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

#include <random>

#include "qstpinn/linalg.hpp"
#include "qstpinn/rng.hpp"
#include "qstpinn/states.hpp"

namespace {

qst::ComplexMatrix random_hermitian(std::size_t n, std::uint64_t seed) {
  qst::Rng rng(seed);
  std::normal_distribution<double> g;
  qst::ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = g(rng);
    for (std::size_t j = 0; j < i; ++j) {
      a(i, j) = qst::Complex(g(rng), g(rng));
      a(j, i) = std::conj(a(i, j));
    }
  }
  return a;
}

void BM_HermitianEig(benchmark::State& state) {
  const auto a = random_hermitian(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(qst::hermitian_eig(a));
}
BENCHMARK(BM_HermitianEig)->RangeMultiplier(2)->Range(4, 32);

void BM_Kron(benchmark::State& state) {
  const auto a = random_hermitian(static_cast<std::size_t>(state.range(0)), 2);
  const auto b = random_hermitian(2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(qst::kron(a, b));
}
BENCHMARK(BM_Kron)->RangeMultiplier(2)->Range(2, 16);

void BM_Fidelity(benchmark::State& state) {
  const std::size_t d = static_cast<std::size_t>(state.range(0));
  qst::Rng rng(4);
  const auto a = qst::random_mixed(d, d, rng);
  const auto b = qst::random_mixed(d, d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(qst::fidelity(a, b));
}
BENCHMARK(BM_Fidelity)->RangeMultiplier(2)->Range(4, 32);

}  // namespace
