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

#include "qstpinn/config.hpp"
#include "qstpinn/pinn.hpp"

namespace {

struct Setup {
  qst::PinnModel model;
  qst::Batch batch;
};

Setup make_setup(std::size_t n_qubits, std::size_t batch_size) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  const std::size_t d = qst::default_settings(n_qubits);
  qst::MlpSpec spec;
  spec.input_dim = d;
  spec.hidden_widths = qst::default_hidden_widths(n_qubits);
  spec.output_dim = dim * dim;
  spec.aux_output = true;
  Setup s{qst::PinnModel(dim, spec, qst::AdaptiveWeightConfig{}), {}};
  qst::Rng rng(7);
  s.model.init(rng);
  std::normal_distribution<double> g;
  const auto b = static_cast<Eigen::Index>(batch_size);
  s.batch = {qst::Matrix(b, static_cast<Eigen::Index>(d)), qst::Matrix(b, static_cast<Eigen::Index>(dim * dim)),
             qst::Matrix(b, 1)};
  for (Eigen::Index i = 0; i < s.batch.x.size(); ++i) s.batch.x.data()[i] = g(rng);
  for (Eigen::Index r = 0; r < b; ++r) {
    const auto p = qst::rho_to_cholesky(qst::random_mixed(dim, 2, rng)).flatten();
    for (std::size_t c = 0; c < p.size(); ++c) s.batch.y(r, static_cast<Eigen::Index>(c)) = p[c];
    s.batch.severity(r, 0) = rng.uniform();
  }
  return s;
}

void BM_ForwardBackward(benchmark::State& state) {
  auto s = make_setup(static_cast<std::size_t>(state.range(0)), 32);
  qst::TrainConfig cfg;
  auto params = s.model.net().parameters();
  qst::Rng rng(8);
  for (auto _ : state) {
    for (auto* p : params) p->zero_grad();
    qst::Tape tape;
    const auto terms = qst::total_loss(tape, s.model, s.batch, cfg, true, &rng);
    tape.backward(terms.total);
    benchmark::DoNotOptimize(terms.data);
  }
}
BENCHMARK(BM_ForwardBackward)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  auto s = make_setup(static_cast<std::size_t>(state.range(0)), 256);
  for (auto _ : state) benchmark::DoNotOptimize(qst::predict(s.model, s.batch.x));
}
BENCHMARK(BM_Predict)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

}  // namespace
