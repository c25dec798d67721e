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
#include <cstdint>
#include <limits>

namespace qst {

/// xoshiro256** seeded through splitmix64. Satisfies UniformRandomBitGenerator,
/// so it plugs into the <random> distributions.
class Rng {
 public:
  using result_type = std::uint64_t;
  using State = std::array<std::uint64_t, 4>;

  explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

  void reseed(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform();

  const State& state() const { return state_; }
  void set_state(const State& s) { state_ = s; }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  State state_{};
};

std::uint64_t splitmix64(std::uint64_t& x);

/// Per-item seed derivation: base XOR index.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return base ^ index;
}

/// Seed for a named sub-stream (e.g. "noise", "shots") of a base seed.
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream_tag);

}  // namespace qst
