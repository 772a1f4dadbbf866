// Copyright 2026 The pobsim Authors
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

#ifndef POBSIM_RANDOM_HPP_
#define POBSIM_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace pob {

// Deterministic random stream. The variate transforms are written out here
// instead of using <random> distributions, whose output is
// implementation-defined; the engine itself is fully specified by the
// standard, so streams are reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Always consumes exactly one draw, whatever p is.
  bool bernoulli(double p) { return uniform() < p; }

  double exponential(double mean);

  // Uniform integer in [0, n). Requires n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

// Seed for the named substream `name` (and optional index) of a root seed.
// Substreams are independent of each other, so adding a consumer never
// shifts the draws seen by unrelated ones.
std::uint64_t derive_seed(std::uint64_t root, std::string_view name,
                          std::uint64_t index = 0);

inline Rng substream(std::uint64_t root, std::string_view name,
                     std::uint64_t index = 0) {
  return Rng(derive_seed(root, name, index));
}

}  // namespace pob

#endif  // POBSIM_RANDOM_HPP_
