// Copyright 2026 The smoothmarket Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace smoothmarket {

using Rng = std::mt19937_64;

// Named streams so that every consumer of randomness in a run gets its own
// independent, reproducible sequence.
enum class Stream : std::uint64_t {
  kInit = 1,
  kPretrain = 2,
  kTrain = 3,
  kEvaluation = 4,
  kUtilityLoss = 5,
  kPerturbation = 6,
  kActionNoise = 7,
  kVariance = 8,
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Counter-based seed derivation: the result depends only on the arguments,
// never on the order in which streams are created.
constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                                    std::uint64_t counter = 0) {
  return mix64(mix64(seed ^ mix64(static_cast<std::uint64_t>(stream))) ^
               mix64(counter + 0x632BE59BD9B4E019ull));
}

inline Rng make_rng(std::uint64_t seed, Stream stream,
                    std::uint64_t counter = 0) {
  return Rng(derive_seed(seed, stream, counter));
}

}  // namespace smoothmarket
