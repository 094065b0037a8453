// Copyright 2026 The CGA Simulator Authors. All Rights Reserved.
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
// =============================================================================

#ifndef CGA_RNG_H_
#define CGA_RNG_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace cga {

// Counter-based generator: every draw is a pure function of (key, counter),
// so results do not depend on call order, thread count, or the standard
// library's distribution implementations.
class CounterRng {
 public:
  explicit CounterRng(uint64_t key) : key_(key) {}

  uint64_t Bits(uint64_t counter) const;
  // Uniform in [0, 1) with 53 random bits.
  double Uniform(uint64_t counter) const;
  // Standard normal via Box-Muller on counters (2c, 2c+1).
  double Normal(uint64_t counter) const;

  uint64_t key() const { return key_; }

 private:
  uint64_t key_;
};

// Sequential stream used for shuffles.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}
  uint64_t Next();
  // Unbiased integer in [0, bound); bound > 0.
  uint64_t Below(uint64_t bound);

 private:
  uint64_t state_;
};

uint64_t Mix64(uint64_t x);

// Derives an independent seed for a named sub-stream.
uint64_t DeriveSeed(uint64_t seed, std::string_view label, uint64_t index = 0);

// Fisher-Yates shuffle driven by SplitMix64; identical on every platform.
void Shuffle(std::span<size_t> values, uint64_t seed);

}  // namespace cga

#endif  // CGA_RNG_H_
