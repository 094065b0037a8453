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

#include "cga/rng.h"

#include <cmath>
#include <numbers>
#include <utility>

namespace cga {

uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t CounterRng::Bits(uint64_t counter) const {
  return Mix64(key_ ^ Mix64(counter + 0x632be59bd9b4e019ULL));
}

double CounterRng::Uniform(uint64_t counter) const {
  return static_cast<double>(Bits(counter) >> 11) * 0x1.0p-53;
}

double CounterRng::Normal(uint64_t counter) const {
  // 1 - U keeps the log argument in (0, 1].
  double u1 = 1.0 - Uniform(2 * counter);
  double u2 = Uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

uint64_t SplitMix64::Next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t SplitMix64::Below(uint64_t bound) {
  // Rejection on the top of the range removes modulo bias.
  uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t r;
  do {
    r = Next();
  } while (r >= limit);
  return r % bound;
}

uint64_t DeriveSeed(uint64_t seed, std::string_view label, uint64_t index) {
  // FNV-1a over the label, then mixed with the seed and index.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return Mix64(Mix64(seed ^ h) + Mix64(index ^ 0xd6e8feb86659fd93ULL));
}

void Shuffle(std::span<size_t> values, uint64_t seed) {
  SplitMix64 gen(seed);
  for (size_t i = values.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(gen.Below(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace cga
