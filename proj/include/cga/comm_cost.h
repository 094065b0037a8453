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

#ifndef CGA_COMM_COST_H_
#define CGA_COMM_COST_H_

#include <cstdint>

#include "cga/optimizers.h"

namespace cga {

// Per-round communication payload in parameter units, excluding the
// forward/backward compute term:
//   cga      2 * m_s * n_b
//   dpmsgd   m_s * n_b
//   compcga  2 * m_s * n_b / b
// m_s is the model size, n_b the number of nonzero off-diagonal mixing
// weights, b the float width in bits.
double CommCost(Algorithm algorithm, int64_t model_size, int64_t nonzeros,
                int float_bits);

}  // namespace cga

#endif  // CGA_COMM_COST_H_
