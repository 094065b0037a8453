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

#ifndef CGA_CLI_H_
#define CGA_CLI_H_

#include <ostream>

namespace cga {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;   // usage, config or malformed input
inline constexpr int kExitRuntime = 2;  // failure while running
inline constexpr int kExitKkt = 3;      // qp-check: KKT residuals out of tolerance

// Subcommands: train, topo-inspect (also "topo inspect"), partition-inspect,
// qp-check (also "qp check"), version. Structured results go to `out` as
// JSON; diagnostics go to `err`.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cga

#endif  // CGA_CLI_H_
