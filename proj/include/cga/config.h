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

#ifndef CGA_CONFIG_H_
#define CGA_CONFIG_H_

#include <filesystem>

#include "json.hpp"

#include "cga/simulator.h"

namespace cga {

// Parses an experiment document. Unknown keys, wrong types and invalid
// values raise ConfigError naming the offending key (dotted path).
ExperimentConfig ParseConfig(const nlohmann::json& doc);

// Reads and parses a JSON file; unreadable or malformed files raise
// ConfigError with key "<file>".
ExperimentConfig LoadConfig(const std::filesystem::path& path);

nlohmann::json ConfigToJson(const ExperimentConfig& cfg);

}  // namespace cga

#endif  // CGA_CONFIG_H_
