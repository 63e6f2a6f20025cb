// Copyright 2026 The nessflow Authors
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

// config.hpp: Scenario files (JSON) and run manifests.
//
//   {
//     "levels": {"eps0": 0, "eps1": 1.5, "eps2": 2},
//     "kB_eV_per_K": 8.3333333333333331e-05,
//     "reservoirs": {
//       "em":   {"temperature_K": 6000, "brightness": 1},
//       "ph":   {"temperature_K": 300,  "brightness": 1},
//       "sink": {"temperature_K": "zero", "brightness": 1}
//     },
//     "drive": {"s": 0},
//     "evolve": {"t_final": 50, "dt_out": 0.5, "initial": "excited"}
//   }
//
// Each reservoir also accepts gamma_im_minus / gamma_im_plus (default 0) and
// "zero_temperature": true in place of temperature_K. Omitted sections fall
// back to the typical scenario.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nessflow/model.hpp"

namespace nessflow {

inline constexpr const char* kToolVersion = "1.0.0";

enum class InitialState { excited, middle, ground, coherent, stationary };

struct EvolveSpec {
    double t_final{50.0};
    double dt_out{0.5};
    InitialState initial{InitialState::excited};
};

struct Scenario {
    ModelParams params;
    EvolveSpec evolve;
};

InitialState parse_initial_state(const std::string& name);
std::string to_string(InitialState initial);

/// Throws Error(Config) on malformed input and the model's own codes on
/// invalid physics.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json to_json(const Scenario& scenario);

/// Hex SHA-256 of the canonical (sorted-key, compact) serialization. Stable
/// under load -> save -> load.
std::string scenario_digest(const Scenario& scenario);

std::string sha256_hex(const std::string& data);

struct RunManifest {
    std::string command;
    std::string config_digest;
    std::string tool_version{kToolVersion};
    std::uint64_t seed{0};
    std::vector<std::string> outputs;
};

nlohmann::json to_json(const RunManifest& manifest);

} // namespace nessflow
