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

// report.hpp: Serialization of results to CSV and JSON.
//
// Every floating-point value is written with 17 significant digits ("%.17g")
// so that output round-trips exactly and is byte-stable across runs.
// Complex numbers are [re, im] pairs in JSON and re_/im_ column pairs in CSV.

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nessflow/analysis.hpp"
#include "nessflow/dynamics.hpp"
#include "nessflow/generator.hpp"
#include "nessflow/spectra.hpp"
#include "nessflow/stationary.hpp"
#include "nessflow/sweep.hpp"

namespace nessflow {

std::string fmt17(double value);

/// nlohmann::json dump with %.17g floats; non-finite numbers become null.
/// indent < 0 gives the compact form.
std::string dump_json(const nlohmann::json& j, int indent = 2);

nlohmann::json complex_json(cplx z);
nlohmann::json to_json(const DensityMatrix& rho);
nlohmann::json to_json(const StationaryState& state);
nlohmann::json to_json(const SpectrumReport& report);
nlohmann::json to_json(const WeakFieldPrediction& prediction);
nlohmann::json to_json(const StrongFieldLimits& limits);
nlohmann::json to_json(const ConeClassification& cone);
nlohmann::json to_json(const BoundsReport& report);
nlohmann::json to_json(const MonteCarloSummary& summary);

/// The 9x9 generator as nine rows of nine [re, im] pairs.
nlohmann::json superoperator_json(const Superoperator& L);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, SweepVariable variable);
nlohmann::json sweep_json(const std::vector<SweepRow>& rows, SweepVariable variable);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
nlohmann::json trajectory_json(const Trajectory& trajectory);

} // namespace nessflow
