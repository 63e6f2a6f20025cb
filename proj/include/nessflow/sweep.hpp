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

// sweep.hpp: Data-parallel drivers. Parameter sweeps over one scenario
// variable and seeded Monte Carlo checks of the cone bounds.
//
// Each entry point has an OpenMP version and a serial reference with the
// same signature; results are identical bit for bit because every grid
// point / sample is computed independently and reduced in index order.

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "nessflow/analysis.hpp"
#include "nessflow/model.hpp"

namespace nessflow {

/// Thread count for parallel regions: NESSFLOW_THREADS if set to a positive
/// integer (capped at the OpenMP maximum), the OpenMP default otherwise.
int thread_cap();

enum class SweepVariable { c_em, c_ph, c_sink, s };

/// Accepts C_em, C_ph, C_sink, s (case-insensitive). Throws Error(Config).
SweepVariable parse_sweep_variable(std::string_view name);
std::string_view to_string(SweepVariable variable) noexcept;

struct SweepSpec {
    SweepVariable variable{SweepVariable::c_em};
    double from{0.0};
    double to{1.0};
    int points{2};
    bool log{false};
};

/// Grid values with both endpoints exact. Throws Error(Config) on a bad range.
std::vector<double> sweep_grid(const SweepSpec& spec);

ModelParams apply_sweep_value(ModelParams params, SweepVariable variable, double value);

struct SweepRow {
    double value{0.0};
    double rho22{0.0};
    double rho11{0.0};
    double rho00{0.0};
    cplx rho20;
    double flow{0.0}; ///< net current into the sink
    cplx lambda_plus;
    cplx lambda_minus;
    std::optional<double> Q;
    std::optional<ConeLocation> cone; ///< empty unless g^+_sink = 0
};

/// Stationary state, flow, lambda_pm, Q and cone class at one point.
SweepRow evaluate_point(const ModelParams& params);

std::vector<SweepRow> run_sweep(const ModelParams& base, const SweepSpec& spec);
std::vector<SweepRow> run_sweep_serial(const ModelParams& base, const SweepSpec& spec);

enum class SampleMode {
    inside_cone,       ///< C_sink drawn inside the cone section when one exists
    random_brightness, ///< all three brightnesses log-uniform in [1e-3, 1e3]
};

struct MonteCarloSpec {
    std::size_t samples{10000};
    std::uint64_t seed{0};
    SampleMode mode{SampleMode::inside_cone};
    bool random_temperatures{false};
};

struct MonteCarloSummary {
    std::size_t samples{0};
    std::size_t inside_cone{0};
    std::size_t ratio_violations{0};     ///< inside points outside (lower, upper)
    std::size_t flow_violations{0};      ///< Flow/|Re mu02| >= bound
    std::size_t cap_violations{0};       ///< ratio or upper bound above 2 + sqrt(2)/2
    std::size_t oscillation_violations{0}; ///< nonzero L_ds eigenvalue with Re >= 0
    double max_ratio{0.0};
    double min_ratio{0.0};
    double max_upper_bound{0.0};
    double max_flow_fraction{0.0}; ///< max of (Flow/|Re mu02|) / bound

    bool clean() const
    {
        return ratio_violations == 0 && flow_violations == 0 && cap_violations == 0 &&
               oscillation_violations == 0;
    }
};

struct Sample {
    ModelParams params;
    double s{0.0}; ///< drive amplitude used for the eigenvalue check
};

/// The i-th sample depends only on (seed, i).
Sample draw_sample(const ModelParams& base, const MonteCarloSpec& spec, std::size_t index);

MonteCarloSummary monte_carlo_bounds(const ModelParams& base, const MonteCarloSpec& spec);
MonteCarloSummary monte_carlo_bounds_serial(const ModelParams& base, const MonteCarloSpec& spec);

} // namespace nessflow
