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

// stationary.hpp: Nonequilibrium stationary states and exciton flows.
//
// Two independent routes are provided: closed forms built from the rate
// coefficients, and a null-space solve of the assembled 9x9 generator.
// Tests hold them against each other.

#pragma once

#include <optional>

#include "nessflow/generator.hpp"
#include "nessflow/model.hpp"
#include "nessflow/rates.hpp"

namespace nessflow {

struct StationaryState {
    DensityMatrix rho;
    /// Normalization Delta (or its field-dressed version); empty for the oracle.
    std::optional<double> delta;
    /// Net current into the sink, 2 g^-_sink rho11 - 2 g^+_sink rho00;
    /// empty for the oracle, which only sees the generator.
    std::optional<double> flow;
};

/// Relative threshold below which Delta / (sum_re)^2 is treated as zero.
inline constexpr double kSingularDeltaTolerance = 1e-14;

/// Delta: the sum of the nine pairwise products that normalizes the state.
double delta(const RateSet& rates);

/// Diagonal stationary state of the population (Pauli) equations.
/// Throws SingularModel when Delta vanishes (non-unique stationary state).
StationaryState stationary_closed_form(const RateSet& rates);

/// Flow = 2 g^-_sink rho11; requires g^+_sink == 0 (PreconditionSinkNotCold).
double flow(const RateSet& rates, const StationaryState& state);

/// 2 g^-_sink g^-_ph g^+_em / Delta; requires g^+_sink == 0.
double flow_closed_form(const RateSet& rates);

/// The same flow written directly in brightnesses and Boltzmann factors.
/// Requires a zero-temperature sink.
double flow_brightness_form(const ModelParams& params);

struct PairwiseFlows {
    double em{0.0};   ///< net pumping 0 -> 2
    double ph{0.0};   ///< net transfer 2 -> 1
    double sink{0.0}; ///< net absorption 1 -> 0
};

PairwiseFlows pairwise_flows(const RateSet& rates, const DensityMatrix& rho);

/// Stationary state under a resonant real drive s. The populations are the
/// undriven closed form with g^+-_em shifted by -s^2 Re(1/mu20); the 2<->0
/// coherence follows from the coherence rows of L_ds.
StationaryState stationary_with_field(const RateSet& rates, double s);

/// Dispatches on s: closed form for s == 0, dressed closed form otherwise.
StationaryState stationary_state(const RateSet& rates, double s);

/// Singular values below this fraction of the largest count as kernel.
inline constexpr double kKernelRelativeTolerance = 1e-10;

/// Normalized kernel vector of the full 9x9 generator. Throws NonUnique if
/// the kernel is more than one-dimensional, NoPhysicalState if the kernel
/// vector cannot be scaled to a positive unit-trace matrix.
StationaryState nullspace_oracle(const Superoperator& L);

} // namespace nessflow
