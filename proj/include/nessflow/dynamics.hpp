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

// dynamics.hpp: Time evolution d vec(rho)/dt = L vec(rho).
//
// The 9 complex components are integrated as 18 reals with an adaptive
// Dormand-Prince 5(4) stepper; output times are filled from its dense output.

#pragma once

#include <optional>
#include <vector>

#include "nessflow/generator.hpp"
#include "nessflow/model.hpp"

namespace nessflow {

inline constexpr double kIntegratorRelTol = 1e-10;
inline constexpr double kIntegratorAbsTol = 1e-12;

/// Tolerance handed to DensityMatrix for sampled states: positivity may dip
/// by integrator error, so it is looser than the trace/Hermiticity monitors.
inline constexpr double kTrajectoryStateTolerance = 1e-6;

struct TrajectoryMonitor {
    double trace_err{0.0};
    double herm_err{0.0};
    double min_eig{0.0};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    std::vector<TrajectoryMonitor> monitors;
    std::optional<double> converged_at;

    double max_trace_err() const;
    double max_herm_err() const;
    double min_eigenvalue() const;
};

/// Samples at t = 0, dt_out, 2 dt_out, ... and t_final.
/// Throws StepFailure if the step-size controller gives up.
Trajectory evolve(const Superoperator& L, const DensityMatrix& rho0, double t_final, double dt_out);

/// Raw propagation of a 9-vector to time t (no DensityMatrix checks).
Vector9c propagate(const Superoperator& L, const Vector9c& v0, double t);

struct Convergence {
    DensityMatrix rho;
    double time;
};

/// Integrates until max|drho/dt| < tol * min(L.rate_scale(), spectral gap), which is below
/// tol * rate scale and bounds the distance to the stationary state by about tol.
/// Throws NoGap if a nonzero eigenvalue of L has |Re| < 1e-12 * rate scale,
/// NotConverged if the criterion is not met within a generous time budget.
Convergence converge(const Superoperator& L, const DensityMatrix& rho0, double tol);

/// Smallest |Re lambda| over the nonzero eigenvalues of L; throws NoGap.
double spectral_gap(const Superoperator& L);

/// Decay rate of ||rho(t) - target||_max fitted by least squares on
/// log-deviation over the samples with t >= t_from.
double fit_decay_rate(const Trajectory& trajectory, const Matrix3c& target, double t_from);

} // namespace nessflow
