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

#include "nessflow/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

namespace nessflow {

namespace {

namespace odeint = boost::numeric::odeint;

using State = std::array<double, 18>;
using Matrix18 = Eigen::Matrix<double, 18, 18>;
using Stepper = odeint::runge_kutta_dopri5<State>;

constexpr std::size_t kMaxSteps = 1'000'000;

/// Real form of L acting on (Re v, Im v).
class RealSystem {
public:
    explicit RealSystem(const Superoperator& L)
    {
        const Eigen::Matrix<double, 9, 9> re = L.matrix().real();
        const Eigen::Matrix<double, 9, 9> im = L.matrix().imag();
        m_ << re, -im, im, re;
    }

    void operator()(const State& x, State& dxdt, double /*t*/) const
    {
        Eigen::Map<Eigen::Matrix<double, 18, 1>>(dxdt.data()) =
            m_ * Eigen::Map<const Eigen::Matrix<double, 18, 1>>(x.data());
    }

private:
    Matrix18 m_;
};

State to_state(const Vector9c& v)
{
    State x;
    for (int k = 0; k < 9; ++k) {
        x[k] = v(k).real();
        x[k + 9] = v(k).imag();
    }
    return x;
}

Vector9c from_state(const State& x)
{
    Vector9c v;
    for (int k = 0; k < 9; ++k) v(k) = cplx(x[k], x[k + 9]);
    return v;
}

double initial_step(const Superoperator& L, double span)
{
    const double scale = L.matrix().cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) return span;
    return std::min(span, 1e-3 / scale);
}

double max_abs(const Vector9c& v)
{
    return v.cwiseAbs().maxCoeff();
}

} // namespace

double Trajectory::max_trace_err() const
{
    double worst = 0.0;
    for (const auto& m : monitors) worst = std::max(worst, m.trace_err);
    return worst;
}

double Trajectory::max_herm_err() const
{
    double worst = 0.0;
    for (const auto& m : monitors) worst = std::max(worst, m.herm_err);
    return worst;
}

double Trajectory::min_eigenvalue() const
{
    double lowest = 1.0;
    for (const auto& m : monitors) lowest = std::min(lowest, m.min_eig);
    return lowest;
}

Trajectory evolve(const Superoperator& L, const DensityMatrix& rho0, double t_final, double dt_out)
{
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw std::invalid_argument("evolve: t_final must be > 0");
    if (!(dt_out > 0.0) || !std::isfinite(dt_out)) throw std::invalid_argument("evolve: dt_out must be > 0");

    std::vector<double> times;
    const auto n = static_cast<std::size_t>(std::floor(t_final / dt_out * (1.0 + 1e-12)));
    for (std::size_t k = 0; k <= n; ++k) times.push_back(static_cast<double>(k) * dt_out);
    if (t_final - times.back() > 1e-12 * t_final) times.push_back(t_final);

    Trajectory traj;
    traj.times = times;
    traj.states.reserve(times.size());
    traj.monitors.reserve(times.size());

    State x = to_state(vectorize(rho0.matrix()));
    auto observer = [&](const State& s, double /*t*/) {
        const Matrix3c rho = devectorize(from_state(s));
        const auto dev = measure_deviation(rho);
        traj.monitors.push_back({dev.trace, dev.hermiticity, dev.min_eigenvalue});
        traj.states.emplace_back(rho, kTrajectoryStateTolerance);
    };

    try {
        odeint::integrate_times(odeint::make_dense_output(kIntegratorAbsTol, kIntegratorRelTol, Stepper()),
                                RealSystem(L), x, times.begin(), times.end(), initial_step(L, dt_out),
                                observer, odeint::max_step_checker(kMaxSteps));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::StepFailure, e.what());
    }
    return traj;
}

Vector9c propagate(const Superoperator& L, const Vector9c& v0, double t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("propagate: t must be >= 0");
    State x = to_state(v0);
    if (t == 0.0) return v0;
    try {
        odeint::integrate_adaptive(odeint::make_controlled(kIntegratorAbsTol, kIntegratorRelTol, Stepper()),
                                   RealSystem(L), x, 0.0, t, initial_step(L, t));
    } catch (const std::exception& e) {
        throw Error(ErrorCode::StepFailure, e.what());
    }
    return from_state(x);
}

double spectral_gap(const Superoperator& L)
{
    const double scale = L.rate_scale();
    if (!(scale > 0.0)) throw Error(ErrorCode::NoGap, "generator has no dissipation");

    Eigen::ComplexEigenSolver<Matrix9c> solver(L.matrix(), false);
    const auto& ev = solver.eigenvalues();
    int zeros = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 9; ++k) {
        if (std::abs(ev(k)) <= 1e-9 * scale) {
            ++zeros;
            continue;
        }
        gap = std::min(gap, std::abs(ev(k).real()));
    }
    if (zeros != 1) {
        throw Error(ErrorCode::NoGap, std::to_string(zeros) + " zero eigenvalues; stationary state not unique");
    }
    if (gap < 1e-12 * scale) throw Error(ErrorCode::NoGap, "a nonzero eigenvalue is purely imaginary");
    return gap;
}

Convergence converge(const Superoperator& L, const DensityMatrix& rho0, double tol)
{
    if (!(tol > 0.0)) throw std::invalid_argument("converge: tol must be > 0");
    const double gap = spectral_gap(L);
    const double threshold = tol * std::min(L.rate_scale(), gap);
    const double chunk = 0.25 / gap;
    constexpr int kMaxChunks = 400;

    Vector9c v = vectorize(rho0.matrix());
    double t = 0.0;
    for (int k = 0; k <= kMaxChunks; ++k) {
        if (max_abs(L.matrix() * v) < threshold) {
            return {DensityMatrix(devectorize(v), kTrajectoryStateTolerance), t};
        }
        v = propagate(L, v, chunk);
        t += chunk;
    }
    throw Error(ErrorCode::NotConverged, "no stationary state within " + std::to_string(t) + " time units");
}

double fit_decay_rate(const Trajectory& trajectory, const Matrix3c& target, double t_from)
{
    double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        const double t = trajectory.times[k];
        if (t < t_from) continue;
        const double dev = (trajectory.states[k].matrix() - target).cwiseAbs().maxCoeff();
        if (!(dev > 1e-13)) continue;
        const double y = std::log(dev);
        n += 1.0;
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double denom = n * stt - st * st;
    if (n < 2.0 || !(denom > 0.0)) throw std::invalid_argument("fit_decay_rate: fewer than two usable samples");
    return -(n * sty - st * sy) / denom;
}

} // namespace nessflow
