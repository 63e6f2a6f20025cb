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

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "checks.hpp"
#include "nessflow/dynamics.hpp"
#include "nessflow/spectra.hpp"
#include "nessflow/stationary.hpp"
#include "oracles.hpp"

using namespace nessflow;
using nessflow::testing::error_code_of;

namespace {

double random_drive(std::mt19937_64& rng, const RateSet& r)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng) < 0.25 ? 0.0 : oracle::log_uniform(rng, 1e-2, 1e1) * r.sum_re();
}

void check_physical(const Trajectory& traj)
{
    CHECK(traj.max_trace_err() <= 1e-8);
    CHECK(traj.max_herm_err() <= 1e-8);
    CHECK(traj.min_eigenvalue() >= -1e-6);
    for (std::size_t k = 1; k < traj.times.size(); ++k) CHECK(traj.times[k] > traj.times[k - 1]);
}

struct Mode {
    double rate;
    double frequency;
    double amplitude;
};

/// Decay rates and amplitudes of the nonzero L_ds modes excited by rho0.
std::vector<Mode> excited_modes(const RateSet& r, double s, const Matrix3c& rho0)
{
    const Matrix5c block = oracle::generator_matrix_direct(r, s).topLeftCorner<5, 5>();
    Eigen::ComplexEigenSolver<Matrix5c> es(block);
    const Eigen::Matrix<cplx, 5, 1> x0 = vectorize(rho0).head<5>();
    const Eigen::Matrix<cplx, 5, 1> c = es.eigenvectors().partialPivLu().solve(x0);
    const double scale = r.sum_re() + s;
    std::vector<Mode> modes;
    double total = 0.0;
    for (int k = 0; k < 5; ++k) {
        if (std::abs(es.eigenvalues()(k)) <= 1e-9 * scale) continue;
        const double a = std::abs(c(k)) * es.eigenvectors().col(k).cwiseAbs().maxCoeff();
        modes.push_back({-es.eigenvalues()(k).real(), std::abs(es.eigenvalues()(k).imag()), a});
        total += a;
    }
    std::erase_if(modes, [&](const Mode& m) { return m.amplitude < 1e-6 * total; });
    std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) { return a.rate < b.rate; });
    return modes;
}

} // namespace

TEST_CASE("zero generator keeps the initial state")
{
    const Superoperator zero;
    const DensityMatrix rho0 = DensityMatrix::diagonal(0.2, 0.3, 0.5);
    const auto traj = evolve(zero, rho0, 5.0, 0.5);
    REQUIRE(traj.times.size() == 11);
    CHECK(traj.times.back() == doctest::Approx(5.0));
    for (const auto& state : traj.states) CHECK(oracle::max_abs(state.matrix() - rho0.matrix()) == 0.0);
    check_physical(traj);
}

TEST_CASE("stationary states are fixed points of the integrator")
{
    const RateSet r = thermal_rates(typical_params());
    for (double s : {0.0, 0.3 * r.sum_re()}) {
        const Superoperator L = build_L(r, s);
        const auto st = stationary_state(r, s);
        const double scale = L.rate_scale();
        const auto traj = evolve(L, st.rho, 100.0 / scale, 1.0 / scale);
        for (const auto& state : traj.states) CHECK(oracle::max_abs(state.matrix() - st.rho.matrix()) <= 1e-8);
        check_physical(traj);
    }
}

TEST_CASE("excitation relaxing through phonon and sink only")
{
    RateSet r;
    r.ph.re_minus = 1.0;
    r.sink.re_minus = 0.4;
    const Superoperator L = build_L(r, 0.0);
    const Matrix9c oracle_L = oracle::generator_matrix_direct(r, 0.0);
    const DensityMatrix rho0 = DensityMatrix::diagonal(1.0, 0.0, 0.0);
    const auto traj = evolve(L, rho0, 40.0, 4.0);
    REQUIRE(traj.states.size() == 11);

    double peak = 0.0;
    std::size_t peak_at = 0;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const Vector9c expected = oracle::expm_propagate(oracle_L, vectorize(rho0.matrix()), traj.times[k]);
        CHECK(oracle::max_abs(traj.states[k].matrix() - devectorize(expected)) <= 1e-8);
        if (traj.states[k].population(1) > peak) {
            peak = traj.states[k].population(1);
            peak_at = k;
        }
    }
    CHECK(peak_at > 0);
    CHECK(peak_at < traj.states.size() - 1);
    CHECK(traj.states.back().population(0) == doctest::Approx(1.0).epsilon(1e-6));
    check_physical(traj);
}

TEST_CASE("integrator against the matrix exponential on random models")
{
    std::mt19937_64 rng(41);
    for (int n = 0; n < 60; ++n) {
        const RateSet r = oracle::random_rates(rng, n % 3 == 0);
        const double s = random_drive(rng, r);
        const Superoperator L = build_L(r, s);
        const Matrix9c oracle_L = oracle::generator_matrix_direct(r, s);
        const DensityMatrix rho0(oracle::random_hermitian(rng));
        const double scale = L.rate_scale();
        const auto traj = evolve(L, rho0, 10.0 / scale, 1.0 / scale);
        REQUIRE(traj.times.size() == 11);
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            const Vector9c expected = oracle::expm_propagate(oracle_L, vectorize(rho0.matrix()), traj.times[k]);
            CHECK(oracle::max_abs(traj.states[k].matrix() - devectorize(expected)) <= 1e-8);
        }
        check_physical(traj);

        const Vector9c direct = propagate(L, vectorize(rho0.matrix()), 3.0 / scale);
        const Vector9c expected = oracle::expm_propagate(oracle_L, vectorize(rho0.matrix()), 3.0 / scale);
        CHECK((direct - expected).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("monitors stay physical across random trajectories")
{
    std::mt19937_64 rng(42);
    for (int n = 0; n < 200; ++n) {
        const RateSet r = oracle::random_rates(rng, n % 2 == 0);
        const double s = random_drive(rng, r);
        const Superoperator L = build_L(r, s);
        const double scale = L.rate_scale();
        const Matrix3c start = n % 4 == 0 ? DensityMatrix::diagonal(1.0, 0.0, 0.0).matrix()
                                          : oracle::random_hermitian(rng);
        const auto traj = evolve(L, DensityMatrix(start), 30.0 / scale, 0.5 / scale);
        check_physical(traj);
    }
}

TEST_CASE("coherence decays with the closed-form rate")
{
    std::mt19937_64 rng(43);
    for (int n = 0; n < 40; ++n) {
        const RateSet r = oracle::random_rates(rng, n % 2 == 1);
        const Superoperator L = build_L(r, 0.0);
        const cplx mu = mus(r).mu02;
        Matrix3c start = Matrix3c::Zero();
        start(0, 0) = start(2, 2) = 0.5;
        start(0, 2) = start(2, 0) = 0.5;
        const DensityMatrix rho0(start);
        const double t_end = 5.0 / std::abs(mu.real());
        const auto traj = evolve(L, rho0, t_end, t_end / 20.0);
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            const double expected = 0.5 * std::exp(mu.real() * traj.times[k]);
            CHECK(oracle::rel_err(std::abs(traj.states[k](0, 2)), expected) <= 1e-6);
        }
    }
}

TEST_CASE("non-diagonal block is blind to populations")
{
    std::mt19937_64 rng(44);
    for (int n = 0; n < 50; ++n) {
        const RateSet r = oracle::random_rates(rng, n % 2 == 0);
        const double s = random_drive(rng, r);
        const Superoperator L = build_L(r, s);
        const double scale = L.rate_scale();
        const Matrix3c base = 0.8 * oracle::random_hermitian(rng) + 0.2 / 3.0 * Matrix3c::Identity();
        Matrix3c shifted = base;
        shifted(2, 2) += 0.02;
        shifted(0, 0) -= 0.02;
        shifted(0, 2) += 0.005;
        shifted(2, 0) += 0.005;
        const auto a = evolve(L, DensityMatrix(base), 5.0 / scale, 0.5 / scale);
        const auto b = evolve(L, DensityMatrix(shifted), 5.0 / scale, 0.5 / scale);
        for (std::size_t k = 0; k < a.states.size(); ++k) {
            CHECK(std::abs(a.states[k](1, 0) - b.states[k](1, 0)) <= 1e-10);
            CHECK(std::abs(a.states[k](2, 1) - b.states[k](2, 1)) <= 1e-10);
        }

        Vector9c kick = Vector9c::Zero();
        kick(0) = 1.0;
        kick(2) = -1.0;
        kick(3) = cplx(0.2, 0.1);
        const Vector9c moved = propagate(L, kick, 4.0 / scale);
        CHECK(moved.segment<4>(5).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("convergence reaches the stationary module")
{
    const RateSet typical = thermal_rates(typical_params());
    const double tol = 1e-8;
    {
        const Superoperator L = build_L(typical, 0.0);
        const auto c = converge(L, DensityMatrix::diagonal(1.0, 0.0, 0.0), tol);
        const auto st = stationary_closed_form(typical);
        CHECK(oracle::max_abs(c.rho.matrix() - st.rho.matrix()) <= 10.0 * tol);
        CHECK(c.time > 0.0);
    }

    std::mt19937_64 rng(45);
    for (int n = 0; n < 40; ++n) {
        const RateSet r = oracle::random_rates(rng, n % 4 == 0);
        const double s = n % 2 == 0 ? 0.5 * r.sum_re() : random_drive(rng, r);
        const Superoperator L = build_L(r, s);
        const auto c = converge(L, DensityMatrix::diagonal(0.0, 1.0, 0.0), tol);
        const auto st = stationary_state(r, s);
        CHECK(oracle::max_abs(c.rho.matrix() - st.rho.matrix()) <= 10.0 * tol);
        CHECK(oracle::max_abs(apply(L, c.rho)) < tol * L.rate_scale());
        if (s != 0.0) CHECK(std::abs(c.rho(2, 0)) > 0.0);
    }
}

TEST_CASE("late-time decay follows the slowest excited eigenvalue")
{
    std::mt19937_64 rng(46);
    int fitted = 0;
    for (int n = 0; n < 80; ++n) {
        const RateSet r = oracle::random_rates(rng);
        const double s = n % 2 == 0 ? 0.0 : random_drive(rng, r);
        const Matrix3c start = DensityMatrix::diagonal(1.0, 0.0, 0.0).matrix();
        const auto st = stationary_state(r, s);
        const auto modes = excited_modes(r, s, start - st.rho.matrix());
        REQUIRE(!modes.empty());
        const Mode slow = modes.front();
        if (s == 0.0) CHECK(slow.rate == doctest::Approx(-lambdas(r).plus.real()).epsilon(1e-9));

        // The fit window opens once faster modes are 100 times below the slowest one
        // and closes when the slowest one reaches 1e-9.
        double t_from = 0.0;
        for (const auto& m : modes) {
            if (m.rate <= slow.rate * (1.0 + 1e-9)) continue;
            t_from = std::max(t_from, std::log(100.0 * m.amplitude / slow.amplitude) / (m.rate - slow.rate));
        }
        const double t_end = std::log(slow.amplitude / 1e-9) / slow.rate;
        double needed = 3.0 / slow.rate;
        if (slow.frequency > 1e-9 * slow.rate) needed = std::max(needed, 6.0 * M_PI / slow.frequency);
        if (t_end - t_from < needed) continue;

        const auto traj = evolve(build_L(r, s), DensityMatrix(start), t_end, t_end / 400.0);
        const double measured = fit_decay_rate(traj, st.rho.matrix(), t_from);
        CHECK(std::abs(measured / slow.rate - 1.0) <= 0.05);
        CHECK(spectral_gap(build_L(r, s)) <= slow.rate * (1.0 + 1e-9));
        ++fitted;
    }
    CHECK(fitted >= 40);
}

TEST_CASE("dissipation removes purely oscillatory modes")
{
    std::mt19937_64 rng(47);
    for (int n = 0; n < 10000; ++n) {
        const RateSet r = oracle::random_rates(rng, n % 2 == 0);
        const double s = oracle::log_uniform(rng, 1e-3, 1e3) * r.sum_re();
        const Matrix9c L = oracle::generator_matrix_direct(r, s);
        Eigen::ComplexEigenSolver<Matrix5c> es(L.topLeftCorner<5, 5>(), false);
        const double scale = std::max(r.sum_re(), s);
        int zeros = 0;
        for (int k = 0; k < 5; ++k) {
            const cplx ev = es.eigenvalues()(k);
            if (std::abs(ev) <= 1e-9 * scale) {
                ++zeros;
                continue;
            }
            CHECK(ev.real() < -1e-12 * scale);
        }
        CHECK(zeros == 1);
    }
}

TEST_CASE("dynamics errors")
{
    const Superoperator zero;
    const DensityMatrix rho0 = DensityMatrix::diagonal(1.0, 0.0, 0.0);
    CHECK_THROWS_AS(evolve(zero, rho0, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(evolve(zero, rho0, 1.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(propagate(zero, vectorize(rho0.matrix()), -1.0), std::invalid_argument);
    CHECK(error_code_of([&] { spectral_gap(zero); }) == ErrorCode::NoGap);

    RateSet sink_only;
    sink_only.sink.re_minus = 1.0;
    const Superoperator L = build_L(sink_only, 0.0);
    CHECK(error_code_of([&] { spectral_gap(L); }) == ErrorCode::NoGap);
    CHECK(error_code_of([&] { converge(L, rho0, 1e-8); }) == ErrorCode::NoGap);

    const Superoperator typical = build_L(thermal_rates(typical_params()), 0.0);
    CHECK_THROWS_AS(converge(typical, rho0, 0.0), std::invalid_argument);
    const auto traj = evolve(typical, rho0, 1.0, 0.5);
    CHECK_THROWS_AS(fit_decay_rate(traj, rho0.matrix(), 10.0), std::invalid_argument);
}
