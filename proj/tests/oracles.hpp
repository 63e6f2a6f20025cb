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

// oracles.hpp: Independent reference computations used only by the tests.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "nessflow/generator.hpp"
#include "nessflow/model.hpp"
#include "nessflow/rates.hpp"

namespace nessflow::oracle {

inline constexpr cplx kI{0.0, 1.0};

inline Matrix3c ket_bra(int i, int j)
{
    Matrix3c m = Matrix3c::Zero();
    m(i, j) = 1.0;
    return m;
}

inline Matrix3c commutator(const Matrix3c& a, const Matrix3c& b)
{
    return a * b - b * a;
}

/// theta_R written with projectors and anticommutators, term by term.
inline Matrix3c theta_channel(const ChannelRates& c, int i, int j, const Matrix3c& rho)
{
    const Matrix3c pi = ket_bra(i, i);
    const Matrix3c pj = ket_bra(j, j);
    Matrix3c out = 2.0 * c.re_minus * (rho(j, j) * pi - 0.5 * (rho * pj + pj * rho));
    out += -kI * c.im_minus * commutator(rho, pj);
    out += 2.0 * c.re_plus * (rho(i, i) * pj - 0.5 * (rho * pi + pi * rho));
    out += kI * c.im_plus * commutator(rho, pi);
    return out;
}

inline Matrix3c generator_direct(const RateSet& r, double s, const Matrix3c& rho)
{
    Matrix3c h = Matrix3c::Zero();
    h(2, 0) = s;
    h(0, 2) = s;
    return theta_channel(r.em, 0, 2, rho) + theta_channel(r.ph, 1, 2, rho) + theta_channel(r.sink, 0, 1, rho) +
           kI * commutator(rho, h);
}

/// 9x9 matrix of the direct generator in the ordered basis
/// |2><2|, |1><1|, |0><0|, |2><0|, |0><2|, |0><1|, |2><1|, |1><0|, |1><2|.
inline Matrix9c generator_matrix_direct(const RateSet& r, double s)
{
    static constexpr int rows[9] = {2, 1, 0, 2, 0, 0, 2, 1, 1};
    static constexpr int cols[9] = {2, 1, 0, 0, 2, 1, 1, 0, 2};
    Matrix9c m;
    for (int k = 0; k < 9; ++k) {
        const Matrix3c out = generator_direct(r, s, ket_bra(rows[k], cols[k]));
        for (int q = 0; q < 9; ++q) m(q, k) = out(rows[q], cols[q]);
    }
    return m;
}

/// Rate matrix of the population equations, order (rho22, rho11, rho00).
inline Eigen::Matrix3d pauli_matrix(const RateSet& r)
{
    Eigen::Matrix3d p;
    p << -2 * r.em.re_minus - 2 * r.ph.re_minus, 2 * r.ph.re_plus, 2 * r.em.re_plus,
        2 * r.ph.re_minus, -2 * r.ph.re_plus - 2 * r.sink.re_minus, 2 * r.sink.re_plus,
        2 * r.em.re_minus, 2 * r.sink.re_minus, -2 * r.em.re_plus - 2 * r.sink.re_plus;
    return p;
}

inline std::array<cplx, 3> pauli_eigenvalues(const RateSet& r)
{
    Eigen::EigenSolver<Eigen::Matrix3d> es(pauli_matrix(r));
    std::array<cplx, 3> ev{es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return ev;
}

/// Normalized kernel of the population rate matrix.
inline Eigen::Vector3d pauli_kernel(const RateSet& r)
{
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(pauli_matrix(r), Eigen::ComputeFullV);
    Eigen::Vector3d v = svd.matrixV().col(2);
    return v / v.sum();
}

/// Normalized kernel of a 5x5 block, scaled so the three populations sum to 1.
inline Eigen::Matrix<cplx, 5, 1> block_kernel(const Matrix5c& m)
{
    Eigen::JacobiSVD<Matrix5c> svd(m, Eigen::ComputeFullV);
    Eigen::Matrix<cplx, 5, 1> v = svd.matrixV().col(4);
    return v / (v(0) + v(1) + v(2));
}

inline Vector9c expm_propagate(const Matrix9c& L, const Vector9c& v0, double t)
{
    const Matrix9c e = (L * t).exp();
    return e * v0;
}

/// Coefficients c0..c5 of a degree-5 polynomial from six samples (Vandermonde solve).
template <class F>
std::array<cplx, 6> fit_quintic(F&& p, double scale)
{
    Eigen::Matrix<cplx, 6, 6> v;
    Eigen::Matrix<cplx, 6, 1> y;
    for (int k = 0; k < 6; ++k) {
        const cplx x = scale * cplx(std::cos(0.9 * k + 0.3), std::sin(0.9 * k + 0.3));
        cplx xp = 1.0;
        for (int q = 0; q < 6; ++q) {
            v(k, q) = xp;
            xp *= x;
        }
        y(k) = p(x);
    }
    const Eigen::Matrix<cplx, 6, 1> c = v.fullPivLu().solve(y);
    return {c(0), c(1), c(2), c(3), c(4), c(5)};
}

/// Gibbs populations (p22, p11, p00) at inverse temperature beta.
inline Eigen::Vector3d gibbs(const LevelEnergies& e, double beta)
{
    Eigen::Vector3d w(std::exp(-beta * (e.eps2 - e.eps0)), std::exp(-beta * (e.eps1 - e.eps0)), 1.0);
    return w / w.sum();
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

/// Random rates with gamma^- >= gamma^+ >= 0; the sink is cold with probability 1/2.
inline RateSet random_rates(std::mt19937_64& rng, bool with_lamb_shift = false)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> n(0.0, 0.3);
    auto channel = [&](bool cold) {
        ChannelRates c;
        c.re_minus = log_uniform(rng, 1e-2, 1e1);
        c.re_plus = cold ? 0.0 : c.re_minus * u(rng);
        if (with_lamb_shift) {
            c.im_minus = n(rng);
            c.im_plus = n(rng);
        }
        return c;
    };
    RateSet r;
    r.em = channel(false);
    r.ph = channel(false);
    r.sink = channel(u(rng) < 0.5);
    return r;
}

/// Random thermal scenario around the typical levels with a cold sink.
inline ModelParams random_params(std::mt19937_64& rng, bool cold_sink = true)
{
    ModelParams p = typical_params();
    p.em.temperature = Temperature::kelvin(log_uniform(rng, 300.0, 1e5));
    p.ph.temperature = Temperature::kelvin(log_uniform(rng, 10.0, 1e4));
    p.sink.temperature = cold_sink ? Temperature::zero() : Temperature::kelvin(log_uniform(rng, 10.0, 1e4));
    p.em.brightness = log_uniform(rng, 1e-3, 1e3);
    p.ph.brightness = log_uniform(rng, 1e-3, 1e3);
    p.sink.brightness = log_uniform(rng, 1e-3, 1e3);
    return validate(p);
}

inline Matrix3c random_hermitian(std::mt19937_64& rng, bool unit_trace = true)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix3c a;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = cplx(n(rng), n(rng));
    Matrix3c h = a * a.adjoint();
    if (unit_trace) h /= h.trace().real();
    return h;
}

inline double max_abs(const Matrix3c& m)
{
    return m.cwiseAbs().maxCoeff();
}

inline double rel_err(double a, double b)
{
    const double d = std::abs(a - b);
    const double m = std::max(std::abs(a), std::abs(b));
    return m == 0.0 ? d : d / m;
}

} // namespace nessflow::oracle
