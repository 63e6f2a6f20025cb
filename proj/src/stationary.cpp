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

#include "nessflow/stationary.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "nessflow/spectra.hpp"

namespace nessflow {

namespace {

struct Populations {
    double p22;
    double p11;
    double p00;
    double delta;
};

/// Kernel of the 3x3 Pauli matrix by cofactors. Only the real parts of the
/// coefficients enter.
Populations pauli_kernel(const RateSet& r)
{
    const double em_m = r.em.re_minus, em_p = r.em.re_plus;
    const double ph_m = r.ph.re_minus, ph_p = r.ph.re_plus;
    const double sk_m = r.sink.re_minus, sk_p = r.sink.re_plus;

    const double n22 = ph_p * em_p + sk_m * em_p + sk_p * ph_p;
    const double n11 = ph_m * em_p + ph_m * sk_p + em_m * sk_p;
    const double n00 = em_m * ph_p + ph_m * sk_m + em_m * sk_m;
    const double d = n22 + n11 + n00;

    const double scale = r.sum_re();
    if (!(scale > 0.0) || !(d > kSingularDeltaTolerance * scale * scale)) {
        throw Error(ErrorCode::SingularModel,
                    "Delta = " + std::to_string(d) + " vanishes; stationary state is not unique");
    }
    return {n22 / d, n11 / d, n00 / d, d};
}

double sink_current(const RateSet& r, double p11, double p00)
{
    return 2.0 * r.sink.re_minus * p11 - 2.0 * r.sink.re_plus * p00;
}

void require_cold_sink(const RateSet& r)
{
    if (r.sink.re_plus != 0.0) {
        throw Error(ErrorCode::PreconditionSinkNotCold, "closed-form flow needs gamma^+_sink = 0");
    }
}

} // namespace

double delta(const RateSet& r)
{
    const double em_m = r.em.re_minus, em_p = r.em.re_plus;
    const double ph_m = r.ph.re_minus, ph_p = r.ph.re_plus;
    const double sk_m = r.sink.re_minus, sk_p = r.sink.re_plus;
    return ph_p * em_p + sk_m * em_p + sk_p * ph_p + ph_m * em_p + ph_m * sk_p + em_m * sk_p +
           em_m * ph_p + ph_m * sk_m + em_m * sk_m;
}

StationaryState stationary_closed_form(const RateSet& rates)
{
    const auto pop = pauli_kernel(rates);
    return {DensityMatrix::diagonal(pop.p22, pop.p11, pop.p00), pop.delta,
            sink_current(rates, pop.p11, pop.p00)};
}

double flow(const RateSet& rates, const StationaryState& state)
{
    require_cold_sink(rates);
    return 2.0 * rates.sink.re_minus * state.rho.population(1);
}

double flow_closed_form(const RateSet& rates)
{
    require_cold_sink(rates);
    const double d = delta(rates);
    if (!(d > 0.0)) throw Error(ErrorCode::SingularModel, "Delta = 0");
    return 2.0 * rates.sink.re_minus * rates.ph.re_minus * rates.em.re_plus / d;
}

double flow_brightness_form(const ModelParams& params)
{
    if (!params.sink.temperature.is_zero()) {
        throw Error(ErrorCode::PreconditionSinkNotCold, "brightness-form flow needs a zero-temperature sink");
    }
    const double c_ph = params.ph.brightness;
    const double c_em = params.em.brightness;
    const double c_sink = params.sink.brightness;
    const double a = beta_of(params.em, params.kB_eV_per_K) * params.gap(ReservoirKind::em);
    const double b = beta_of(params.ph, params.kB_eV_per_K) * params.gap(ReservoirKind::ph);
    // Numerator and denominator multiplied through by e^{-a} so that a cold
    // light source cannot overflow.
    const double ea = std::exp(-a);
    const double eb = std::exp(-b);
    const double num = ea * c_ph * c_em * c_sink;
    const double den = (ea + eb * (ea + 1.0)) * c_ph * c_em + (-std::expm1(-a)) * c_ph * c_sink +
                       (ea + 1.0) * (-std::expm1(-b)) * c_sink * c_em;
    if (!(den > 0.0)) throw Error(ErrorCode::SingularModel, "flow denominator vanishes");
    return num / den;
}

PairwiseFlows pairwise_flows(const RateSet& r, const DensityMatrix& rho)
{
    const double p22 = rho.population(2), p11 = rho.population(1), p00 = rho.population(0);
    PairwiseFlows j;
    j.em = 2.0 * r.em.re_plus * p00 - 2.0 * r.em.re_minus * p22;
    j.ph = 2.0 * r.ph.re_minus * p22 - 2.0 * r.ph.re_plus * p11;
    j.sink = 2.0 * r.sink.re_minus * p11 - 2.0 * r.sink.re_plus * p00;
    return j;
}

StationaryState stationary_with_field(const RateSet& rates, double s)
{
    if (s == 0.0) return stationary_closed_form(rates);
    if (!std::isfinite(s)) throw Error(ErrorCode::BadDrive, "drive amplitude must be finite");

    const cplx mu20 = std::conj(mus(rates).mu02);
    if (!(mu20.real() < 0.0)) {
        throw Error(ErrorCode::SingularModel, "Re mu20 must be negative for a driven stationary state");
    }
    const double shift = -s * s * (1.0 / mu20).real();
    RateSet dressed = rates;
    dressed.em.re_minus += shift;
    dressed.em.re_plus += shift;
    const auto pop = pauli_kernel(dressed);

    const auto& r = rates;
    const double numer = (r.ph.re_plus + r.sink.re_minus) * (r.em.re_minus - r.em.re_plus) -
                         r.sink.re_plus * r.ph.re_plus + r.ph.re_minus * r.sink.re_minus;
    const cplx rho20 = cplx(0.0, s) / mu20 * (numer / pop.delta);

    Matrix3c m = Matrix3c::Zero();
    m(2, 2) = pop.p22;
    m(1, 1) = pop.p11;
    m(0, 0) = pop.p00;
    m(2, 0) = rho20;
    m(0, 2) = std::conj(rho20);
    return {DensityMatrix(m), pop.delta, sink_current(rates, pop.p11, pop.p00)};
}

StationaryState stationary_state(const RateSet& rates, double s)
{
    return s == 0.0 ? stationary_closed_form(rates) : stationary_with_field(rates, s);
}

StationaryState nullspace_oracle(const Superoperator& L)
{
    Eigen::JacobiSVD<Matrix9c> svd(L.matrix(), Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double largest = sv(0);
    if (!(largest > 0.0)) throw Error(ErrorCode::NonUnique, "generator is zero; kernel is 9-dimensional");

    int kernel_dim = 0;
    for (int k = 0; k < 9; ++k) {
        if (sv(k) < kKernelRelativeTolerance * largest) ++kernel_dim;
    }
    if (kernel_dim > 1) {
        throw Error(ErrorCode::NonUnique, "kernel dimension " + std::to_string(kernel_dim));
    }
    if (kernel_dim == 0) throw Error(ErrorCode::NoPhysicalState, "generator has no kernel");

    const Vector9c v = svd.matrixV().col(8);
    const cplx tr = v(0) + v(1) + v(2);
    if (std::abs(tr) < 1e-12 * v.norm()) {
        throw Error(ErrorCode::NoPhysicalState, "kernel vector is traceless");
    }
    Matrix3c rho = devectorize(v / tr);
    rho = 0.5 * (rho + rho.adjoint()).eval();

    const auto dev = measure_deviation(rho);
    if (dev.min_eigenvalue < -1e-8) {
        throw Error(ErrorCode::NoPhysicalState,
                    "kernel state has eigenvalue " + std::to_string(dev.min_eigenvalue));
    }
    return {DensityMatrix(rho, 1e-10), std::nullopt, std::nullopt};
}

} // namespace nessflow
