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

#include "nessflow/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

namespace nessflow {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::DegenerateLevels: return "DegenerateLevels";
    case ErrorCode::NegativeBrightness: return "NegativeBrightness";
    case ErrorCode::BadTemperature: return "BadTemperature";
    case ErrorCode::BadDrive: return "BadDrive";
    case ErrorCode::BadConstant: return "BadConstant";
    case ErrorCode::InvalidRates: return "InvalidRates";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::SingularModel: return "SingularModel";
    case ErrorCode::PreconditionSinkNotCold: return "PreconditionSinkNotCold";
    case ErrorCode::NonzeroLambShift: return "NonzeroLambShift";
    case ErrorCode::NonUnique: return "NonUnique";
    case ErrorCode::NoPhysicalState: return "NoPhysicalState";
    case ErrorCode::NotInsideCone: return "NotInsideCone";
    case ErrorCode::DegeneratePerturbation: return "DegeneratePerturbation";
    case ErrorCode::AmbiguousMatch: return "AmbiguousMatch";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::NoGap: return "NoGap";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::Config: return "Config";
    }
    return "Unknown";
}

std::string_view to_string(ReservoirKind kind) noexcept
{
    switch (kind) {
    case ReservoirKind::em: return "em";
    case ReservoirKind::ph: return "ph";
    case ReservoirKind::sink: return "sink";
    }
    return "?";
}

double LevelEnergies::operator[](int level) const
{
    switch (level) {
    case 0: return eps0;
    case 1: return eps1;
    case 2: return eps2;
    default: throw Error(ErrorCode::DegenerateLevels, "level index out of range");
    }
}

const ReservoirSpec& ModelParams::reservoir(ReservoirKind kind) const
{
    switch (kind) {
    case ReservoirKind::em: return em;
    case ReservoirKind::ph: return ph;
    case ReservoirKind::sink: return sink;
    }
    return em;
}

ReservoirSpec& ModelParams::reservoir(ReservoirKind kind)
{
    return const_cast<ReservoirSpec&>(std::as_const(*this).reservoir(kind));
}

double ModelParams::gap(ReservoirKind kind) const
{
    const auto pair = level_pair(kind);
    return levels[pair.upper] - levels[pair.lower];
}

ModelParams validate(const ModelParams& params)
{
    const auto& lv = params.levels;
    if (!std::isfinite(lv.eps0) || !std::isfinite(lv.eps1) || !std::isfinite(lv.eps2)) {
        throw Error(ErrorCode::DegenerateLevels, "level energies must be finite");
    }
    if (!(lv.eps0 < lv.eps1 && lv.eps1 < lv.eps2)) {
        throw Error(ErrorCode::DegenerateLevels, "levels must satisfy eps0 < eps1 < eps2");
    }
    if (!(params.kB_eV_per_K > 0.0) || !std::isfinite(params.kB_eV_per_K)) {
        throw Error(ErrorCode::BadConstant, "kB_eV_per_K must be finite and positive");
    }
    for (auto kind : kAllReservoirs) {
        const auto& spec = params.reservoir(kind);
        const std::string name(to_string(kind));
        if (spec.kind != kind) {
            throw Error(ErrorCode::Config, "reservoir slot '" + name + "' holds a different kind");
        }
        if (!std::isfinite(spec.brightness)) {
            throw Error(ErrorCode::NegativeBrightness, name + " brightness must be finite");
        }
        if (spec.brightness < 0.0) {
            throw Error(ErrorCode::NegativeBrightness, name + " brightness must be >= 0");
        }
        if (!spec.temperature.is_zero()) {
            const double t = spec.temperature.kelvin_value();
            if (!(t > 0.0) || !std::isfinite(t)) {
                throw Error(ErrorCode::BadTemperature,
                            name + " temperature must be finite and > 0 K, or zero-temperature");
            }
        }
        if (!std::isfinite(spec.gamma_im_minus) || !std::isfinite(spec.gamma_im_plus)) {
            throw Error(ErrorCode::InvalidRates, name + " gamma_im must be finite");
        }
    }
    if (!std::isfinite(params.drive.s)) {
        throw Error(ErrorCode::BadDrive, "drive amplitude must be finite");
    }
    return params;
}

double beta_of(const ReservoirSpec& spec, double kB_eV_per_K)
{
    if (spec.temperature.is_zero()) return std::numeric_limits<double>::infinity();
    return 1.0 / (kB_eV_per_K * spec.temperature.kelvin_value());
}

ModelParams typical_params(double kB_eV_per_K)
{
    ModelParams p;
    p.levels = {0.0, 1.5, 2.0};
    p.em = {ReservoirKind::em, Temperature::kelvin(6000.0), 1.0};
    p.ph = {ReservoirKind::ph, Temperature::kelvin(300.0), 1.0};
    p.sink = {ReservoirKind::sink, Temperature::zero(), 1.0};
    p.kB_eV_per_K = kB_eV_per_K;
    return p;
}

StateDeviation measure_deviation(const Matrix3c& rho)
{
    StateDeviation dev;
    dev.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    dev.trace = std::abs(rho.trace() - cplx(1.0, 0.0));
    const Matrix3c herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix3c> solver(herm, Eigen::EigenvaluesOnly);
    dev.min_eigenvalue = solver.eigenvalues().minCoeff();
    return dev;
}

DensityMatrix::DensityMatrix(const Matrix3c& rho, double tol) : rho_(rho)
{
    if (!rho.allFinite()) throw Error(ErrorCode::InvalidState, "non-finite entries");
    const auto dev = measure_deviation(rho);
    if (dev.hermiticity > tol) {
        throw Error(ErrorCode::InvalidState,
                    "not Hermitian (deviation " + std::to_string(dev.hermiticity) + ")");
    }
    if (dev.trace > tol) {
        throw Error(ErrorCode::InvalidState, "trace != 1 (deviation " + std::to_string(dev.trace) + ")");
    }
    if (dev.min_eigenvalue < -std::max(tol, 1e-10)) {
        throw Error(ErrorCode::InvalidState,
                    "negative eigenvalue " + std::to_string(dev.min_eigenvalue));
    }
}

DensityMatrix DensityMatrix::diagonal(double p22, double p11, double p00)
{
    Matrix3c m = Matrix3c::Zero();
    m(2, 2) = p22;
    m(1, 1) = p11;
    m(0, 0) = p00;
    return DensityMatrix(m);
}

} // namespace nessflow
