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

// model.hpp: Scenario description for a three-level system coupled to the
// em (0<->2), ph (1<->2) and sink (0<->1) reservoirs.
//
// Units: energies in eV, temperatures in K, every rate (brightness, gamma,
// drive amplitude, eigenvalue) in one common arbitrary rate unit.

#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "nessflow/error.hpp"

namespace nessflow {

using cplx = std::complex<double>;

/// k_B such that k_B * 300 K = 0.025 eV.
inline constexpr double kDefaultBoltzmannEvPerK = 0.025 / 300.0;
inline constexpr double kCodataBoltzmannEvPerK = 8.617333262e-5;

struct LevelEnergies {
    double eps0{0.0};
    double eps1{0.0};
    double eps2{0.0};

    double operator[](int level) const;
};

enum class ReservoirKind { em, ph, sink };

inline constexpr std::array<ReservoirKind, 3> kAllReservoirs{
    ReservoirKind::em, ReservoirKind::ph, ReservoirKind::sink};

std::string_view to_string(ReservoirKind kind) noexcept;

/// Lower/upper level coupled by a reservoir: em <-> (0,2), ph <-> (1,2), sink <-> (0,1).
struct LevelPair {
    int lower;
    int upper;
};

constexpr LevelPair level_pair(ReservoirKind kind) noexcept
{
    switch (kind) {
    case ReservoirKind::em: return {0, 2};
    case ReservoirKind::ph: return {1, 2};
    case ReservoirKind::sink: return {0, 1};
    }
    return {0, 0};
}

/// Either a finite positive temperature in kelvin or the zero-temperature limit.
class Temperature {
public:
    static Temperature kelvin(double value) { return Temperature(value); }
    static Temperature zero() { return Temperature(std::nullopt); }

    bool is_zero() const noexcept { return !kelvin_.has_value(); }
    /// Only meaningful when !is_zero().
    double kelvin_value() const noexcept { return kelvin_.value_or(0.0); }

    bool operator==(const Temperature&) const = default;

private:
    explicit Temperature(std::optional<double> k) : kelvin_(k) {}
    std::optional<double> kelvin_;
};

struct ReservoirSpec {
    ReservoirKind kind{ReservoirKind::em};
    Temperature temperature{Temperature::zero()};
    double brightness{0.0};
    double gamma_im_minus{0.0};
    double gamma_im_plus{0.0};
};

struct DriveSpec {
    double s{0.0};
};

struct ModelParams {
    LevelEnergies levels;
    ReservoirSpec em{ReservoirKind::em};
    ReservoirSpec ph{ReservoirKind::ph};
    ReservoirSpec sink{ReservoirKind::sink};
    DriveSpec drive;
    double kB_eV_per_K{kDefaultBoltzmannEvPerK};

    const ReservoirSpec& reservoir(ReservoirKind kind) const;
    ReservoirSpec& reservoir(ReservoirKind kind);

    /// Bohr gap eps_upper - eps_lower of the pair a reservoir drives.
    double gap(ReservoirKind kind) const;
};

/// Returns params unchanged iff every invariant holds; throws Error otherwise.
ModelParams validate(const ModelParams& params);

/// Inverse temperature in 1/eV; +infinity for the zero-temperature limit.
double beta_of(const ReservoirSpec& spec, double kB_eV_per_K = kDefaultBoltzmannEvPerK);

/// Scenario used throughout the reproduction: gaps 2 eV / 0.5 eV, light at
/// 6000 K, phonons at 300 K, sink at zero temperature, unit brightnesses.
ModelParams typical_params(double kB_eV_per_K = kDefaultBoltzmannEvPerK);

// ---------------------------------------------------------------------------
// DensityMatrix

using Matrix3c = Eigen::Matrix3cd;

struct StateDeviation {
    double hermiticity{0.0}; ///< max |rho_ij - conj(rho_ji)|
    double trace{0.0};       ///< |tr rho - 1|
    double min_eigenvalue{0.0};
};

StateDeviation measure_deviation(const Matrix3c& rho);

/// 3x3 Hermitian, unit-trace, positive semidefinite matrix.
/// Construction checks the invariants against the given tolerance
/// (positivity uses a fixed slack of max(tol, 1e-10) below zero).
class DensityMatrix {
public:
    static constexpr double kDefaultTolerance = 1e-12;

    explicit DensityMatrix(const Matrix3c& rho, double tol = kDefaultTolerance);

    static DensityMatrix diagonal(double p22, double p11, double p00);

    const Matrix3c& matrix() const noexcept { return rho_; }
    cplx operator()(int i, int j) const { return rho_(i, j); }
    double population(int i) const { return rho_(i, i).real(); }

private:
    Matrix3c rho_;
};

} // namespace nessflow
