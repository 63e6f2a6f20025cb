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

// spectra.hpp: Eigenvalues of the generator: population relaxation roots,
// coherence decay rates, and their deformation under a resonant drive.
//
// Square roots use the principal branch. lambda_plus is the root with the
// larger real part for D > 0 and the one with positive imaginary part for D < 0.

#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "nessflow/generator.hpp"
#include "nessflow/rates.hpp"

namespace nessflow {

/// Half-discriminant D = (sum_re)^2 - 4 Delta of the population quadratic.
double discriminant(const RateSet& rates);

struct LambdaPair {
    cplx plus;
    cplx minus;
};

/// lambda_pm = -sum_re +- sqrt(D).
LambdaPair lambdas(const RateSet& rates);

/// Coherence eigenvalues: theta(|i><j|) = mu_ij |i><j|.
struct CoherenceRates {
    cplx mu01;
    cplx mu02;
    cplx mu12;

    /// theta(|2><1|) = mu21 |2><1| with mu21 = conj(mu12); likewise mu20, mu10.
    cplx mu21() const { return std::conj(mu12); }
    cplx mu20() const { return std::conj(mu02); }
};

CoherenceRates mus(const RateSet& rates);

/// Polynomial coefficients, lowest degree first.
struct CharPolySplit {
    std::array<double, 5> h1; ///< (x - l+)(x - l-)(x - mu02)(x - conj mu02), monic quartic
    std::array<double, 3> h2; ///< 4 (x - Re mu02)(x - lambda_r)
    double lambda_r;

    /// Monic quartic h1 + s^2 h2 as (w0, w1, w2, w3).
    std::array<double, 4> quartic(double s) const;
};

/// det(x I - L_ds) = x (h1(x) + s^2 h2(x)).
CharPolySplit char_poly_split(const RateSet& rates);

/// w1^2 - w1 w2 w3 + w3^2 w0; zero is necessary for a nonzero pure-imaginary root
/// of x^4 + w3 x^3 + w2 x^2 + w1 x + w0.
double pure_imaginary_criterion(double w0, double w1, double w2, double w3);

struct DressedSpectrum {
    /// Eigenvalues of the 5x5 L_ds, sorted by ascending |lambda| (the zero mode first).
    std::array<cplx, 5> l_ds;
    cplx mu21_s;
    cplx mu01_s;
};

struct SpectrumReport {
    double s{0.0};
    double D{0.0};
    cplx lambda_plus;
    cplx lambda_minus;
    cplx mu01;
    cplx mu02;
    cplx mu12;
    std::optional<DressedSpectrum> dressed;
};

/// Closed-form coherence eigenvalues of the 2x2 L_nd block.
std::pair<cplx, cplx> dressed_nd_pair(const RateSet& rates, double s);

/// Full report: closed forms plus the numerically diagonalized L_ds.
SpectrumReport dressed_spectrum(const RateSet& rates, double s);

/// Eigenvalues of L_ds, sorted by ascending magnitude.
std::array<cplx, 5> l_ds_eigenvalues(const RateSet& rates, double s);

struct WeakFieldPrediction {
    cplx lambda_plus;
    cplx lambda_minus;
    cplx mu02;
    cplx mu20;
    /// Set when mu02 is real: the coherence pair is then a double eigenvalue,
    /// rho20 + rho02 decouples (mu20 stays at mu02) and rho20 - rho02 takes
    /// twice the second-order shift.
    bool degenerate_pair{false};
};

/// Second-order small-s expansion of the L_ds eigenvalues.
/// Throws DegeneratePerturbation if lambda_+ == lambda_- or a lambda meets mu02.
WeakFieldPrediction weak_field_expansion(const RateSet& rates, double s);

struct StrongFieldLimits {
    double lambda_r;       ///< limit of the real root that tends to lambda_r
    double lambda_mu;      ///< limit of the real root that tends to Re mu02
    double lambda_s_real;  ///< limiting real part of the pair ~ +-2is
};

/// s -> infinity limits of the four nonzero L_ds eigenvalues. The real part of
/// the oscillating pair follows from trace invariance:
///   Re lambda_s = -(3 g^-_em + 3 g^+_em + 2 g^-_ph + 2 g^+_sink) / 2.
StrongFieldLimits strong_field_limits(const RateSet& rates);

/// The alternative closed form -(g^-_ph + 2 g^-_em + 2 g^+_em + g^+_sink)/2
/// that circulates for Re lambda_s. It disagrees with the eigenvalues; kept
/// so reports can show the discrepancy.
double alternate_strong_field_real_part(const RateSet& rates);

/// Greedy nearest-neighbour pairing of predictions to numerical eigenvalues.
/// Returns, for each prediction, the index of its partner. Throws
/// AmbiguousMatch if two distinct candidates sit within `ambiguity` of the
/// same distance.
std::vector<int> match_eigenvalues(std::span<const cplx> predicted, std::span<const cplx> numeric,
                                   double ambiguity = 1e-9);

} // namespace nessflow
