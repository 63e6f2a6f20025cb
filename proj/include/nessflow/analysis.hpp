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

// analysis.hpp: Geometry of the discriminant cone D(C_ph, C_em, C_sink) = 0
// and the relaxation / decoherence / flow diagnostics built on it.
//
// Everything here assumes a cold sink (g^+_sink = 0). Operations that compare
// against decoherence rates additionally require g_im = 0 and throw
// NonzeroLambShift otherwise.
//
// Shorthand used below: a = beta_em (eps2 - eps0), b = beta_ph (eps2 - eps1),
// E = e^a, F = e^b.

#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <utility>

#include "nessflow/model.hpp"
#include "nessflow/rates.hpp"

namespace nessflow {

enum class ConeLocation { inside, on_surface, outside };

std::string_view to_string(ConeLocation location) noexcept;

struct ConeClassification {
    ConeLocation location{ConeLocation::outside};
    double D{0.0};
    double tolerance{0.0}; ///< 1e-12 * (sum_re)^2
};

ConeClassification classify_cone(const RateSet& rates);
ConeClassification classify_cone(const ModelParams& params);

/// Slowest nonzero population decay rate: sum_re inside the cone,
/// sum_re - sqrt(D) outside. When Delta = 0 the slow root is itself zero
/// (a second stationary direction) and sum_re + sqrt(D) is returned instead.
double relaxation_rate(const RateSet& rates);
double relaxation_rate(const ModelParams& params);

/// A direction in brightness space (C_ph, C_em, C_sink).
struct BrightnessPoint {
    double c_ph{0.0};
    double c_em{0.0};
    double c_sink{0.0};
};

/// Copy of params with the three brightnesses replaced.
ModelParams with_brightness(ModelParams params, const BrightnessPoint& point);

/// The two half-lines along which the cone touches C_ph = 0 and
/// g^+_ph = g^+_em. Both are normalized to C_em = 1.
std::array<BrightnessPoint, 2> tangency_half_lines(const ModelParams& params);

/// C_sink interval on which D <= 0 for fixed (C_ph, C_em), clipped to
/// C_sink >= 0. Empty when the line misses the cone.
std::optional<std::pair<double, double>> cone_sink_interval(const ModelParams& params, double c_ph,
                                                            double c_em);

/// sqrt(F / ((1 + E)(1 + F + E))), evaluated in log space.
double ratio_bound_term(const ModelParams& params);
double ratio_upper_bound(const ModelParams& params);
double ratio_lower_bound(const ModelParams& params);

/// 2 + ratio_bound_term: the supremum of |Re lambda_+| / |Re mu02| over all brightnesses.
double global_max_ratio(const ModelParams& params);

/// Supremum of global_max_ratio over all temperatures: 2 + sqrt(2)/2.
inline constexpr double kRatioCap = 2.0 + 0.70710678118654752440;

/// Points (normalized to C_ph = 1) where the upper and lower ratio bounds are
/// attained; index 0 is the upper bound.
std::array<BrightnessPoint, 2> ratio_extremal_half_lines(const ModelParams& params);

struct BoundsReport {
    ConeClassification cone;
    std::optional<double> ratio_relax_to_decoh; ///< present inside the cone
    double upper_bound{0.0};
    double lower_bound{0.0};
    double global_max{0.0};
    bool ratio_within_bounds{true};
    double flow_to_decoh{0.0};
    double flow_bound{0.0};
    bool flow_within_bound{true};
    std::optional<double> Q; ///< present inside the cone
    double Q_max{0.0};
    bool Q_within_max{true};

    bool all_within() const { return ratio_within_bounds && flow_within_bound && Q_within_max; }
};

/// Everything above at one parameter point.
BoundsReport bounds_report(const ModelParams& params);

/// bounds_report restricted to inside-cone points; throws NotInsideCone otherwise.
BoundsReport ratio_bounds(const ModelParams& params);

/// Sink brightness on which |Re lambda_+| = |Re mu02| for the given (C_ph, C_em).
/// Empty when the solution is negative.
std::optional<double> equal_rates_surface(const ModelParams& params, double c_ph, double c_em);

/// sqrt(-D) / sum_re inside the cone, empty elsewhere.
std::optional<double> oscillation_quality(const ModelParams& params);

/// Largest Q over all brightnesses at the temperatures of params:
/// Q_max^2 = F / (F (4E + 3) + 4 (E + 1)^2).
double quality_max_closed_form(const ModelParams& params);

/// Brightness ratios (C_ph = 1) along which Q_max is attained:
/// g^+_em / g^+_ph = 2 + F/(1+E) and g^-_sink / g^+_ph = (1 + F/(1+E))(1 + 2E).
BrightnessPoint quality_half_line(const ModelParams& params);

/// Variant with g^-_sink / g^+_ph = (1 + F/(1+E))(1 + E/(1+E)) proposed for
/// the same maximum. It lies outside the cone.
BrightnessPoint alternate_quality_half_line(const ModelParams& params);

struct FlowDecoherence {
    double ratio{0.0};
    double bound{0.0};
    bool within{true};
};

/// Flow / |Re mu02| against 1 / (2 (1 + E)).
FlowDecoherence flow_decoherence_ratio(const ModelParams& params);
double flow_decoherence_bound(const ModelParams& params);

/// Result of a numerical search over brightness ratios with C_ph = 1.
struct ConeExtremum {
    double value{0.0};
    double c_em_over_c_ph{0.0};
    double c_sink_over_c_ph{0.0};
};

struct RatioExtrema {
    ConeExtremum upper;
    ConeExtremum lower;
};

/// Extremes of |Re lambda_pm| / |Re mu02| over the closed cone, by a
/// log-grid scan in C_em/C_ph refined with Brent's method.
RatioExtrema optimize_ratio_on_cone(const ModelParams& params);

/// Largest oscillation quality over the cone, by the same scan with an inner
/// Brent search over C_sink.
ConeExtremum optimize_quality(const ModelParams& params);

struct TemperatureScan {
    double value{0.0};
    double a{0.0};
    double b{0.0};
};

/// Largest quality_max_closed_form over a log grid of a in [a_min, a_max]
/// and b in [b_min, b_max].
TemperatureScan maximize_quality_over_temperatures(double a_min = 1e-3, double a_max = 10.0,
                                                   double b_min = 1e-2, double b_max = 60.0,
                                                   int points = 121);

/// Params whose em and ph temperatures realize the given a and b for the
/// level gaps of `base`.
ModelParams with_thermal_factors(ModelParams base, double a, double b);

} // namespace nessflow
