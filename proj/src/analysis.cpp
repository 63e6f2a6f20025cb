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

#include "nessflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "nessflow/spectra.hpp"
#include "nessflow/stationary.hpp"

namespace nessflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kBrentBits = std::numeric_limits<double>::digits / 2;

double softplus(double x)
{
    if (std::isinf(x)) return x > 0 ? x : 0.0;
    return x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

/// log(1 + e^a + e^b)
double log_one_plus_two(double a, double b)
{
    const double m = std::max({0.0, a, b});
    if (std::isinf(m)) return kInf;
    return m + std::log(std::exp(-m) + std::exp(a - m) + std::exp(b - m));
}

struct Factors {
    double a;
    double b;
};

Factors factors(const ModelParams& p)
{
    return {beta_of(p.em, p.kB_eV_per_K) * p.gap(ReservoirKind::em),
            beta_of(p.ph, p.kB_eV_per_K) * p.gap(ReservoirKind::ph)};
}

void require_cold_sink(const RateSet& rates)
{
    if (rates.sink.re_plus != 0.0) {
        throw Error(ErrorCode::PreconditionSinkNotCold, "cone analysis needs gamma^+_sink = 0");
    }
}

void require_zero_temperature_sink(const ModelParams& p)
{
    if (!p.sink.temperature.is_zero()) {
        throw Error(ErrorCode::PreconditionSinkNotCold, "cone analysis needs a zero-temperature sink");
    }
}

void require_no_lamb_shift(const RateSet& rates)
{
    if (rates.has_lamb_shift()) {
        throw Error(ErrorCode::NonzeroLambShift, "bounds assume gamma_im = 0");
    }
}

RateSet checked_rates(const ModelParams& params)
{
    const RateSet rates = thermal_rates(validate(params));
    require_cold_sink(rates);
    return rates;
}

/// |Re mu02| for a cold sink and no level shifts.
double decoherence_rate(const RateSet& r)
{
    return r.em.re_minus + r.em.re_plus + r.ph.re_minus + r.sink.re_plus;
}

/// log(e^x - 1) without overflow.
double log_expm1(double x)
{
    return x > 30.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
}

double quality_max_from(double a, double b)
{
    if (std::isinf(a)) return 0.0;
    const double tail = std::isinf(b) ? 0.0 : 4.0 * std::exp(2.0 * softplus(a) - b);
    return 1.0 / std::sqrt(4.0 * std::exp(a) + 3.0 + tail);
}

/// Section of the cone at C_ph = 1, C_em = e^u, in the variable x = g^-_sink.
/// D(x) = (x - lo)(x - hi) and the population rate sum is s0 + x.
struct Slice {
    bool exists{false};
    double a_rate{0.0}; ///< |Re mu02|
    double s0{0.0};
    double lo{0.0};
    double hi{0.0};
};

Slice slice_at(const ModelParams& p, double c_ph, double c_em)
{
    const double beta_em = beta_of(p.em, p.kB_eV_per_K);
    const double beta_ph = beta_of(p.ph, p.kB_eV_per_K);
    const auto em = thermal_channel(c_em, beta_em, p.gap(ReservoirKind::em));
    const auto ph = thermal_channel(c_ph, beta_ph, p.gap(ReservoirKind::ph));

    Slice s;
    s.a_rate = em.re_minus + em.re_plus + ph.re_minus;
    s.s0 = s.a_rate + ph.re_plus;
    const double radicand = ph.re_minus * (em.re_plus - ph.re_plus);
    if (!(radicand >= 0.0)) return s;
    const double centre = s.a_rate - ph.re_plus;
    const double half = 2.0 * std::sqrt(radicand);
    s.lo = centre - half;
    s.hi = centre + half;
    s.exists = s.hi >= 0.0;
    return s;
}

struct ScanRange {
    double lo;
    double hi;
};

/// Range of u = log(C_em / C_ph) on which the cone is nonempty.
ScanRange cone_u_range(const ModelParams& p)
{
    const auto f = factors(p);
    if (std::isinf(f.a)) {
        throw Error(ErrorCode::NotInsideCone, "a zero-temperature light source leaves no cone");
    }
    const double log_em = log_expm1(f.a);
    // g^+_em > g^+_ph  <=>  u > log(expm1(a) / expm1(b))
    const double start = std::isinf(f.b) ? log_em - 40.0 : log_em - log_expm1(f.b);
    return {start, start + std::max(40.0, 20.0 - start)};
}

/// Coarse uniform scan in u followed by Brent refinement of the best bracket.
/// Returns (u*, g(u*)) for the maximum of g.
std::pair<double, double> maximize_1d(const std::function<double(double)>& g, ScanRange range,
                                      int points)
{
    const double step = (range.hi - range.lo) / points;
    int best = -1;
    double best_val = -kInf;
    for (int k = 1; k <= points; ++k) {
        const double v = g(range.lo + k * step);
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }
    if (best < 0 || !std::isfinite(best_val)) {
        throw Error(ErrorCode::NotInsideCone, "no inside-cone point found");
    }
    const double lo = range.lo + std::max(best - 1, 0) * step + 1e-12 * step;
    const double hi = range.lo + std::min(best + 1, points) * step;
    const auto r = boost::math::tools::brent_find_minima([&](double u) { return -g(u); }, lo, hi,
                                                         kBrentBits);
    if (-r.second >= best_val) return {r.first, -r.second};
    return {range.lo + best * step, best_val};
}

constexpr int kScanPoints = 800;

} // namespace

std::string_view to_string(ConeLocation location) noexcept
{
    switch (location) {
    case ConeLocation::inside: return "inside";
    case ConeLocation::on_surface: return "on_surface";
    case ConeLocation::outside: return "outside";
    }
    return "unknown";
}

ConeClassification classify_cone(const RateSet& rates)
{
    require_cold_sink(rates);
    const double sum = rates.sum_re();
    ConeClassification c;
    c.D = discriminant(rates);
    c.tolerance = 1e-12 * sum * sum;
    if (c.D < -c.tolerance) {
        c.location = ConeLocation::inside;
    } else if (c.D > c.tolerance) {
        c.location = ConeLocation::outside;
    } else {
        c.location = ConeLocation::on_surface;
    }
    return c;
}

ConeClassification classify_cone(const ModelParams& params)
{
    return classify_cone(checked_rates(params));
}

double relaxation_rate(const RateSet& rates)
{
    require_cold_sink(rates);
    const double sum = rates.sum_re();
    const double d = discriminant(rates);
    if (d <= 0.0) return sum;
    const double root = std::sqrt(d);
    if (delta(rates) <= kSingularDeltaTolerance * sum * sum) return sum + root;
    return sum - root;
}

double relaxation_rate(const ModelParams& params)
{
    return relaxation_rate(checked_rates(params));
}

ModelParams with_brightness(ModelParams params, const BrightnessPoint& point)
{
    params.ph.brightness = point.c_ph;
    params.em.brightness = point.c_em;
    params.sink.brightness = point.c_sink;
    return params;
}

std::array<BrightnessPoint, 2> tangency_half_lines(const ModelParams& params)
{
    const auto f = factors(params);
    const double em1 = std::expm1(f.a);
    BrightnessPoint first{0.0, 1.0, 1.0 / std::tanh(0.5 * f.a)};
    BrightnessPoint second{std::expm1(f.b) / em1, 1.0, (std::exp(f.b) + std::exp(f.a)) / em1};
    return {first, second};
}

std::optional<std::pair<double, double>> cone_sink_interval(const ModelParams& params, double c_ph,
                                                            double c_em)
{
    require_zero_temperature_sink(params);
    const Slice s = slice_at(params, c_ph, c_em);
    if (!s.exists) return std::nullopt;
    return std::make_pair(2.0 * std::max(s.lo, 0.0), 2.0 * s.hi);
}

double ratio_bound_term(const ModelParams& params)
{
    const auto f = factors(params);
    if (std::isinf(f.a)) return 0.0;
    if (std::isinf(f.b)) return std::exp(-0.5 * softplus(f.a));
    return std::exp(0.5 * (f.b - softplus(f.a) - log_one_plus_two(f.a, f.b)));
}

double ratio_upper_bound(const ModelParams& params)
{
    return 2.0 + ratio_bound_term(params);
}

double ratio_lower_bound(const ModelParams& params)
{
    return 2.0 - ratio_bound_term(params);
}

double global_max_ratio(const ModelParams& params)
{
    return ratio_upper_bound(params);
}

std::array<BrightnessPoint, 2> ratio_extremal_half_lines(const ModelParams& params)
{
    const auto f = factors(params);
    const double em1 = std::expm1(f.a);
    const double denom = -std::expm1(-f.b);
    const double c_em = 2.0 * em1 / std::expm1(f.b) + em1 * std::exp(-softplus(f.a)) / denom;
    const double inv_f = std::exp(-f.b);
    const double em_over_f = std::exp(f.a - f.b);
    const double centre = inv_f + 2.0 * (1.0 + em_over_f);
    const double spread = 2.0 * std::sqrt((inv_f + 1.0 + em_over_f) * std::exp(-softplus(f.a)));
    return {BrightnessPoint{1.0, c_em, (centre + spread) / denom},
            BrightnessPoint{1.0, c_em, (centre - spread) / denom}};
}

BoundsReport bounds_report(const ModelParams& params)
{
    const RateSet rates = checked_rates(params);
    require_no_lamb_shift(rates);

    BoundsReport rep;
    rep.cone = classify_cone(rates);
    rep.upper_bound = ratio_upper_bound(params);
    rep.lower_bound = ratio_lower_bound(params);
    rep.global_max = global_max_ratio(params);

    const double decoh = decoherence_rate(rates);
    const double sum = rates.sum_re();
    if (rep.cone.location == ConeLocation::inside) {
        const double ratio = sum / decoh;
        rep.ratio_relax_to_decoh = ratio;
        rep.ratio_within_bounds = rep.lower_bound < ratio && ratio < rep.upper_bound;
    }

    const auto fd = flow_decoherence_ratio(params);
    rep.flow_to_decoh = fd.ratio;
    rep.flow_bound = fd.bound;
    rep.flow_within_bound = fd.within;

    rep.Q = oscillation_quality(params);
    rep.Q_max = quality_max_closed_form(params);
    rep.Q_within_max = !rep.Q || *rep.Q <= rep.Q_max * (1.0 + 1e-12);
    return rep;
}

BoundsReport ratio_bounds(const ModelParams& params)
{
    auto rep = bounds_report(params);
    if (rep.cone.location != ConeLocation::inside) {
        throw Error(ErrorCode::NotInsideCone,
                    "ratio bounds need D < 0, got " + std::string(to_string(rep.cone.location)));
    }
    return rep;
}

std::optional<double> equal_rates_surface(const ModelParams& params, double c_ph, double c_em)
{
    require_zero_temperature_sink(params);
    auto p = params;
    p.ph.brightness = c_ph;
    p.em.brightness = c_em;
    const RateSet r = thermal_rates(validate(p));
    require_no_lamb_shift(r);

    const double pm = r.ph.re_minus, pp = r.ph.re_plus;
    const double em = r.em.re_minus, ep = r.em.re_plus;
    const double num = pm * pm + 2.0 * pm * em + 2.0 * pm * pp - 2.0 * pm * ep + em * em -
                       2.0 * em * pp + 2.0 * em * ep - 2.0 * pp * ep + ep * ep;
    const double den = 2.0 * (pm + em + ep);
    if (den == 0.0) return 0.0;
    const double g_sink = num / den;
    if (g_sink < 0.0) return std::nullopt;
    return 2.0 * g_sink;
}

std::optional<double> oscillation_quality(const ModelParams& params)
{
    const RateSet rates = checked_rates(params);
    require_no_lamb_shift(rates);
    const auto cone = classify_cone(rates);
    if (cone.location == ConeLocation::outside) return std::nullopt;
    return std::sqrt(std::max(-cone.D, 0.0)) / rates.sum_re();
}

double quality_max_closed_form(const ModelParams& params)
{
    const auto f = factors(params);
    return quality_max_from(f.a, f.b);
}

BrightnessPoint quality_half_line(const ModelParams& params)
{
    const auto f = factors(params);
    const double E = std::exp(f.a);
    const double F = std::exp(f.b);
    const double fb1 = std::expm1(f.b);
    const double em_ratio = 2.0 + F / (1.0 + E);
    const double sink_ratio = (1.0 + F / (1.0 + E)) * (1.0 + 2.0 * E);
    return {1.0, std::expm1(f.a) / fb1 * em_ratio, sink_ratio / fb1};
}

BrightnessPoint alternate_quality_half_line(const ModelParams& params)
{
    auto point = quality_half_line(params);
    const auto f = factors(params);
    const double E = std::exp(f.a);
    const double F = std::exp(f.b);
    point.c_sink = (1.0 + F / (1.0 + E)) * (1.0 + E / (1.0 + E)) / std::expm1(f.b);
    return point;
}

double flow_decoherence_bound(const ModelParams& params)
{
    return 0.5 * std::exp(-softplus(factors(params).a));
}

FlowDecoherence flow_decoherence_ratio(const ModelParams& params)
{
    const RateSet rates = checked_rates(params);
    require_no_lamb_shift(rates);
    FlowDecoherence out;
    out.bound = flow_decoherence_bound(params);
    const double decoh = decoherence_rate(rates);
    if (decoh > 0.0 && rates.em.re_plus > 0.0) {
        out.ratio = flow_closed_form(rates) / decoh;
    }
    out.within = out.ratio < out.bound;
    return out;
}

RatioExtrema optimize_ratio_on_cone(const ModelParams& params)
{
    require_zero_temperature_sink(params);
    const auto range = cone_u_range(params);

    auto upper = [&](double u) {
        const Slice s = slice_at(params, 1.0, std::exp(u));
        if (!s.exists || !(s.a_rate > 0.0)) return -kInf;
        return (s.s0 + s.hi) / s.a_rate;
    };
    auto lower = [&](double u) {
        const Slice s = slice_at(params, 1.0, std::exp(u));
        if (!s.exists || !(s.a_rate > 0.0)) return -kInf;
        return -(s.s0 + std::max(s.lo, 0.0)) / s.a_rate;
    };

    RatioExtrema out;
    const auto [u_up, v_up] = maximize_1d(upper, range, kScanPoints);
    const Slice s_up = slice_at(params, 1.0, std::exp(u_up));
    out.upper = {v_up, std::exp(u_up), 2.0 * s_up.hi};

    const auto [u_lo, v_lo] = maximize_1d(lower, range, kScanPoints);
    const Slice s_lo = slice_at(params, 1.0, std::exp(u_lo));
    out.lower = {-v_lo, std::exp(u_lo), 2.0 * std::max(s_lo.lo, 0.0)};
    return out;
}

ConeExtremum optimize_quality(const ModelParams& params)
{
    require_zero_temperature_sink(params);
    const auto range = cone_u_range(params);

    // Inner maximum over x = g^-_sink of sqrt(-D)/(s0 + x) on the slice.
    auto inner = [&](double u) -> std::pair<double, double> {
        const Slice s = slice_at(params, 1.0, std::exp(u));
        if (!s.exists) return {0.0, -kInf};
        const double lo = std::max(s.lo, 0.0);
        if (!(s.hi > lo)) return {lo, 0.0};
        auto neg_q = [&](double x) {
            const double d = (x - s.lo) * (x - s.hi);
            return -std::sqrt(std::max(-d, 0.0)) / (s.s0 + x);
        };
        const auto r = boost::math::tools::brent_find_minima(neg_q, lo, s.hi, kBrentBits);
        return {r.first, -r.second};
    };

    const auto [u_best, q_best] = maximize_1d([&](double u) { return inner(u).second; }, range,
                                              kScanPoints);
    return {q_best, std::exp(u_best), 2.0 * inner(u_best).first};
}

TemperatureScan maximize_quality_over_temperatures(double a_min, double a_max, double b_min,
                                                   double b_max, int points)
{
    if (!(a_min > 0.0 && a_max > a_min && b_min > 0.0 && b_max > b_min && points >= 2)) {
        throw Error(ErrorCode::BadTemperature, "temperature scan needs 0 < min < max and points >= 2");
    }
    TemperatureScan best;
    best.value = -1.0;
    const double la = std::log(a_min), lb = std::log(b_min);
    const double da = (std::log(a_max) - la) / (points - 1);
    const double db = (std::log(b_max) - lb) / (points - 1);
    for (int i = 0; i < points; ++i) {
        const double a = std::exp(la + i * da);
        for (int j = 0; j < points; ++j) {
            const double b = std::exp(lb + j * db);
            const double q = quality_max_from(a, b);
            if (q > best.value) best = {q, a, b};
        }
    }
    return best;
}

ModelParams with_thermal_factors(ModelParams base, double a, double b)
{
    base.em.temperature = Temperature::kelvin(base.gap(ReservoirKind::em) / (base.kB_eV_per_K * a));
    base.ph.temperature = Temperature::kelvin(base.gap(ReservoirKind::ph) / (base.kB_eV_per_K * b));
    return base;
}

} // namespace nessflow
