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

#include "nessflow/sweep.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <random>
#include <string>

#include <omp.h>

#include "nessflow/rates.hpp"
#include "nessflow/spectra.hpp"
#include "nessflow/stationary.hpp"

namespace nessflow {

namespace {

std::string lowercase(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return lo + (hi - lo) * unit(rng);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

/// log(e^x - 1) without overflow.
double log_expm1(double x)
{
    return x > 30.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::size_t index)
{
    const auto i = static_cast<std::uint64_t>(index);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    return std::mt19937_64(seq);
}

struct Outcome {
    bool inside{false};
    bool ratio_violation{false};
    bool flow_violation{false};
    bool cap_violation{false};
    bool oscillation_violation{false};
    double ratio{std::numeric_limits<double>::quiet_NaN()};
    double upper{0.0};
    double flow_fraction{0.0};
};

Outcome evaluate_sample(const ModelParams& base, const MonteCarloSpec& spec, std::size_t index)
{
    const Sample sample = draw_sample(base, spec, index);
    const auto rep = bounds_report(sample.params);

    Outcome o;
    o.upper = rep.upper_bound;
    o.inside = rep.ratio_relax_to_decoh.has_value();
    if (o.inside) {
        o.ratio = *rep.ratio_relax_to_decoh;
        o.ratio_violation = !rep.ratio_within_bounds;
    }
    o.flow_violation = !rep.flow_within_bound;
    o.flow_fraction = rep.flow_to_decoh / rep.flow_bound;
    o.cap_violation = rep.upper_bound >= kRatioCap || (o.inside && o.ratio >= kRatioCap);

    const RateSet rates = thermal_rates(sample.params);
    const auto ev = l_ds_eigenvalues(rates, sample.s);
    for (std::size_t k = 1; k < ev.size(); ++k) {
        if (!(ev[k].real() < 0.0)) o.oscillation_violation = true;
    }
    return o;
}

MonteCarloSummary reduce(const std::vector<Outcome>& outcomes)
{
    MonteCarloSummary s;
    s.samples = outcomes.size();
    s.min_ratio = std::numeric_limits<double>::infinity();
    for (const auto& o : outcomes) {
        s.inside_cone += o.inside;
        s.ratio_violations += o.ratio_violation;
        s.flow_violations += o.flow_violation;
        s.cap_violations += o.cap_violation;
        s.oscillation_violations += o.oscillation_violation;
        if (o.inside) {
            s.max_ratio = std::max(s.max_ratio, o.ratio);
            s.min_ratio = std::min(s.min_ratio, o.ratio);
        }
        s.max_upper_bound = std::max(s.max_upper_bound, o.upper);
        s.max_flow_fraction = std::max(s.max_flow_fraction, o.flow_fraction);
    }
    if (s.inside_cone == 0) s.min_ratio = 0.0;
    return s;
}

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn)
{
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_cap())
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace

int thread_cap()
{
    const int available = omp_get_max_threads();
    if (const char* env = std::getenv("NESSFLOW_THREADS")) {
        char* end = nullptr;
        const long requested = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && requested > 0) {
            return static_cast<int>(std::min<long>(requested, available));
        }
    }
    return available;
}

SweepVariable parse_sweep_variable(std::string_view name)
{
    const std::string key = lowercase(name);
    if (key == "c_em") return SweepVariable::c_em;
    if (key == "c_ph") return SweepVariable::c_ph;
    if (key == "c_sink") return SweepVariable::c_sink;
    if (key == "s") return SweepVariable::s;
    throw Error(ErrorCode::Config, "unknown sweep variable '" + std::string(name) +
                                       "' (expected C_em, C_ph, C_sink or s)");
}

std::string_view to_string(SweepVariable variable) noexcept
{
    switch (variable) {
    case SweepVariable::c_em: return "C_em";
    case SweepVariable::c_ph: return "C_ph";
    case SweepVariable::c_sink: return "C_sink";
    case SweepVariable::s: return "s";
    }
    return "unknown";
}

std::vector<double> sweep_grid(const SweepSpec& spec)
{
    if (spec.points < 2) throw Error(ErrorCode::Config, "sweep needs at least 2 points");
    if (!std::isfinite(spec.from) || !std::isfinite(spec.to) || spec.from == spec.to) {
        throw Error(ErrorCode::Config, "sweep range must be finite and non-empty");
    }
    if (spec.log && !(spec.from > 0.0 && spec.to > 0.0)) {
        throw Error(ErrorCode::Config, "log sweep needs positive endpoints");
    }
    std::vector<double> grid(static_cast<std::size_t>(spec.points));
    const double last = spec.points - 1;
    for (int k = 0; k < spec.points; ++k) {
        const double f = k / last;
        grid[k] = spec.log ? std::exp(std::log(spec.from) + f * (std::log(spec.to) - std::log(spec.from)))
                           : spec.from + f * (spec.to - spec.from);
    }
    grid.front() = spec.from;
    grid.back() = spec.to;
    return grid;
}

ModelParams apply_sweep_value(ModelParams params, SweepVariable variable, double value)
{
    switch (variable) {
    case SweepVariable::c_em: params.em.brightness = value; break;
    case SweepVariable::c_ph: params.ph.brightness = value; break;
    case SweepVariable::c_sink: params.sink.brightness = value; break;
    case SweepVariable::s: params.drive.s = value; break;
    }
    return params;
}

SweepRow evaluate_point(const ModelParams& params)
{
    const RateSet rates = thermal_rates(validate(params));
    const auto state = stationary_state(rates, params.drive.s);

    SweepRow row;
    row.rho22 = state.rho.population(2);
    row.rho11 = state.rho.population(1);
    row.rho00 = state.rho.population(0);
    row.rho20 = state.rho(2, 0);
    row.flow = state.flow.value_or(0.0);
    const auto lam = lambdas(rates);
    row.lambda_plus = lam.plus;
    row.lambda_minus = lam.minus;
    if (rates.sink.re_plus == 0.0) {
        const auto cone = classify_cone(rates);
        row.cone = cone.location;
        if (cone.location != ConeLocation::outside) {
            row.Q = std::sqrt(std::max(-cone.D, 0.0)) / rates.sum_re();
        }
    }
    return row;
}

std::vector<SweepRow> run_sweep_serial(const ModelParams& base, const SweepSpec& spec)
{
    const auto grid = sweep_grid(spec);
    std::vector<SweepRow> rows(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        rows[k] = evaluate_point(apply_sweep_value(base, spec.variable, grid[k]));
        rows[k].value = grid[k];
    }
    return rows;
}

std::vector<SweepRow> run_sweep(const ModelParams& base, const SweepSpec& spec)
{
    const auto grid = sweep_grid(spec);
    std::vector<SweepRow> rows(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) {
        rows[k] = evaluate_point(apply_sweep_value(base, spec.variable, grid[k]));
        rows[k].value = grid[k];
    });
    return rows;
}

Sample draw_sample(const ModelParams& base, const MonteCarloSpec& spec, std::size_t index)
{
    auto rng = sample_rng(spec.seed, index);
    Sample out{base, 0.0};
    auto& p = out.params;
    p.sink.temperature = Temperature::zero();
    p.em.gamma_im_minus = p.em.gamma_im_plus = 0.0;
    p.ph.gamma_im_minus = p.ph.gamma_im_plus = 0.0;
    p.sink.gamma_im_minus = p.sink.gamma_im_plus = 0.0;

    if (spec.random_temperatures) {
        p.em.temperature = Temperature::kelvin(log_uniform(rng, 300.0, 1e5));
        p.ph.temperature = Temperature::kelvin(log_uniform(rng, 10.0, 1e4));
    }

    if (spec.mode == SampleMode::random_brightness) {
        p.ph.brightness = log_uniform(rng, 1e-3, 1e3);
        p.em.brightness = log_uniform(rng, 1e-3, 1e3);
        p.sink.brightness = log_uniform(rng, 1e-3, 1e3);
    } else {
        const double a = beta_of(p.em, p.kB_eV_per_K) * p.gap(ReservoirKind::em);
        const double b = beta_of(p.ph, p.kB_eV_per_K) * p.gap(ReservoirKind::ph);
        // The cone section is nonempty once g^+_em exceeds g^+_ph.
        const double u0 = log_expm1(a) - log_expm1(b);
        const double span = std::max(30.0, 15.0 - u0);
        p.ph.brightness = log_uniform(rng, 1e-2, 1e2);
        p.em.brightness = p.ph.brightness * std::exp(u0 + uniform(rng, 0.0, span));
        const double t = uniform(rng, 1e-3, 1.0 - 1e-3);
        const auto interval = cone_sink_interval(p, p.ph.brightness, p.em.brightness);
        p.sink.brightness = interval ? interval->first + t * (interval->second - interval->first)
                                     : log_uniform(rng, 1e-3, 1e3);
    }

    const double scale = thermal_rates(p).sum_re();
    out.s = scale * log_uniform(rng, 1e-3, 1e3);
    return out;
}

MonteCarloSummary monte_carlo_bounds_serial(const ModelParams& base, const MonteCarloSpec& spec)
{
    std::vector<Outcome> outcomes(spec.samples);
    for (std::size_t i = 0; i < spec.samples; ++i) outcomes[i] = evaluate_sample(base, spec, i);
    return reduce(outcomes);
}

MonteCarloSummary monte_carlo_bounds(const ModelParams& base, const MonteCarloSpec& spec)
{
    std::vector<Outcome> outcomes(spec.samples);
    parallel_for(spec.samples, [&](std::size_t i) { outcomes[i] = evaluate_sample(base, spec, i); });
    return reduce(outcomes);
}

} // namespace nessflow
