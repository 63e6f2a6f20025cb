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

#include "nessflow/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "nessflow/analysis.hpp"
#include "nessflow/config.hpp"
#include "nessflow/dynamics.hpp"
#include "nessflow/report.hpp"
#include "nessflow/spectra.hpp"
#include "nessflow/stationary.hpp"
#include "nessflow/sweep.hpp"

namespace nessflow {

namespace {

using nlohmann::json;

struct Globals {
    std::string config;
    std::string out;
    bool json{false};
    std::uint64_t seed{0};
    std::optional<double> kB;
};

struct SweepOptions {
    std::string vary{"C_em"};
    double from{1e-3};
    double to{1e3};
    int points{61};
    bool log{false};
};

struct EvolveOptions {
    std::optional<double> t_final;
    std::optional<double> dt_out;
    std::optional<std::string> initial;
};

struct BoundsOptions {
    std::size_t samples{10000};
};

Scenario load(const Globals& g)
{
    Scenario sc;
    if (g.config.empty()) {
        sc.params = typical_params();
    } else {
        sc = load_scenario(g.config);
    }
    if (g.kB) {
        sc.params.kB_eV_per_K = *g.kB;
        sc.params = validate(sc.params);
    }
    return sc;
}

/// Writes the command output to --out (plus a manifest) or to the stream.
void emit(const Globals& g, const std::string& command, const std::string& digest, const std::string& text,
          std::ostream& out)
{
    if (g.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(g.out, std::ios::binary);
    if (!file) throw Error(ErrorCode::Config, "cannot write '" + g.out + "'");
    file << text;

    RunManifest m;
    m.command = command;
    m.config_digest = digest;
    m.seed = g.seed;
    m.outputs = {g.out};
    std::ofstream manifest(g.out + ".manifest.json", std::ios::binary);
    manifest << dump_json(to_json(m)) << '\n';
}

std::string line(const std::string& key, double value)
{
    return fmt::format("{:<28}{}\n", key, fmt17(value));
}

std::string cline(const std::string& key, cplx value)
{
    return fmt::format("{:<28}{}, {}\n", key, fmt17(value.real()), fmt17(value.imag()));
}

// Some cone quantities need a cold sink and no Lamb shift; elsewhere they are absent.
template <class F>
auto when_applicable(F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::PreconditionSinkNotCold || e.code() == ErrorCode::NonzeroLambShift) return {};
        throw;
    }
}

int cmd_stationary(const Globals& g, std::ostream& out)
{
    const Scenario sc = load(g);
    const RateSet rates = thermal_rates(sc.params);
    const double s = sc.params.drive.s;
    const auto closed = stationary_state(rates, s);
    const auto oracle = nullspace_oracle(build_L(rates, s));
    const double residual = (closed.rho.matrix() - oracle.rho.matrix()).cwiseAbs().maxCoeff();
    const bool pass = residual <= 1e-9;
    const auto pair = pairwise_flows(rates, closed.rho);

    std::string text;
    if (g.json) {
        json j;
        j["command"] = "stationary";
        j["s"] = s;
        j["state"] = to_json(closed);
        j["pairwise_flows"] = {{"em", pair.em}, {"ph", pair.ph}, {"sink", pair.sink}};
        j["oracle_residual"] = residual;
        j["pass"] = pass;
        text = dump_json(j) + "\n";
    } else {
        text += line("s", s);
        text += line("rho22", closed.rho.population(2));
        text += line("rho11", closed.rho.population(1));
        text += line("rho00", closed.rho.population(0));
        text += cline("rho20 (re, im)", closed.rho(2, 0));
        text += line("delta", closed.delta.value_or(0.0));
        text += line("flow", closed.flow.value_or(0.0));
        text += line("current em (0->2)", pair.em);
        text += line("current ph (2->1)", pair.ph);
        text += line("current sink (1->0)", pair.sink);
        text += line("oracle residual", residual);
        text += fmt::format("{:<28}{}\n", "oracle check", pass ? "PASS" : "FAIL");
    }
    emit(g, "stationary", scenario_digest(sc), text, out);
    return pass ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(const Globals& g, const SweepOptions& o, std::ostream& out)
{
    const Scenario sc = load(g);
    SweepSpec spec;
    spec.variable = parse_sweep_variable(o.vary);
    spec.from = o.from;
    spec.to = o.to;
    spec.points = o.points;
    spec.log = o.log;
    const auto rows = run_sweep(sc.params, spec);

    std::string text;
    if (g.json) {
        text = dump_json(sweep_json(rows, spec.variable)) + "\n";
    } else {
        std::ostringstream os;
        write_sweep_csv(os, rows, spec.variable);
        text = os.str();
    }
    emit(g, "sweep", scenario_digest(sc), text, out);
    return kExitOk;
}

int cmd_spectrum(const Globals& g, std::ostream& out)
{
    const Scenario sc = load(g);
    const RateSet rates = thermal_rates(sc.params);
    const double s = sc.params.drive.s;
    const double scale = rates.sum_re();
    const auto rep = dressed_spectrum(rates, s);
    const auto& numeric = rep.dressed->l_ds;
    const std::vector<cplx> nonzero(numeric.begin() + 1, numeric.end());

    json j;
    j["command"] = "spectrum";
    j["spectrum"] = to_json(rep);
    std::string text;
    text += line("s", s);
    text += line("D", rep.D);
    text += cline("lambda_plus", rep.lambda_plus);
    text += cline("lambda_minus", rep.lambda_minus);
    text += cline("mu01", rep.mu01);
    text += cline("mu02", rep.mu02);
    text += cline("mu12", rep.mu12);
    for (std::size_t k = 0; k < numeric.size(); ++k) text += cline(fmt::format("L_ds eigenvalue {}", k), numeric[k]);
    text += cline("mu21(s)", rep.dressed->mu21_s);
    text += cline("mu01(s)", rep.dressed->mu01_s);

    if (s != 0.0) {
        try {
            const auto w = weak_field_expansion(rates, s);
            const std::vector<cplx> predicted{w.lambda_plus, w.lambda_minus, w.mu02, w.mu20};
            const std::vector<cplx> bare{rep.lambda_plus, rep.lambda_minus, rep.mu02, std::conj(rep.mu02)};
            double shift = 0.0, gap = std::abs(rep.lambda_plus - rep.lambda_minus);
            for (std::size_t k = 0; k < bare.size(); ++k) {
                shift = std::max(shift, std::abs(predicted[k] - bare[k]));
                if (k < 2) gap = std::min(gap, std::abs(bare[k] - rep.mu02));
            }
            j["weak_field_shift_over_gap"] = shift / gap;
            text += line("weak field shift/gap", shift / gap);
            const auto partner = match_eigenvalues(predicted, nonzero);
            const double s4 = std::pow(s, 4);
            static const char* names[] = {"lambda_plus(s)", "lambda_minus(s)", "mu02(s)", "mu20(s)"};
            json rows = json::array();
            for (std::size_t k = 0; k < predicted.size(); ++k) {
                const double res = std::abs(predicted[k] - nonzero[partner[k]]);
                rows.push_back({{"name", names[k]},
                                {"predicted", complex_json(predicted[k])},
                                {"numeric", complex_json(nonzero[partner[k]])},
                                {"residual", res},
                                {"residual_over_s4", res / s4}});
                text += fmt::format("{:<28}residual {}  residual/s^4 {}\n", std::string("weak ") + names[k], fmt17(res),
                                    fmt17(res / s4));
            }
            j["weak_field"] = rows;
        } catch (const Error& e) {
            j["weak_field"] = {{"error", e.what()}};
            text += fmt::format("{:<28}{}\n", "weak field", e.what());
        }
    }

    const auto lim = strong_field_limits(rates);
    json strong = to_json(lim);
    strong["alternate_lambda_s_real"] = alternate_strong_field_real_part(rates);
    text += line("strong lambda_r", lim.lambda_r);
    text += line("strong lambda_mu", lim.lambda_mu);
    text += line("strong Re lambda_s", lim.lambda_s_real);
    text += line("alternate Re lambda_s", alternate_strong_field_real_part(rates));
    if (scale > 0.0 && std::abs(s) >= 100.0 * scale) {
        const std::vector<cplx> predicted{cplx(lim.lambda_r, 0.0), cplx(lim.lambda_mu, 0.0),
                                          cplx(lim.lambda_s_real, 2.0 * std::abs(s)),
                                          cplx(lim.lambda_s_real, -2.0 * std::abs(s))};
        const auto partner = match_eigenvalues(predicted, nonzero);
        json rows = json::array();
        for (std::size_t k = 0; k < predicted.size(); ++k) {
            const double rel = std::abs(predicted[k].real() - nonzero[partner[k]].real()) / scale;
            rows.push_back({{"predicted", complex_json(predicted[k])},
                            {"numeric", complex_json(nonzero[partner[k]])},
                            {"real_part_error_over_scale", rel}});
            text += fmt::format("{:<28}Re error / scale {}\n", fmt::format("strong limit {}", k), fmt17(rel));
        }
        strong["comparison"] = rows;
    }
    j["strong_field"] = strong;

    emit(g, "spectrum", scenario_digest(sc), g.json ? dump_json(j) + "\n" : text, out);
    return kExitOk;
}

int cmd_cone(const Globals& g, std::ostream& out)
{
    const Scenario sc = load(g);
    const auto& p = sc.params;
    const auto cone = classify_cone(p);
    const double rate = relaxation_rate(p);
    const auto lines = tangency_half_lines(p);
    const auto interval = when_applicable([&] { return cone_sink_interval(p, p.ph.brightness, p.em.brightness); });
    const auto equal = when_applicable([&] { return equal_rates_surface(p, p.ph.brightness, p.em.brightness); });
    const auto q = when_applicable([&] { return oscillation_quality(p); });

    json j;
    j["command"] = "cone";
    j["cone"] = to_json(cone);
    j["relaxation_rate"] = rate;
    j["Q"] = q ? json(*q) : json(nullptr);
    json hl = json::array();
    for (const auto& l : lines) hl.push_back({{"C_ph", l.c_ph}, {"C_em", l.c_em}, {"C_sink", l.c_sink}});
    j["tangency_half_lines"] = hl;
    j["inside_sink_interval"] = interval ? json::array({interval->first, interval->second}) : json(nullptr);
    j["equal_rates_C_sink"] = equal ? json(*equal) : json(nullptr);

    std::string text;
    text += fmt::format("{:<28}{}\n", "location", to_string(cone.location));
    text += line("D", cone.D);
    text += line("relaxation rate", rate);
    text += q ? line("Q", *q) : fmt::format("{:<28}-\n", "Q");
    for (std::size_t k = 0; k < lines.size(); ++k) {
        text += fmt::format("{:<28}C_ph {}  C_em {}  C_sink {}\n", fmt::format("tangency half-line {}", k + 1),
                            fmt17(lines[k].c_ph), fmt17(lines[k].c_em), fmt17(lines[k].c_sink));
    }
    text += interval ? fmt::format("{:<28}[{}, {}]\n", "C_sink with D <= 0", fmt17(interval->first),
                                   fmt17(interval->second))
                     : fmt::format("{:<28}-\n", "C_sink with D <= 0");
    text += equal ? line("equal-rates C_sink", *equal) : fmt::format("{:<28}-\n", "equal-rates C_sink");

    emit(g, "cone", scenario_digest(sc), g.json ? dump_json(j) + "\n" : text, out);
    return kExitOk;
}

int cmd_bounds(const Globals& g, const BoundsOptions& o, std::ostream& out)
{
    const Scenario sc = load(g);
    const auto rep = bounds_report(sc.params);
    MonteCarloSpec inside{o.samples, g.seed, SampleMode::inside_cone, false};
    MonteCarloSpec random{o.samples, g.seed, SampleMode::random_brightness, false};
    MonteCarloSpec temps{o.samples, g.seed, SampleMode::inside_cone, true};
    const auto mc_inside = monte_carlo_bounds(sc.params, inside);
    const auto mc_random = monte_carlo_bounds(sc.params, random);
    const auto mc_temps = monte_carlo_bounds(sc.params, temps);
    const bool pass = rep.all_within() && mc_inside.clean() && mc_random.clean() && mc_temps.clean();

    json j;
    j["command"] = "bounds";
    j["seed"] = g.seed;
    j["point"] = to_json(rep);
    j["monte_carlo"] = {{"inside_cone", to_json(mc_inside)},
                        {"random_brightness", to_json(mc_random)},
                        {"random_temperatures", to_json(mc_temps)}};
    j["pass"] = pass;

    auto flag = [](bool ok) { return ok ? "PASS" : "FAIL"; };
    std::string text;
    text += fmt::format("{:<28}{}\n", "cone", to_string(rep.cone.location));
    text += rep.ratio_relax_to_decoh ? line("ratio |Re l|/|Re mu02|", *rep.ratio_relax_to_decoh)
                                     : fmt::format("{:<28}-\n", "ratio |Re l|/|Re mu02|");
    text += line("lower bound", rep.lower_bound);
    text += line("upper bound", rep.upper_bound);
    text += line("global max", rep.global_max);
    text += fmt::format("{:<28}{}\n", "ratio within bounds", flag(rep.ratio_within_bounds));
    text += line("flow / decoherence", rep.flow_to_decoh);
    text += line("flow bound", rep.flow_bound);
    text += fmt::format("{:<28}{}\n", "flow within bound", flag(rep.flow_within_bound));
    text += rep.Q ? line("Q", *rep.Q) : fmt::format("{:<28}-\n", "Q");
    text += line("Q_max", rep.Q_max);
    auto mc_line = [&](const char* name, const MonteCarloSummary& m) {
        return fmt::format("{:<28}{} samples, {} inside, max ratio {}, max flow fraction {}: {}\n", name, m.samples,
                           m.inside_cone, fmt17(m.max_ratio), fmt17(m.max_flow_fraction), flag(m.clean()));
    };
    text += mc_line("monte carlo (inside cone)", mc_inside);
    text += mc_line("monte carlo (brightness)", mc_random);
    text += mc_line("monte carlo (temperatures)", mc_temps);
    text += fmt::format("{:<28}{}\n", "seed", g.seed);
    text += fmt::format("{:<28}{}\n", "overall", flag(pass));

    emit(g, "bounds", scenario_digest(sc), g.json ? dump_json(j) + "\n" : text, out);
    return pass ? kExitOk : kExitCheckFailed;
}

DensityMatrix initial_state(InitialState kind, const RateSet& rates, double s)
{
    switch (kind) {
    case InitialState::excited: return DensityMatrix::diagonal(1.0, 0.0, 0.0);
    case InitialState::middle: return DensityMatrix::diagonal(0.0, 1.0, 0.0);
    case InitialState::ground: return DensityMatrix::diagonal(0.0, 0.0, 1.0);
    case InitialState::coherent: {
        Matrix3c m = Matrix3c::Zero();
        m(0, 0) = m(2, 2) = m(0, 2) = m(2, 0) = 0.5;
        return DensityMatrix(m);
    }
    case InitialState::stationary: return stationary_state(rates, s).rho;
    }
    return DensityMatrix::diagonal(1.0, 0.0, 0.0);
}

int cmd_evolve(const Globals& g, const EvolveOptions& o, std::ostream& out)
{
    Scenario sc = load(g);
    if (o.t_final) sc.evolve.t_final = *o.t_final;
    if (o.dt_out) sc.evolve.dt_out = *o.dt_out;
    if (o.initial) sc.evolve.initial = parse_initial_state(*o.initial);
    if (!(sc.evolve.t_final > 0.0) || !(sc.evolve.dt_out > 0.0)) {
        throw Error(ErrorCode::Config, "--t-final and --dt-out must be positive");
    }

    const RateSet rates = thermal_rates(sc.params);
    const double s = sc.params.drive.s;
    const auto L = build_L(rates, s);
    auto traj = evolve(L, initial_state(sc.evolve.initial, rates, s), sc.evolve.t_final, sc.evolve.dt_out);
    const double threshold = 1e-9 * L.rate_scale();
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (apply(L, traj.states[k]).cwiseAbs().maxCoeff() < threshold) {
            traj.converged_at = traj.times[k];
            break;
        }
    }

    std::string text;
    if (g.json) {
        text = dump_json(trajectory_json(traj)) + "\n";
    } else {
        std::ostringstream os;
        write_trajectory_csv(os, traj);
        text = os.str();
    }
    emit(g, "evolve", scenario_digest(sc), text, out);
    return kExitOk;
}

int cmd_reproduce(const Globals& g, std::ostream& out)
{
    const double kB = g.kB.value_or(kDefaultBoltzmannEvPerK);
    const auto r = reproduce(kB, g.seed);

    auto verdict = [&](const ReproductionCheck& c) -> std::string {
        if (c.pass) return "PASS";
        return r.convention_mismatch ? "DRIFT (convention mismatch)" : "FAIL";
    };

    std::string text;
    if (g.json) {
        json checks = json::array();
        for (const auto& c : r.checks) {
            checks.push_back({{"name", c.name},
                              {"expected", c.expected},
                              {"computed", c.computed},
                              {"rel_tol", c.rel_tol},
                              {"kind", c.upper_limit ? "upper_limit" : "relative"},
                              {"pass", c.pass},
                              {"verdict", verdict(c)}});
        }
        json j;
        j["command"] = "reproduce-paper";
        j["kB_eV_per_K"] = r.kB_eV_per_K;
        j["convention_mismatch"] = r.convention_mismatch;
        j["seed"] = g.seed;
        j["checks"] = checks;
        j["all_pass"] = r.all_pass();
        text = dump_json(j) + "\n";
    } else {
        text += fmt::format("{:<48}{:>12}{:>26}{:>8}  {}\n", "quantity", "expected", "computed", "tol", "verdict");
        for (const auto& c : r.checks) {
            const std::string tol = c.upper_limit ? "<" : fmt::format("{}%", c.rel_tol * 100.0);
            text += fmt::format("{:<48}{:>12.6g}{:>26}{:>8}  {}\n", c.name, c.expected, fmt17(c.computed), tol,
                                verdict(c));
        }
        text += fmt::format("kB = {} eV/K{}\n", fmt17(r.kB_eV_per_K),
                            r.convention_mismatch ? " (convention mismatch: kB * 300 K != 0.025 eV)" : "");
    }
    emit(g, "reproduce-paper", "", text, out);
    if (r.convention_mismatch) return kExitOk;
    return r.all_pass() ? kExitOk : kExitCheckFailed;
}

} // namespace

bool Reproduction::all_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const ReproductionCheck& c) { return c.pass; });
}

Reproduction reproduce(double kB, std::uint64_t seed, std::size_t cap_samples)
{
    const ModelParams p = validate(typical_params(kB));
    Reproduction r;
    r.kB_eV_per_K = kB;
    r.convention_mismatch = kB != kDefaultBoltzmannEvPerK;

    auto relative = [&](std::string name, double expected, double computed, double tol) {
        ReproductionCheck c{std::move(name), expected, computed, tol, false, false};
        c.pass = std::abs(computed - expected) <= tol * std::abs(expected);
        r.checks.push_back(c);
    };

    const auto extrema = optimize_ratio_on_cone(p);
    relative("C_em/C_ph at the ratio maximum", 0.96, extrema.upper.c_em_over_c_ph, 0.01);
    relative("C_sink/C_ph at the ratio maximum", 2.26, extrema.upper.c_sink_over_c_ph, 0.01);
    relative("|Re lambda|/|Re mu02| at the ratio maximum", 2.13, extrema.upper.value, 0.01);
    relative("Q_max (optimizer)", 0.067, optimize_quality(p).value, 0.05);
    relative("Q_max maximized over temperatures", 1.0 / std::sqrt(7.0),
             maximize_quality_over_temperatures().value, 0.01);
    relative("Flow/|Re mu02| bound", 0.009, flow_decoherence_bound(p), 0.01);
    const double b = beta_of(p.ph, p.kB_eV_per_K) * p.gap(ReservoirKind::ph);
    relative("Flow/|Re mu02| bound as beta_em -> 0", 0.25,
             flow_decoherence_bound(with_thermal_factors(p, 1e-9, b)), 0.01);

    const auto mc = monte_carlo_bounds(p, {cap_samples, seed, SampleMode::inside_cone, true});
    ReproductionCheck cap{"global ratio cap over random samples", kRatioCap,
                          std::max(mc.max_ratio, mc.max_upper_bound), 0.0, true, false};
    cap.pass = mc.cap_violations == 0 && cap.computed < cap.expected;
    r.checks.push_back(cap);
    return r;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"nessflow: stationary states, spectra and bounds of a driven three-level system"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "Scenario JSON file");
    app.add_option("--out", g.out, "Write output here (and a .manifest.json next to it)");
    app.add_flag("--json", g.json, "Machine-readable JSON output");
    app.add_option("--seed", g.seed, "Seed for Monte Carlo checks");
    app.add_option("--kB", g.kB, "Boltzmann constant in eV/K (default: 0.025 eV / 300 K)");

    auto* stationary = app.add_subcommand("stationary", "Stationary state, flow and oracle check");

    SweepOptions so;
    auto* sweep = app.add_subcommand("sweep", "Stationary quantities along a parameter grid");
    sweep->add_option("--vary", so.vary, "C_em, C_ph, C_sink or s")->required();
    sweep->add_option("--from", so.from, "First grid value")->required();
    sweep->add_option("--to", so.to, "Last grid value")->required();
    sweep->add_option("--points", so.points, "Number of grid points (>= 2)");
    sweep->add_flag("--log", so.log, "Logarithmic spacing");

    auto* spectrum = app.add_subcommand("spectrum", "Generator spectrum and weak/strong field checks");
    auto* cone = app.add_subcommand("cone", "Discriminant cone classification");

    BoundsOptions bo;
    auto* bounds = app.add_subcommand("bounds", "Relaxation, decoherence and flow bounds");
    bounds->add_option("--samples", bo.samples, "Monte Carlo samples per family");

    EvolveOptions eo;
    auto* evolve_cmd = app.add_subcommand("evolve", "Integrate the master equation");
    evolve_cmd->add_option("--t-final", eo.t_final, "Final time");
    evolve_cmd->add_option("--dt-out", eo.dt_out, "Output spacing");
    evolve_cmd->add_option("--initial", eo.initial, "excited, middle, ground, coherent or stationary");

    auto* reproduce_cmd = app.add_subcommand("reproduce-paper", "Recompute the headline numbers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (stationary->parsed()) return cmd_stationary(g, out);
        if (sweep->parsed()) return cmd_sweep(g, so, out);
        if (spectrum->parsed()) return cmd_spectrum(g, out);
        if (cone->parsed()) return cmd_cone(g, out);
        if (bounds->parsed()) return cmd_bounds(g, bo, out);
        if (evolve_cmd->parsed()) return cmd_evolve(g, eo, out);
        if (reproduce_cmd->parsed()) return cmd_reproduce(g, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("nessflow");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace nessflow
