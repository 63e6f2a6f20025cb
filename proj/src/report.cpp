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

#include "nessflow/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace nessflow {

namespace {

using nlohmann::json;

json optional_number(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

void emit(std::string& out, const json& j, int indent, int depth)
{
    const bool pretty = indent >= 0;
    auto newline = [&](int level) {
        if (!pretty) return;
        out += '\n';
        out.append(static_cast<std::size_t>(level * indent), ' ');
    };

    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            out += json(it.key()).dump();
            out += pretty ? ": " : ":";
            emit(out, it.value(), indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // Short arrays of scalars (complex pairs, matrix rows) stay on one line.
        const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
        out += '[';
        bool first = true;
        for (const auto& e : j) {
            if (!first) out += flat && pretty ? ", " : ",";
            first = false;
            if (!flat) newline(depth + 1);
            emit(out, e, indent, depth + 1);
        }
        if (!flat) newline(depth);
        out += ']';
        return;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        out += std::isfinite(v) ? fmt17(v) : "null";
        return;
    }
    default:
        out += j.dump();
        return;
    }
}

std::string csv_complex(cplx z)
{
    return fmt17(z.real()) + "," + fmt17(z.imag());
}

} // namespace

std::string fmt17(double value)
{
    if (value == 0.0) value = 0.0;
    return fmt::format("{:.17g}", value);
}

std::string dump_json(const json& j, int indent)
{
    std::string out;
    emit(out, j, indent, 0);
    return out;
}

json complex_json(cplx z)
{
    return json::array({z.real(), z.imag()});
}

json to_json(const DensityMatrix& rho)
{
    json rows = json::array();
    for (int i = 0; i < 3; ++i) {
        json row = json::array();
        for (int k = 0; k < 3; ++k) row.push_back(complex_json(rho(i, k)));
        rows.push_back(row);
    }
    return rows;
}

json to_json(const StationaryState& state)
{
    json j;
    j["rho22"] = state.rho.population(2);
    j["rho11"] = state.rho.population(1);
    j["rho00"] = state.rho.population(0);
    j["rho20"] = complex_json(state.rho(2, 0));
    j["rho"] = to_json(state.rho);
    j["delta"] = optional_number(state.delta);
    j["flow"] = optional_number(state.flow);
    return j;
}

json to_json(const SpectrumReport& r)
{
    json j;
    j["s"] = r.s;
    j["D"] = r.D;
    j["lambda_plus"] = complex_json(r.lambda_plus);
    j["lambda_minus"] = complex_json(r.lambda_minus);
    j["mu01"] = complex_json(r.mu01);
    j["mu02"] = complex_json(r.mu02);
    j["mu12"] = complex_json(r.mu12);
    if (r.dressed) {
        json eig = json::array();
        for (const auto& z : r.dressed->l_ds) eig.push_back(complex_json(z));
        j["dressed"] = {{"l_ds", eig},
                        {"mu21_s", complex_json(r.dressed->mu21_s)},
                        {"mu01_s", complex_json(r.dressed->mu01_s)}};
    } else {
        j["dressed"] = nullptr;
    }
    return j;
}

json to_json(const WeakFieldPrediction& p)
{
    return {{"lambda_plus", complex_json(p.lambda_plus)},
            {"lambda_minus", complex_json(p.lambda_minus)},
            {"mu02", complex_json(p.mu02)},
            {"mu20", complex_json(p.mu20)},
            {"degenerate_pair", p.degenerate_pair}};
}

json to_json(const StrongFieldLimits& l)
{
    return {{"lambda_r", l.lambda_r}, {"lambda_mu", l.lambda_mu}, {"lambda_s_real", l.lambda_s_real}};
}

json to_json(const ConeClassification& c)
{
    return {{"location", std::string(to_string(c.location))}, {"D", c.D}, {"tolerance", c.tolerance}};
}

json to_json(const BoundsReport& r)
{
    json j;
    j["cone"] = to_json(r.cone);
    j["ratio_relax_to_decoh"] = optional_number(r.ratio_relax_to_decoh);
    j["upper_bound"] = r.upper_bound;
    j["lower_bound"] = r.lower_bound;
    j["global_max"] = r.global_max;
    j["ratio_within_bounds"] = r.ratio_within_bounds;
    j["flow_to_decoh"] = r.flow_to_decoh;
    j["flow_bound"] = r.flow_bound;
    j["flow_within_bound"] = r.flow_within_bound;
    j["Q"] = optional_number(r.Q);
    j["Q_max"] = r.Q_max;
    j["Q_within_max"] = r.Q_within_max;
    return j;
}

json to_json(const MonteCarloSummary& s)
{
    json j;
    j["samples"] = s.samples;
    j["inside_cone"] = s.inside_cone;
    j["ratio_violations"] = s.ratio_violations;
    j["flow_violations"] = s.flow_violations;
    j["cap_violations"] = s.cap_violations;
    j["oscillation_violations"] = s.oscillation_violations;
    j["max_ratio"] = s.max_ratio;
    j["min_ratio"] = s.min_ratio;
    j["max_upper_bound"] = s.max_upper_bound;
    j["max_flow_fraction"] = s.max_flow_fraction;
    j["clean"] = s.clean();
    return j;
}

json superoperator_json(const Superoperator& L)
{
    json rows = json::array();
    for (int r = 0; r < 9; ++r) {
        json row = json::array();
        for (int c = 0; c < 9; ++c) row.push_back(complex_json(L(r, c)));
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, SweepVariable variable)
{
    out << to_string(variable)
        << ",rho22,rho11,rho00,re_rho20,im_rho20,flow,re_lambda_plus,im_lambda_plus,"
           "re_lambda_minus,im_lambda_minus,Q,cone\n";
    for (const auto& r : rows) {
        out << fmt17(r.value) << ',' << fmt17(r.rho22) << ',' << fmt17(r.rho11) << ',' << fmt17(r.rho00)
            << ',' << csv_complex(r.rho20) << ',' << fmt17(r.flow) << ',' << csv_complex(r.lambda_plus)
            << ',' << csv_complex(r.lambda_minus) << ',' << (r.Q ? fmt17(*r.Q) : "") << ','
            << (r.cone ? std::string(to_string(*r.cone)) : "") << '\n';
    }
}

json sweep_json(const std::vector<SweepRow>& rows, SweepVariable variable)
{
    json arr = json::array();
    for (const auto& r : rows) {
        json j;
        j[std::string(to_string(variable))] = r.value;
        j["rho22"] = r.rho22;
        j["rho11"] = r.rho11;
        j["rho00"] = r.rho00;
        j["re_rho20"] = r.rho20.real();
        j["im_rho20"] = r.rho20.imag();
        j["flow"] = r.flow;
        j["re_lambda_plus"] = r.lambda_plus.real();
        j["im_lambda_plus"] = r.lambda_plus.imag();
        j["re_lambda_minus"] = r.lambda_minus.real();
        j["im_lambda_minus"] = r.lambda_minus.imag();
        j["Q"] = optional_number(r.Q);
        j["cone"] = r.cone ? json(std::string(to_string(*r.cone))) : json(nullptr);
        arr.push_back(j);
    }
    return {{"variable", std::string(to_string(variable))}, {"rows", arr}};
}

void write_trajectory_csv(std::ostream& out, const Trajectory& t)
{
    out << "t,rho22,rho11,rho00,re_rho20,im_rho20,re_rho01,im_rho01,re_rho21,im_rho21,trace_err,min_eig\n";
    for (std::size_t k = 0; k < t.times.size(); ++k) {
        const auto& rho = t.states[k];
        out << fmt17(t.times[k]) << ',' << fmt17(rho.population(2)) << ',' << fmt17(rho.population(1)) << ','
            << fmt17(rho.population(0)) << ',' << csv_complex(rho(2, 0)) << ',' << csv_complex(rho(0, 1)) << ','
            << csv_complex(rho(2, 1)) << ',' << fmt17(t.monitors[k].trace_err) << ','
            << fmt17(t.monitors[k].min_eig) << '\n';
    }
}

json trajectory_json(const Trajectory& t)
{
    json rows = json::array();
    for (std::size_t k = 0; k < t.times.size(); ++k) {
        const auto& rho = t.states[k];
        rows.push_back({{"t", t.times[k]},
                        {"rho22", rho.population(2)},
                        {"rho11", rho.population(1)},
                        {"rho00", rho.population(0)},
                        {"re_rho20", rho(2, 0).real()},
                        {"im_rho20", rho(2, 0).imag()},
                        {"re_rho01", rho(0, 1).real()},
                        {"im_rho01", rho(0, 1).imag()},
                        {"re_rho21", rho(2, 1).real()},
                        {"im_rho21", rho(2, 1).imag()},
                        {"trace_err", t.monitors[k].trace_err},
                        {"min_eig", t.monitors[k].min_eig}});
    }
    json j;
    j["rows"] = rows;
    j["converged_at"] = optional_number(t.converged_at);
    j["max_trace_err"] = t.max_trace_err();
    j["max_herm_err"] = t.max_herm_err();
    j["min_eigenvalue"] = t.min_eigenvalue();
    return j;
}

} // namespace nessflow
