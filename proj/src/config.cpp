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

#include "nessflow/config.hpp"

#include <array>
#include <fstream>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace nessflow {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what)
{
    throw Error(ErrorCode::Config, what);
}

double number_at(const json& obj, const char* key, double fallback)
{
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) config_error(fmt::format("'{}' must be a number", key));
    return v.get<double>();
}

Temperature parse_temperature(const json& r, const std::string& name, Temperature fallback)
{
    if (r.value("zero_temperature", false)) return Temperature::zero();
    if (!r.contains("temperature_K")) return fallback;
    const auto& t = r.at("temperature_K");
    if (t.is_string()) {
        if (t.get<std::string>() == "zero") return Temperature::zero();
        config_error(fmt::format("{}: temperature_K must be a number or \"zero\"", name));
    }
    if (!t.is_number()) config_error(fmt::format("{}: temperature_K must be a number or \"zero\"", name));
    return Temperature::kelvin(t.get<double>());
}

void parse_reservoir(const json& reservoirs, ReservoirSpec& spec)
{
    const std::string name(to_string(spec.kind));
    if (!reservoirs.contains(name)) return;
    const auto& r = reservoirs.at(name);
    if (!r.is_object()) config_error(fmt::format("reservoirs.{} must be an object", name));
    spec.temperature = parse_temperature(r, name, spec.temperature);
    spec.brightness = number_at(r, "brightness", spec.brightness);
    spec.gamma_im_minus = number_at(r, "gamma_im_minus", spec.gamma_im_minus);
    spec.gamma_im_plus = number_at(r, "gamma_im_plus", spec.gamma_im_plus);
}

json reservoir_json(const ReservoirSpec& spec)
{
    json r;
    if (spec.temperature.is_zero()) {
        r["temperature_K"] = "zero";
    } else {
        r["temperature_K"] = spec.temperature.kelvin_value();
    }
    r["brightness"] = spec.brightness;
    r["gamma_im_minus"] = spec.gamma_im_minus;
    r["gamma_im_plus"] = spec.gamma_im_plus;
    return r;
}

} // namespace

InitialState parse_initial_state(const std::string& name)
{
    if (name == "excited") return InitialState::excited;
    if (name == "middle") return InitialState::middle;
    if (name == "ground") return InitialState::ground;
    if (name == "coherent") return InitialState::coherent;
    if (name == "stationary") return InitialState::stationary;
    config_error("unknown initial state '" + name +
                 "' (expected excited, middle, ground, coherent or stationary)");
}

std::string to_string(InitialState initial)
{
    switch (initial) {
    case InitialState::excited: return "excited";
    case InitialState::middle: return "middle";
    case InitialState::ground: return "ground";
    case InitialState::coherent: return "coherent";
    case InitialState::stationary: return "stationary";
    }
    return "excited";
}

Scenario parse_scenario(const json& j)
{
    if (!j.is_object()) config_error("scenario must be a JSON object");
    Scenario sc;
    sc.params = typical_params();

    if (j.contains("kB_eV_per_K")) sc.params.kB_eV_per_K = number_at(j, "kB_eV_per_K", 0.0);
    if (j.contains("levels")) {
        const auto& l = j.at("levels");
        if (!l.is_object()) config_error("levels must be an object");
        sc.params.levels.eps0 = number_at(l, "eps0", sc.params.levels.eps0);
        sc.params.levels.eps1 = number_at(l, "eps1", sc.params.levels.eps1);
        sc.params.levels.eps2 = number_at(l, "eps2", sc.params.levels.eps2);
    }
    if (j.contains("reservoirs")) {
        const auto& r = j.at("reservoirs");
        if (!r.is_object()) config_error("reservoirs must be an object");
        for (auto it = r.begin(); it != r.end(); ++it) {
            if (it.key() != "em" && it.key() != "ph" && it.key() != "sink") {
                config_error("unknown reservoir '" + it.key() + "'");
            }
        }
        parse_reservoir(r, sc.params.em);
        parse_reservoir(r, sc.params.ph);
        parse_reservoir(r, sc.params.sink);
    }
    if (j.contains("drive")) sc.params.drive.s = number_at(j.at("drive"), "s", 0.0);
    if (j.contains("evolve")) {
        const auto& e = j.at("evolve");
        sc.evolve.t_final = number_at(e, "t_final", sc.evolve.t_final);
        sc.evolve.dt_out = number_at(e, "dt_out", sc.evolve.dt_out);
        if (e.contains("initial")) {
            if (!e.at("initial").is_string()) config_error("evolve.initial must be a string");
            sc.evolve.initial = parse_initial_state(e.at("initial").get<std::string>());
        }
        if (!(sc.evolve.t_final > 0.0) || !(sc.evolve.dt_out > 0.0)) {
            config_error("evolve.t_final and evolve.dt_out must be positive");
        }
    }
    sc.params = validate(sc.params);
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) config_error("cannot open config '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        config_error("cannot parse '" + path.string() + "': " + e.what());
    }
    return parse_scenario(j);
}

json to_json(const Scenario& sc)
{
    const auto& p = sc.params;
    json j;
    j["levels"] = {{"eps0", p.levels.eps0}, {"eps1", p.levels.eps1}, {"eps2", p.levels.eps2}};
    j["kB_eV_per_K"] = p.kB_eV_per_K;
    j["reservoirs"] = {{"em", reservoir_json(p.em)}, {"ph", reservoir_json(p.ph)}, {"sink", reservoir_json(p.sink)}};
    j["drive"] = {{"s", p.drive.s}};
    j["evolve"] = {{"t_final", sc.evolve.t_final},
                   {"dt_out", sc.evolve.dt_out},
                   {"initial", to_string(sc.evolve.initial)}};
    return j;
}

std::string sha256_hex(const std::string& data)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

std::string scenario_digest(const Scenario& scenario)
{
    return sha256_hex(to_json(scenario).dump());
}

json to_json(const RunManifest& m)
{
    return {{"command", m.command},
            {"config_digest", m.config_digest},
            {"tool_version", m.tool_version},
            {"seed", m.seed},
            {"outputs", m.outputs}};
}

} // namespace nessflow
