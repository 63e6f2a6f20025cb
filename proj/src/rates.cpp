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

#include "nessflow/rates.hpp"

#include <cmath>
#include <string>

namespace nessflow {

const ChannelRates& RateSet::operator[](ReservoirKind kind) const
{
    switch (kind) {
    case ReservoirKind::em: return em;
    case ReservoirKind::ph: return ph;
    case ReservoirKind::sink: return sink;
    }
    return em;
}

ChannelRates& RateSet::operator[](ReservoirKind kind)
{
    switch (kind) {
    case ReservoirKind::em: return em;
    case ReservoirKind::ph: return ph;
    case ReservoirKind::sink: return sink;
    }
    return em;
}

double RateSet::sum_re() const noexcept
{
    return em.re_minus + em.re_plus + ph.re_minus + ph.re_plus + sink.re_minus + sink.re_plus;
}

bool RateSet::has_lamb_shift() const noexcept
{
    for (const auto* c : {&em, &ph, &sink}) {
        if (c->im_minus != 0.0 || c->im_plus != 0.0) return true;
    }
    return false;
}

const RateSet& validate(const RateSet& rates)
{
    for (auto kind : kAllReservoirs) {
        const auto& c = rates[kind];
        const std::string name(to_string(kind));
        if (!std::isfinite(c.re_minus) || !std::isfinite(c.re_plus) || !std::isfinite(c.im_minus) ||
            !std::isfinite(c.im_plus)) {
            throw Error(ErrorCode::InvalidRates, name + ": non-finite coefficient");
        }
        if (c.re_plus < 0.0) throw Error(ErrorCode::InvalidRates, name + ": gamma^+_re < 0");
        if (c.re_minus < c.re_plus) {
            throw Error(ErrorCode::InvalidRates, name + ": gamma^-_re < gamma^+_re");
        }
    }
    return rates;
}

ChannelRates thermal_channel(double brightness, double beta, double gap, double im_minus,
                             double im_plus)
{
    ChannelRates c;
    c.im_minus = im_minus;
    c.im_plus = im_plus;
    if (std::isinf(beta)) {
        c.re_minus = 0.5 * brightness;
        c.re_plus = 0.0;
        return c;
    }
    // -expm1(-x) = 1 - e^{-x} stays accurate for small x and never overflows.
    const double x = beta * gap;
    c.re_minus = 0.5 * brightness / -std::expm1(-x);
    c.re_plus = c.re_minus * std::exp(-x);
    return c;
}

RateSet thermal_rates(const ModelParams& params)
{
    RateSet r;
    for (auto kind : kAllReservoirs) {
        const auto& spec = params.reservoir(kind);
        r[kind] = thermal_channel(spec.brightness, beta_of(spec, params.kB_eV_per_K), params.gap(kind),
                                  spec.gamma_im_minus, spec.gamma_im_plus);
    }
    return r;
}

} // namespace nessflow
