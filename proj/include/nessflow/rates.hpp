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

#pragma once

#include "nessflow/model.hpp"

namespace nessflow {

/// Generator coefficients of one reservoir channel (i,j), i lower, j upper.
/// re_minus drives j -> i (emission), re_plus drives i -> j (absorption);
/// the im parts are Lamb-shift-like level shifts.
struct ChannelRates {
    double re_minus{0.0};
    double re_plus{0.0};
    double im_minus{0.0};
    double im_plus{0.0};

    bool operator==(const ChannelRates&) const = default;
};

struct RateSet {
    ChannelRates em;
    ChannelRates ph;
    ChannelRates sink;

    const ChannelRates& operator[](ReservoirKind kind) const;
    ChannelRates& operator[](ReservoirKind kind);

    /// Sum of the six real coefficients; the natural rate scale of the model.
    double sum_re() const noexcept;

    bool has_lamb_shift() const noexcept;

    bool operator==(const RateSet&) const = default;
};

/// Throws InvalidRates unless every coefficient is finite and
/// re_minus >= re_plus >= 0 holds on every channel.
const RateSet& validate(const RateSet& rates);

/// Thermal reduction of the coefficients:
///   2 gamma^-_re = C / (1 - exp(-beta*gap)),  2 gamma^+_re = 2 gamma^-_re * exp(-beta*gap)
/// and for the zero-temperature limit gamma^+_re = 0, 2 gamma^-_re = C.
/// gamma_im is copied from the reservoir spec.
RateSet thermal_rates(const ModelParams& params);

/// Single-channel thermal reduction; beta may be +infinity.
ChannelRates thermal_channel(double brightness, double beta, double gap,
                             double im_minus = 0.0, double im_plus = 0.0);

} // namespace nessflow
