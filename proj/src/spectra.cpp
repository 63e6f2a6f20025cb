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

#include "nessflow/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "nessflow/stationary.hpp"

namespace nessflow {

namespace {

template <std::size_t N, std::size_t M>
std::array<double, N + M - 1> poly_mul(const std::array<double, N>& a, const std::array<double, M>& b)
{
    std::array<double, N + M - 1> out{};
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < M; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

template <class Array>
void sort_by_magnitude(Array& values)
{
    std::stable_sort(values.begin(), values.end(), [](cplx x, cplx y) {
        return std::make_tuple(std::abs(x), x.real(), x.imag()) <
               std::make_tuple(std::abs(y), y.real(), y.imag());
    });
}

} // namespace

double discriminant(const RateSet& rates)
{
    const double sum = rates.sum_re();
    return sum * sum - 4.0 * delta(rates);
}

LambdaPair lambdas(const RateSet& rates)
{
    const double sum = rates.sum_re();
    const double d = discriminant(rates);
    if (d >= 0.0) {
        const double root = std::sqrt(d);
        return {cplx(-sum + root, 0.0), cplx(-sum - root, 0.0)};
    }
    const double root = std::sqrt(-d);
    return {cplx(-sum, root), cplx(-sum, -root)};
}

CoherenceRates mus(const RateSet& r)
{
    const auto& em = r.em;
    const auto& ph = r.ph;
    const auto& sk = r.sink;
    CoherenceRates out;
    out.mu01 = cplx(-sk.re_minus - sk.re_plus - ph.re_plus - em.re_plus,
                    -sk.im_minus - sk.im_plus + ph.im_plus - em.im_plus);
    out.mu02 = cplx(-em.re_minus - em.re_plus - sk.re_plus - ph.re_minus,
                    -em.im_minus - em.im_plus - sk.im_plus - ph.im_minus);
    out.mu12 = cplx(-ph.re_minus - ph.re_plus - sk.re_minus - em.re_minus,
                    -ph.im_minus - ph.im_plus + sk.im_minus - em.im_minus);
    return out;
}

std::array<double, 4> CharPolySplit::quartic(double s) const
{
    const double s2 = s * s;
    return {h1[0] + s2 * h2[0], h1[1] + s2 * h2[1], h1[2] + s2 * h2[2], h1[3]};
}

CharPolySplit char_poly_split(const RateSet& rates)
{
    const double sum = rates.sum_re();
    const cplx mu02 = mus(rates).mu02;
    const double re_mu = mu02.real();
    const auto& ph = rates.ph;
    const auto& sk = rates.sink;

    CharPolySplit out;
    out.lambda_r = -(ph.re_minus + 2.0 * ph.re_plus + sk.re_plus + 2.0 * sk.re_minus);
    // (x - l+)(x - l-) = x^2 + 2 sum x + 4 Delta; the mu pair gives real coefficients too.
    const std::array<double, 3> relax{4.0 * delta(rates), 2.0 * sum, 1.0};
    const std::array<double, 3> coher{std::norm(mu02), -2.0 * re_mu, 1.0};
    out.h1 = poly_mul(relax, coher);
    out.h2 = {4.0 * re_mu * out.lambda_r, -4.0 * (re_mu + out.lambda_r), 4.0};
    return out;
}

double pure_imaginary_criterion(double w0, double w1, double w2, double w3)
{
    return w1 * w1 - w1 * w2 * w3 + w3 * w3 * w0;
}

std::pair<cplx, cplx> dressed_nd_pair(const RateSet& rates, double s)
{
    const auto m = mus(rates);
    const cplx mu21 = m.mu21();
    const cplx mu01 = m.mu01;
    const cplx gap = mu21 - mu01;
    const cplx root = gap == 0.0 ? std::sqrt(cplx(-4.0 * s * s, 0.0))
                                 : gap * std::sqrt(1.0 - 4.0 * s * s / (gap * gap));
    return {0.5 * (mu21 + mu01 + root), 0.5 * (mu21 + mu01 - root)};
}

std::array<cplx, 5> l_ds_eigenvalues(const RateSet& rates, double s)
{
    const Matrix5c lds = build_L(rates, s).l_ds();
    Eigen::ComplexEigenSolver<Matrix5c> solver(lds, false);
    std::array<cplx, 5> out;
    for (int k = 0; k < 5; ++k) out[k] = solver.eigenvalues()(k);
    sort_by_magnitude(out);
    return out;
}

SpectrumReport dressed_spectrum(const RateSet& rates, double s)
{
    SpectrumReport rep;
    rep.s = s;
    rep.D = discriminant(rates);
    const auto lam = lambdas(rates);
    rep.lambda_plus = lam.plus;
    rep.lambda_minus = lam.minus;
    const auto m = mus(rates);
    rep.mu01 = m.mu01;
    rep.mu02 = m.mu02;
    rep.mu12 = m.mu12;

    DressedSpectrum dressed;
    dressed.l_ds = l_ds_eigenvalues(rates, s);
    std::tie(dressed.mu21_s, dressed.mu01_s) = dressed_nd_pair(rates, s);
    rep.dressed = dressed;
    return rep;
}

WeakFieldPrediction weak_field_expansion(const RateSet& rates, double s)
{
    const auto lam = lambdas(rates);
    const cplx lp = lam.plus;
    const cplx lm = lam.minus;
    const cplx mu = mus(rates).mu02;
    const cplx mu_bar = std::conj(mu);
    const double lr = char_poly_split(rates).lambda_r;

    const double scale = std::max(rates.sum_re(), std::abs(mu));
    const double tol = 1e-12 * scale;
    if (!(scale > 0.0) || std::abs(lp - lm) <= tol) {
        throw Error(ErrorCode::DegeneratePerturbation, "lambda_+ and lambda_- coincide");
    }
    for (cplx l : {lp, lm}) {
        if (std::abs(l - mu) <= tol || std::abs(l - mu_bar) <= tol) {
            throw Error(ErrorCode::DegeneratePerturbation, "a relaxation root coincides with mu02");
        }
    }

    const double s2 = s * s;
    WeakFieldPrediction out;
    out.lambda_plus =
        lp - 4.0 * (lp - lr) * (lp - mu.real()) / ((lp - lm) * (lp - mu) * (lp - mu_bar)) * s2;
    out.lambda_minus =
        lm + 4.0 * (lm - lr) * (lm - mu.real()) / ((lp - lm) * (lm - mu) * (lm - mu_bar)) * s2;
    const cplx shift = -2.0 * (mu - lr) / ((mu - lp) * (mu - lm)) * s2;
    if (std::abs(mu.imag()) <= tol) {
        out.degenerate_pair = true;
        out.mu02 = mu + 2.0 * shift;
        out.mu20 = mu;
    } else {
        out.mu02 = mu + shift;
        out.mu20 = std::conj(out.mu02);
    }
    return out;
}

StrongFieldLimits strong_field_limits(const RateSet& rates)
{
    const auto& em = rates.em;
    StrongFieldLimits out;
    out.lambda_r = char_poly_split(rates).lambda_r;
    out.lambda_mu = mus(rates).mu02.real();
    out.lambda_s_real =
        -0.5 * (3.0 * em.re_minus + 3.0 * em.re_plus + 2.0 * rates.ph.re_minus + 2.0 * rates.sink.re_plus);
    return out;
}

double alternate_strong_field_real_part(const RateSet& rates)
{
    const auto& em = rates.em;
    return -0.5 * (rates.ph.re_minus + 2.0 * em.re_minus + 2.0 * em.re_plus + rates.sink.re_plus);
}

std::vector<int> match_eigenvalues(std::span<const cplx> predicted, std::span<const cplx> numeric,
                                   double ambiguity)
{
    struct Candidate {
        double dist;
        int p;
        int n;
    };
    std::vector<Candidate> pairs;
    for (int p = 0; p < static_cast<int>(predicted.size()); ++p) {
        for (int n = 0; n < static_cast<int>(numeric.size()); ++n) {
            pairs.push_back({std::abs(predicted[p] - numeric[n]), p, n});
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });

    std::vector<int> partner(predicted.size(), -1);
    std::vector<bool> used(numeric.size(), false);
    for (const auto& c : pairs) {
        if (partner[c.p] != -1 || used[c.n]) continue;
        // A second free candidate at essentially the same distance but at a
        // different location makes the pairing a guess.
        for (int n = 0; n < static_cast<int>(numeric.size()); ++n) {
            if (n == c.n || used[n]) continue;
            const double other = std::abs(predicted[c.p] - numeric[n]);
            if (std::abs(other - c.dist) < ambiguity && std::abs(numeric[n] - numeric[c.n]) > ambiguity) {
                throw Error(ErrorCode::AmbiguousMatch, "two eigenvalues equidistant from a prediction");
            }
        }
        partner[c.p] = c.n;
        used[c.n] = true;
    }
    return partner;
}

} // namespace nessflow
