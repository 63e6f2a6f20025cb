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

#include <random>

#include <doctest.h>

#include "checks.hpp"
#include "nessflow/spectra.hpp"
#include "nessflow/stationary.hpp"
#include "oracles.hpp"

using namespace nessflow;
using nessflow::testing::error_code_of;

namespace {

std::vector<cplx> nonzero_eigenvalues(const RateSet& r, double s)
{
    const auto ev = l_ds_eigenvalues(r, s);
    return {ev.begin() + 1, ev.end()};
}

double poly_eval(const std::array<double, 3>& c, double x)
{
    return c[0] + c[1] * x + c[2] * x * x;
}

} // namespace

TEST_CASE("discriminant: single reservoir and eigensolver cross-check")
{
    RateSet one;
    one.ph = {0.7, 0.2, 0.0, 0.0};
    CHECK(discriminant(one) == doctest::Approx(0.81).epsilon(1e-14));

    std::mt19937_64 rng(6);
    for (int n = 0; n < 1000; ++n) {
        const RateSet r = oracle::random_rates(rng);
        const auto ev = oracle::pauli_eigenvalues(r);
        // ev[0] is the zero mode; the other two are -Sigma +- sqrt(D)
        const cplx diff = ev[1] - ev[2];
        const double d_from_eigs = (diff * diff / 4.0).real();
        const double scale = r.sum_re() * r.sum_re();
        CHECK(std::abs(discriminant(r) - d_from_eigs) <= 1e-10 * scale);
    }
}

TEST_CASE("lambda pairs")
{
    RateSet sink;
    sink.sink.re_minus = 1.25;
    const auto l = lambdas(sink);
    CHECK(std::abs(l.plus) <= 1e-15);
    CHECK(l.minus == cplx(-2.5, 0.0));

    const auto z = lambdas(RateSet{});
    CHECK(z.plus == cplx(0.0, 0.0));
    CHECK(z.minus == cplx(0.0, 0.0));

    std::mt19937_64 rng(7);
    int complex_pairs = 0;
    for (int n = 0; n < 1000; ++n) {
        const RateSet r = oracle::random_rates(rng);
        const auto lp = lambdas(r);
        const auto ev = oracle::pauli_eigenvalues(r);
        const std::vector<cplx> predicted{0.0, lp.plus, lp.minus};
        const auto partner = match_eigenvalues(predicted, std::vector<cplx>(ev.begin(), ev.end()), 0.0);
        const double scale = r.sum_re();
        for (int k = 0; k < 3; ++k) CHECK(std::abs(predicted[k] - ev[partner[k]]) <= 1e-10 * scale);

        CHECK(oracle::rel_err((lp.plus * lp.minus).real(), 4.0 * delta(r)) <= 1e-10);
        CHECK(oracle::rel_err((lp.plus + lp.minus).real(), -2.0 * r.sum_re()) <= 1e-10);
        CHECK(lp.plus.real() <= 0.0);
        CHECK(lp.minus.real() <= 0.0);
        if (discriminant(r) < 0.0) {
            ++complex_pairs;
            CHECK(lp.plus.imag() > 0.0);
            CHECK(lp.minus == std::conj(lp.plus));
        } else {
            CHECK(lp.plus.imag() == 0.0);
            CHECK(lp.minus.imag() == 0.0);
            CHECK(lp.plus.real() >= lp.minus.real());
        }
    }
    MESSAGE("complex lambda pairs among 1000 random rate sets: " << complex_pairs);
}

TEST_CASE("coherence rates")
{
    RateSet em;
    em.em = {0.6, 0.15, 0.0, 0.0};
    const auto m = mus(em);
    CHECK(m.mu02 == cplx(-0.75, 0.0));
    CHECK(m.mu01 == cplx(-0.15, 0.0));
    CHECK(m.mu12 == cplx(-0.6, 0.0));

    const auto z = mus(RateSet{});
    CHECK(z.mu01 == 0.0);
    CHECK(z.mu02 == 0.0);
    CHECK(z.mu12 == 0.0);

    std::mt19937_64 rng(8);
    for (int n = 0; n < 1000; ++n) {
        const RateSet r = oracle::random_rates(rng, true);
        const Matrix9c L = oracle::generator_matrix_direct(r, 0.0);
        const auto c = mus(r);
        CHECK(std::abs(L(5, 5) - c.mu01) <= 1e-12);
        CHECK(std::abs(L(4, 4) - c.mu02) <= 1e-12);
        CHECK(std::abs(L(8, 8) - c.mu12) <= 1e-12);
        CHECK(std::abs(L(3, 3) - c.mu20()) <= 1e-12);
        CHECK(std::abs(L(6, 6) - c.mu21()) <= 1e-12);
        CHECK(c.mu02.real() < 0.0);
    }
}

TEST_CASE("characteristic polynomial of the dressed block")
{
    std::mt19937_64 rng(9);
    for (int n = 0; n < 200; ++n) {
        const RateSet r = oracle::random_rates(rng, n % 2 == 0);
        const double scale = r.sum_re();
        const double s = n == 0 ? 0.0 : oracle::log_uniform(rng, 1e-2, 1e1) * scale;
        const Matrix5c ds = build_L(r, s).l_ds();
        const auto c = oracle::fit_quintic(
            [&](cplx x) { return (x * Matrix5c::Identity() - ds).determinant(); }, scale);
        const auto split = char_poly_split(r);
        const auto w = split.quartic(s);
        const std::array<double, 6> expected{0.0, w[0], w[1], w[2], w[3], 1.0};
        for (int k = 0; k < 6; ++k) {
            const double ref = std::max(std::abs(expected[k]), std::pow(scale, 5 - k));
            CHECK(std::abs(c[k] - expected[k]) <= 1e-10 * ref);
        }
        if (s == 0.0) {
            for (int k = 0; k < 4; ++k) CHECK(w[k] == split.h1[k]);
        }
        CHECK(split.h1[4] == 1.0);
        const double re_mu = mus(r).mu02.real();
        CHECK(std::abs(poly_eval(split.h2, split.lambda_r)) <= 1e-12 * scale * scale);
        CHECK(std::abs(poly_eval(split.h2, re_mu)) <= 1e-12 * scale * scale);
        CHECK(split.lambda_r ==
              doctest::Approx(-(r.ph.re_minus + 2.0 * r.ph.re_plus + r.sink.re_plus + 2.0 * r.sink.re_minus)));
    }
}

TEST_CASE("pure imaginary root criterion")
{
    CHECK(pure_imaginary_criterion(2, 3, 3, 3) == 0.0);
    CHECK(pure_imaginary_criterion(1, 4, 6, 4) == -64.0);

    std::mt19937_64 rng(10);
    for (int n = 0; n < 500; ++n) {
        const ModelParams p = oracle::random_params(rng);
        const RateSet r = thermal_rates(p);
        const double s = oracle::log_uniform(rng, 1e-3, 1e3) * r.sum_re();
        const auto w = char_poly_split(r).quartic(s);
        const double residual = pure_imaginary_criterion(w[0], w[1], w[2], w[3]);
        const double size = std::abs(w[1] * w[1]) + std::abs(w[1] * w[2] * w[3]) + std::abs(w[3] * w[3] * w[0]);
        CHECK(std::abs(residual) > 1e-9 * size);
    }
}

TEST_CASE("dressed spectrum")
{
    std::mt19937_64 rng(12);
    for (int n = 0; n < 100; ++n) {
        const RateSet r = oracle::random_rates(rng, true);
        const double scale = r.sum_re();
        const auto undressed = dressed_spectrum(r, 0.0);
        REQUIRE(undressed.dressed);
        const auto lp = lambdas(r);
        const auto m = mus(r);
        const std::vector<cplx> expected{0.0, lp.plus, lp.minus, m.mu02, m.mu20()};
        const std::vector<cplx> got(undressed.dressed->l_ds.begin(), undressed.dressed->l_ds.end());
        CHECK(std::abs(got[0]) <= 1e-10 * scale);
        const auto partner = match_eigenvalues(expected, got, 0.0);
        for (int k = 0; k < 5; ++k) CHECK(std::abs(expected[k] - got[partner[k]]) <= 1e-9 * scale);
        CHECK(std::abs(undressed.dressed->mu21_s - m.mu21()) <= 1e-14 * scale);
        CHECK(std::abs(undressed.dressed->mu01_s - m.mu01) <= 1e-14 * scale);

        const double s = oracle::log_uniform(rng, 1e-2, 1e2) * scale;
        const auto rep = dressed_spectrum(r, s);
        CHECK(std::abs((rep.dressed->mu21_s + rep.dressed->mu01_s) - (m.mu21() + m.mu01)) <= 1e-12 * scale);

        Eigen::ComplexEigenSolver<Matrix2c> es(build_L(r, s).l_nd());
        const std::vector<cplx> closed{rep.dressed->mu21_s, rep.dressed->mu01_s};
        const std::vector<cplx> numeric{es.eigenvalues()(0), es.eigenvalues()(1)};
        const auto pn = match_eigenvalues(closed, numeric, 0.0);
        for (int k = 0; k < 2; ++k) CHECK(std::abs(closed[k] - numeric[pn[k]]) <= 1e-12 * std::max(scale, s));

        const auto all = l_ds_eigenvalues(r, s);
        CHECK(std::abs(all[0]) <= 1e-10 * std::max(scale, s));
        cplx sum = 0.0;
        for (const auto& z : all) sum += z;
        CHECK(std::abs(sum - build_L(r, s).l_ds().trace()) <= 1e-10 * std::max(scale, s));
    }
}

TEST_CASE("weak field: undressed limit and conjugate pair")
{
    const RateSet r = thermal_rates(typical_params());
    const auto w0 = weak_field_expansion(r, 0.0);
    const auto lp = lambdas(r);
    CHECK(w0.lambda_plus == lp.plus);
    CHECK(w0.lambda_minus == lp.minus);
    CHECK(w0.mu02 == mus(r).mu02);
    const auto w = weak_field_expansion(r, 0.01);
    CHECK(w.degenerate_pair);
    CHECK(w.mu20 == mus(r).mu02);

    RateSet shifted = r;
    shifted.em.im_minus = 0.2;
    const auto ws = weak_field_expansion(shifted, 0.01);
    CHECK_FALSE(ws.degenerate_pair);
    CHECK(ws.mu20 == std::conj(ws.mu02));
    const auto w_half = weak_field_expansion(r, 0.01);
    const cplx mu = mus(r).mu02;
    const double lr = char_poly_split(r).lambda_r;
    const cplx printed_shift = -2.0 * (mu - lr) / ((mu - lp.plus) * (mu - lp.minus)) * 1e-4;
    CHECK(std::abs(w_half.mu02 - (mu + 2.0 * printed_shift)) <= 1e-15);
}

TEST_CASE("weak field: residual is fourth order")
{
    std::mt19937_64 rng(13);
    int sets = 0;
    while (sets < 20) {
        RateSet r = thermal_rates(oracle::random_params(rng));
        if (sets % 2 == 1) {
            r.em.im_minus = 0.3 * r.sum_re();
            r.ph.im_plus = -0.1 * r.sum_re();
        }
        const double scale = r.sum_re();
        std::array<double, 3> ratio{};
        bool ok = true;
        for (int k = 0; k < 3; ++k) {
            const double s = std::pow(10.0, -1 - k) * scale;
            try {
                const auto w = weak_field_expansion(r, s);
                const std::vector<cplx> predicted{w.lambda_plus, w.lambda_minus, w.mu02, w.mu20};
                const auto numeric = nonzero_eigenvalues(r, s);
                const auto partner = match_eigenvalues(predicted, numeric);
                double worst = 0.0;
                for (int q = 0; q < 4; ++q) worst = std::max(worst, std::abs(predicted[q] - numeric[partner[q]]));
                // residual in units of the rate scale, drive in units of the rate scale
                ratio[k] = (worst / scale) / std::pow(s / scale, 4);
            } catch (const Error&) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        ++sets;
        // a third-order error would grow this by 10x per decade
        CAPTURE(sets);
        CHECK(ratio[2] <= 5.0 * std::max(ratio[0], ratio[1]) + 1e-2);
        CHECK(std::isfinite(ratio[2]));
    }
}

TEST_CASE("weak field: degenerate perturbation is reported")
{
    RateSet r;
    r.em = {1.0, 0.0, 0.0, 0.0};
    r.ph = {1.0, 0.0, 0.0, 0.0};
    r.sink = {1.0, 0.0, 0.0, 0.0};
    if (std::abs(discriminant(r)) <= 1e-12) {
        CHECK(error_code_of([&] { weak_field_expansion(r, 0.01); }) == ErrorCode::DegeneratePerturbation);
    }
    RateSet tangent;
    tangent.em = {0.5, 0.0, 0.0, 0.0};
    tangent.sink = {0.5, 0.0, 0.0, 0.0};
    tangent.ph = {0.0, 0.0, 0.0, 0.0};
    CHECK(error_code_of([&] { weak_field_expansion(tangent, 0.01); }) == ErrorCode::DegeneratePerturbation);
}

TEST_CASE("strong field limits")
{
    std::mt19937_64 rng(14);
    for (int n = 0; n < 20; ++n) {
        const RateSet r = thermal_rates(oracle::random_params(rng));
        const double scale = r.sum_re();
        const auto lim = strong_field_limits(r);
        const double s = 1e4 * scale;
        const auto numeric = nonzero_eigenvalues(r, s);
        const std::vector<cplx> predicted{lim.lambda_r, lim.lambda_mu, cplx(lim.lambda_s_real, 2.0 * s),
                                          cplx(lim.lambda_s_real, -2.0 * s)};
        const auto partner = match_eigenvalues(predicted, numeric);
        for (int k = 0; k < 4; ++k) {
            const double re = numeric[partner[k]].real();
            CHECK(oracle::rel_err(re, predicted[k].real()) <= 1e-2);
        }

        std::array<double, 3> im{};
        const std::array<double, 3> ss{1e2 * scale, 1e3 * scale, 1e4 * scale};
        for (int k = 0; k < 3; ++k) {
            const auto ev = nonzero_eigenvalues(r, ss[k]);
            for (const auto& z : ev) im[k] = std::max(im[k], z.imag());
        }
        const double slope = (im[2] - im[0]) / (ss[2] - ss[0]);
        CHECK(slope == doctest::Approx(2.0).epsilon(1e-2));
    }
}

TEST_CASE("strong field: trace rule pins the real part of the oscillating pair")
{
    std::mt19937_64 rng(15);
    for (int n = 0; n < 20; ++n) {
        const RateSet r = oracle::random_rates(rng);
        const auto lim = strong_field_limits(r);
        const double trace = build_L(r, 0.0).l_ds().trace().real();
        CHECK(2.0 * lim.lambda_s_real + lim.lambda_r + lim.lambda_mu == doctest::Approx(trace).epsilon(1e-12));
        const double alt = alternate_strong_field_real_part(r);
        const bool alt_consistent = std::abs(2.0 * alt + lim.lambda_r + lim.lambda_mu - trace) <= 1e-9 * r.sum_re();
        CHECK_FALSE(alt_consistent);
    }
}

TEST_CASE("eigenvalue matching")
{
    const std::vector<cplx> numeric{cplx(-1.0, 0.0), cplx(-2.0, 0.0), cplx(-3.0, 1.0)};
    const std::vector<cplx> predicted{cplx(-2.9, 1.0), cplx(-1.1, 0.0), cplx(-2.05, 0.0)};
    const auto p = match_eigenvalues(predicted, numeric);
    CHECK(p == std::vector<int>{2, 0, 1});

    const std::vector<cplx> twins{cplx(-1.0, 1.0), cplx(-1.0, -1.0)};
    const std::vector<cplx> middle{cplx(-1.0, 0.0)};
    CHECK(error_code_of([&] { match_eigenvalues(middle, twins); }) == ErrorCode::AmbiguousMatch);
}
