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

#include "nessflow/generator.hpp"

#include <algorithm>
#include <stdexcept>

namespace nessflow {

namespace {

constexpr cplx kI{0.0, 1.0};

Matrix3c ket_bra(int i, int j)
{
    Matrix3c m = Matrix3c::Zero();
    m(i, j) = 1.0;
    return m;
}

/// Superoperator of a linear map on 3x3 matrices, one column per basis element.
template <class Map>
Matrix9c assemble(Map&& map)
{
    Matrix9c m;
    for (int k = 0; k < 9; ++k) {
        m.col(k) = vectorize(map(ket_bra(kBasis[k].row, kBasis[k].col)));
    }
    return m;
}

/// A rho A^dag - 1/2 {A^dag A, rho}
Matrix3c dissipator(const Matrix3c& jump, const Matrix3c& rho)
{
    const Matrix3c jdj = jump.adjoint() * jump;
    return jump * rho * jump.adjoint() - 0.5 * (jdj * rho + rho * jdj);
}

/// One reservoir channel in Lindblad form: jump |i><j| at rate 2 gamma^-_re,
/// jump |j><i| at rate 2 gamma^+_re, and the level shift
/// H = gamma^+_im |i><i| - gamma^-_im |j><j| entering as -i[H, rho].
Matrix3c channel_action(const ChannelRates& c, LevelPair pair, const Matrix3c& rho)
{
    const int i = pair.lower;
    const int j = pair.upper;
    Matrix3c out = 2.0 * c.re_minus * dissipator(ket_bra(i, j), rho);
    out += 2.0 * c.re_plus * dissipator(ket_bra(j, i), rho);
    const Matrix3c shift = c.im_plus * ket_bra(i, i) - c.im_minus * ket_bra(j, j);
    out += -kI * (shift * rho - rho * shift);
    return out;
}

} // namespace

int basis_index(int row, int col)
{
    for (int k = 0; k < 9; ++k) {
        if (kBasis[k].row == row && kBasis[k].col == col) return k;
    }
    throw std::out_of_range("basis_index: row/col outside 0..2");
}

Vector9c vectorize(const Matrix3c& rho)
{
    Vector9c v;
    for (int k = 0; k < 9; ++k) v(k) = rho(kBasis[k].row, kBasis[k].col);
    return v;
}

Matrix3c devectorize(const Vector9c& v)
{
    Matrix3c rho;
    for (int k = 0; k < 9; ++k) rho(kBasis[k].row, kBasis[k].col) = v(k);
    return rho;
}

double Superoperator::off_block_magnitude() const
{
    double worst = 0.0;
    auto block_of = [](int k) { return k < 5 ? 0 : (k < 7 ? 1 : 2); };
    for (int r = 0; r < 9; ++r) {
        for (int c = 0; c < 9; ++c) {
            if (block_of(r) != block_of(c)) worst = std::max(worst, std::abs(m_(r, c)));
        }
    }
    return worst;
}

double Superoperator::rate_scale() const
{
    return -0.5 * (m_(0, 0) + m_(1, 1) + m_(2, 2)).real();
}

Superoperator build_theta(const RateSet& rates)
{
    return build_L(rates, 0.0);
}

Superoperator build_L(const RateSet& rates, double s)
{
    const Matrix3c h_eff = s * (ket_bra(2, 0) + ket_bra(0, 2));
    return Superoperator(assemble([&](const Matrix3c& rho) {
        Matrix3c out = Matrix3c::Zero();
        for (auto kind : kAllReservoirs) out += channel_action(rates[kind], level_pair(kind), rho);
        out += kI * (rho * h_eff - h_eff * rho);
        return out;
    }));
}

Matrix3c apply(const Superoperator& L, const Matrix3c& rho)
{
    return devectorize(L.matrix() * vectorize(rho));
}

Matrix3c apply(const Superoperator& L, const DensityMatrix& rho)
{
    return apply(L, rho.matrix());
}

} // namespace nessflow
