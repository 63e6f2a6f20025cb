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

// generator.hpp: The evolution generator as a 9x9 matrix.
//
// Basis ordering (fixed, used everywhere a 9-vector appears):
//   0:|2><2|  1:|1><1|  2:|0><0|  3:|2><0|  4:|0><2|  5:|0><1|  6:|2><1|  7:|1><0|  8:|1><2|
// A density matrix rho = sum_k v_k B_k is represented by v_k = rho(row_k, col_k).
// With this ordering the matrix is block diagonal: populations plus the 2<->0
// coherences (5x5), {|0><1|, |2><1|} (2x2) and its conjugate {|1><0|, |1><2|}.

#pragma once

#include <array>

#include <Eigen/Dense>

#include "nessflow/model.hpp"
#include "nessflow/rates.hpp"

namespace nessflow {

using Vector9c = Eigen::Matrix<cplx, 9, 1>;
using Matrix9c = Eigen::Matrix<cplx, 9, 9>;
using Matrix5c = Eigen::Matrix<cplx, 5, 5>;
using Matrix2c = Eigen::Matrix2cd;

struct BasisElement {
    int row;
    int col;
};

inline constexpr std::array<BasisElement, 9> kBasis{{
    {2, 2}, {1, 1}, {0, 0}, {2, 0}, {0, 2}, {0, 1}, {2, 1}, {1, 0}, {1, 2},
}};

/// Index of |row><col| in kBasis.
int basis_index(int row, int col);

Vector9c vectorize(const Matrix3c& rho);
Matrix3c devectorize(const Vector9c& v);

class Superoperator {
public:
    Superoperator() : m_(Matrix9c::Zero()) {}
    explicit Superoperator(const Matrix9c& m) : m_(m) {}

    const Matrix9c& matrix() const noexcept { return m_; }
    cplx operator()(int r, int c) const { return m_(r, c); }

    /// Populations + (|2><0|, |0><2|) block.
    Matrix5c l_ds() const { return m_.topLeftCorner<5, 5>(); }
    /// (|0><1|, |2><1|) block.
    Matrix2c l_nd() const { return m_.block<2, 2>(5, 5); }
    /// (|1><0|, |1><2|) block, the complex conjugate of l_nd().
    Matrix2c l_nd_conj() const { return m_.block<2, 2>(7, 7); }

    /// Largest |entry| outside the three diagonal blocks (0 by construction).
    double off_block_magnitude() const;

    /// -(sum of the population diagonal)/2, equal to RateSet::sum_re() for
    /// an assembled generator. Used as the rate scale for tolerances.
    double rate_scale() const;

private:
    Matrix9c m_;
};

/// Dissipative generator theta = theta_sink + theta_ph + theta_em.
Superoperator build_theta(const RateSet& rates);

/// L = theta + i[., H_eff] with H_eff = s(|2><0| + |0><2|), s real.
Superoperator build_L(const RateSet& rates, double s);

/// drho/dt for the given state.
Matrix3c apply(const Superoperator& L, const Matrix3c& rho);
Matrix3c apply(const Superoperator& L, const DensityMatrix& rho);

} // namespace nessflow
