// Copyright 2026 The mdmica authors
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

#include "mdmica/types.hpp"

namespace mdmica {

/// Rotation angles theta_{i,j}, 1 <= i < j <= d, stored in lexicographic
/// (i, j) order. Block theta_i = {theta_{i,j} : j = i+1..d} is contiguous.
/// Support: theta_{1,j} in [0, 2*pi), theta_{i,j} in [0, pi) for i != 1.
struct AngleVector {
    int d = 0;
    Vector angles;

    AngleVector() = default;
    AngleVector(int dim, Vector a) : d(dim), angles(std::move(a)) {}

    /// All-zero angle vector for dimension d.
    static AngleVector zero(int d);

    /// Number of angles p = d(d-1)/2.
    static int pair_count(int d) { return d * (d - 1) / 2; }

    /// Flat index of theta_{i,j} (1-based i < j).
    static int index_of(int d, int i, int j);

    /// Offset of block theta_i (1-based i in 1..d-1) in the flat vector.
    int block_offset(int i) const;
    /// Length of block theta_i, i.e. d - i.
    int block_size(int i) const { return d - i; }

    /// Whether all angles lie in the support (half-open upper bounds).
    bool in_support(double slack = 0.0) const;
};

/// Givens rotation in plane (i, j), 1-based, 1 <= i < j <= d: identity with
/// (i,i) = (j,j) = cos(psi), (i,j) = -sin(psi), (j,i) = sin(psi).
Matrix givens(int d, int i, int j, double psi);

/// W(theta) = G^(d-1)(theta_{d-1}) ... G^(1)(theta_1), with
/// G^(k)(theta_k) = G_{k,d}(theta_{k,d}) ... G_{k,k+1}(theta_{k,k+1}).
/// Row k of the result depends only on blocks theta_1..theta_k.
Matrix rotation_from_angles(const AngleVector& theta);

/// True when W * W' = I within tol (max-abs) and det(W) = +1 within tol.
bool is_rotation(const Matrix& W, double tol = 1e-10);

/// Inverse of rotation_from_angles: recover the angle vector in the support
/// whose Givens product reproduces W. Unique when all diagonal entries of W
/// are positive or all entries are nonzero; otherwise a best-effort branch
/// is returned. Throws InvalidRotationError when W is not in SO(d).
AngleVector angles_from_rotation(const Matrix& W);

}  // namespace mdmica
