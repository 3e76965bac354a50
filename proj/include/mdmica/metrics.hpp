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

#include <utility>
#include <vector>

#include "mdmica/types.hpp"

namespace mdmica {

struct Assignment {
    std::vector<int> row_to_col;
    double total_cost = 0.0;
};

/// Minimum-cost assignment on a square cost matrix (Kuhn-Munkres with
/// potentials, O(d^3)). Throws on non-finite entries.
Assignment hungarian(const Matrix& cost);

/// Minimum-distance index between an estimated unmixing matrix and the
/// ground truth: md = inf_{P,D} ||P D What W0^{-1} - I||_F / sqrt(d-1),
/// with P a permutation and D a nonzero diagonal. The inner infimum over D
/// is solved in closed form per (row, position) pair; the permutation by
/// the Hungarian method.
struct MDReport {
    double md = 0.0;
    std::vector<int> permutation;  // row k of the gain goes to position permutation[k]
    Vector scalings;               // optimal diagonal entry for row k
    Matrix gain;                   // G = What * W0^{-1}
};

MDReport md_index(const Matrix& W_hat, const Matrix& W0);

/// Column permutation with signs, as applied by align_components:
/// aligned column j = sign[j] * X.col(source[j]).
struct SignedPermutation {
    std::vector<int> source;
    std::vector<int> sign;
};

/// Signed permutation of X_hat's columns maximizing the total |correlation|
/// with the matched reference columns; matched correlations are made
/// nonnegative. Throws on zero-variance columns.
std::pair<Matrix, SignedPermutation> align_components(const Matrix& X_hat, const Matrix& reference);

}  // namespace mdmica
