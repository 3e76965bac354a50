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

/// Centered, unit-covariance observations Z = (Y - mean) * H', the symmetric
/// whitener H = Cov(Y)^{-1/2}, and the subtracted column means.
struct WhiteningResult {
    Matrix Z;
    Matrix H;
    Vector mean;
};

/// Sample covariance with 1/(n-1) normalization.
Matrix sample_covariance(const Matrix& Y);

/// Center Y by its column means and whiten by the inverse symmetric square
/// root of the sample covariance (eigendecomposition). Requires n > d and a
/// covariance whose smallest eigenvalue exceeds 1e-12 times the largest;
/// otherwise throws SingularCovarianceError naming the offending eigenvalue.
WhiteningResult whiten(const Matrix& Y);

}  // namespace mdmica
