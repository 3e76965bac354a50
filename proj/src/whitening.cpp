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

#include "mdmica/whitening.hpp"

#include <cmath>
#include <string>

namespace mdmica {

Matrix sample_covariance(const Matrix& Y) {
    const auto n = Y.rows();
    if (n < 2) throw InsufficientSampleError("sample_covariance: need at least 2 rows");
    Matrix centered = Y.rowwise() - Y.colwise().mean();
    return (centered.transpose() * centered) / static_cast<double>(n - 1);
}

WhiteningResult whiten(const Matrix& Y) {
    const auto n = Y.rows();
    const auto d = Y.cols();
    if (d < 1) throw ShapeError("whiten: input has no columns");
    if (n <= d) {
        throw InsufficientSampleError("whiten: need n > d, got n = " + std::to_string(n) +
                                      ", d = " + std::to_string(d));
    }

    WhiteningResult res;
    res.mean = Y.colwise().mean();
    Matrix centered = Y.rowwise() - res.mean.transpose();
    Matrix cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw SingularCovarianceError("whiten: eigendecomposition of the sample covariance failed");
    }
    const Vector& lam = eig.eigenvalues();
    const double lam_max = lam.maxCoeff();
    const double lam_min = lam.minCoeff();
    if (!(lam_min > 1e-12 * lam_max)) {
        throw SingularCovarianceError("whiten: sample covariance is near-singular, smallest eigenvalue " +
                                      std::to_string(lam_min) + " vs largest " + std::to_string(lam_max));
    }

    // H = U * diag(1/sqrt(lambda)) * U'
    res.H = eig.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() *
            eig.eigenvectors().transpose();
    res.Z = centered * res.H.transpose();
    return res;
}

}  // namespace mdmica
