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

#include <doctest.h>

#include <random>

#include "mdmica/rng.hpp"
#include "mdmica/whitening.hpp"

using namespace mdmica;

namespace {

Matrix gen_observations(int n, int d, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::normal_distribution<double> norm(0.0, 1.0);
    Matrix Y(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) Y(i, j) = norm(rng) * (j + 1) + 0.3 * j;
    return Y;
}

}  // namespace

TEST_CASE("whitening yields unit sample covariance") {
    Matrix Y = gen_observations(200, 4, 17);
    WhiteningResult w = whiten(Y);
    CHECK((sample_covariance(w.Z) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((w.Z - (Y.rowwise() - w.mean.transpose()) * w.H.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    // H is symmetric positive definite
    CHECK((w.H - w.H.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(w.H);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("whitening twice is the identity") {
    Matrix Y = gen_observations(150, 3, 9);
    WhiteningResult first = whiten(Y);
    WhiteningResult second = whiten(first.Z);
    CHECK((second.H - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("analytic whitener for a diagonal covariance") {
    // Sample variances exactly 4 and 1, sample covariance exactly 0.
    Matrix Y(3, 2);
    const double c = 1.0 / std::sqrt(3.0);
    Y << -2.0, c, 0.0, -2.0 * c, 2.0, c;
    WhiteningResult w = whiten(Y);
    Matrix expect(2, 2);
    expect << 0.5, 0.0, 0.0, 1.0;
    CHECK((w.H - expect).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("H inverts the covariance square root") {
    Matrix Y = gen_observations(300, 3, 23);
    WhiteningResult w = whiten(Y);
    Matrix cov = sample_covariance(Y);
    CHECK((w.H * cov * w.H - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("affine invariance of the whitened covariance") {
    Matrix Y = gen_observations(250, 3, 31);
    Matrix A(3, 3);
    A << 2.0, 0.4, 0.0, -0.3, 1.0, 0.7, 0.1, 0.0, 0.5;
    WhiteningResult w = whiten(Y * A.transpose());
    CHECK((sample_covariance(w.Z) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("singular covariance is rejected with the eigenvalue named") {
    Matrix Y = gen_observations(100, 2, 3);
    Matrix Ydup(100, 3);
    Ydup << Y, Y.col(1);  // exact duplicate column
    try {
        whiten(Ydup);
        FAIL("expected SingularCovarianceError");
    } catch (const SingularCovarianceError& e) {
        CHECK(std::string(e.what()).find("eigenvalue") != std::string::npos);
    }
}

TEST_CASE("whiten requires more rows than columns") {
    Matrix Y = Matrix::Random(3, 3);
    CHECK_THROWS_AS(whiten(Y), InsufficientSampleError);
}
