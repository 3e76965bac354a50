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

#include <cmath>
#include <random>

#include "mdmica/rng.hpp"
#include "mdmica/rotation.hpp"
#include "oracles.hpp"

using namespace mdmica;

namespace {

AngleVector random_interior_theta(int d, std::mt19937_64& rng) {
    AngleVector th = AngleVector::zero(d);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int idx = 0;
    for (int i = 1; i <= d - 1; ++i) {
        for (int j = i + 1; j <= d; ++j, ++idx) {
            const double hi = (i == 1) ? 2.0 * M_PI : M_PI;
            th.angles(idx) = (0.001 + 0.998 * u(rng)) * hi;
        }
    }
    return th;
}

}  // namespace

TEST_CASE("givens basic values") {
    CHECK(givens(2, 1, 2, 0.0).isApprox(Matrix::Identity(2, 2), 1e-15));

    Matrix Q = givens(2, 1, 2, M_PI / 2.0);
    CHECK(Q(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(Q(0, 1) == doctest::Approx(-1.0));
    CHECK(Q(1, 0) == doctest::Approx(1.0));
    CHECK(Q(1, 1) == doctest::Approx(0.0).epsilon(1e-15));

    Matrix R = givens(3, 1, 3, M_PI / 4.0);
    const double h = std::sqrt(2.0) / 2.0;
    CHECK(R(0, 0) == doctest::Approx(h));
    CHECK(R(2, 2) == doctest::Approx(h));
    CHECK(R(0, 2) == doctest::Approx(-h));
    CHECK(R(2, 0) == doctest::Approx(h));
    CHECK(R(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("givens rejects bad indices") {
    CHECK_THROWS_AS(givens(3, 2, 2, 0.1), InvalidIndexError);
    CHECK_THROWS_AS(givens(3, 3, 1, 0.1), InvalidIndexError);
    CHECK_THROWS_AS(givens(3, 0, 2, 0.1), InvalidIndexError);
    CHECK_THROWS_AS(givens(3, 1, 4, 0.1), InvalidIndexError);
}

TEST_CASE("rotation_from_angles matches the literal factor product") {
    SUBCASE("zero angles give the identity") {
        for (int d : {2, 3, 5}) {
            CHECK(rotation_from_angles(AngleVector::zero(d)).isApprox(Matrix::Identity(d, d), 1e-15));
        }
    }
    SUBCASE("single factor at d = 2") {
        AngleVector th = AngleVector::zero(2);
        th.angles(0) = M_PI / 2.0;
        Matrix W = rotation_from_angles(th);
        CHECK(W(0, 1) == doctest::Approx(-1.0));
        CHECK(W(1, 0) == doctest::Approx(1.0));
    }
    SUBCASE("d = 3 explicit triple product") {
        AngleVector th = AngleVector::zero(3);
        th.angles << 0.3, 1.1, 2.0;
        const Matrix expect = oracle::givens_dense(3, 2, 3, 2.0) * oracle::givens_dense(3, 1, 3, 1.1) *
                              oracle::givens_dense(3, 1, 2, 0.3);
        CHECK((rotation_from_angles(th) - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("random angles against the dense-product oracle") {
        auto rng = make_rng(11);
        for (int d : {3, 4, 6}) {
            for (int rep = 0; rep < 20; ++rep) {
                AngleVector th = random_interior_theta(d, rng);
                CHECK((rotation_from_angles(th) - oracle::rotation_product(d, th.angles)).cwiseAbs().maxCoeff() <
                      1e-12);
            }
        }
    }
}

TEST_CASE("rotation matrices are orthogonal with determinant one") {
    auto rng = make_rng(7);
    for (int d : {2, 3, 4, 5}) {
        for (int rep = 0; rep < 25; ++rep) {
            Matrix W = rotation_from_angles(random_interior_theta(d, rng));
            CHECK(((W * W.transpose()) - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(std::abs(W.determinant() - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("rows k are determined by blocks up to k") {
    auto rng = make_rng(21);
    std::uniform_real_distribution<double> u(0.0, M_PI);
    for (int d : {3, 4, 5}) {
        AngleVector th = random_interior_theta(d, rng);
        Matrix W = rotation_from_angles(th);
        for (int k = 1; k <= d - 2; ++k) {
            AngleVector perturbed = th;
            for (int i = k + 1; i <= d - 1; ++i) {
                const int off = th.block_offset(i);
                for (int c = 0; c < th.block_size(i); ++c) perturbed.angles(off + c) = u(rng);
            }
            Matrix W2 = rotation_from_angles(perturbed);
            // Exact: later blocks never touch rows 1..k.
            CHECK((W2.topRows(k) - W.topRows(k)).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("angles_from_rotation inverts the parameterization") {
    SUBCASE("identity gives zero angles") {
        for (int d : {2, 3, 4}) {
            AngleVector th = angles_from_rotation(Matrix::Identity(d, d));
            CHECK(th.angles.cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("quarter turn at d = 2") {
        Matrix W(2, 2);
        W << 0.0, -1.0, 1.0, 0.0;
        AngleVector th = angles_from_rotation(W);
        CHECK(th.angles(0) == doctest::Approx(M_PI / 2.0).epsilon(1e-12));
    }
    SUBCASE("100 random round trips per dimension") {
        auto rng = make_rng(3);
        for (int d : {2, 3, 4}) {
            for (int rep = 0; rep < 100; ++rep) {
                AngleVector th = random_interior_theta(d, rng);
                AngleVector back = angles_from_rotation(rotation_from_angles(th));
                CHECK((back.angles - th.angles).cwiseAbs().maxCoeff() < 1e-8);
                CHECK(back.in_support());
            }
        }
    }
    SUBCASE("matrix-level round trip on arbitrary rotations") {
        auto rng = make_rng(5);
        std::normal_distribution<double> norm(0.0, 1.0);
        for (int d : {2, 3, 4, 5}) {
            for (int rep = 0; rep < 30; ++rep) {
                Matrix A(d, d);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) A(i, j) = norm(rng);
                Eigen::HouseholderQR<Matrix> qr(A);
                Matrix Q = qr.householderQ();
                if (Q.determinant() < 0.0) Q.col(0) = -Q.col(0);
                AngleVector th = angles_from_rotation(Q);
                CHECK(th.in_support());
                CHECK((rotation_from_angles(th) - Q).cwiseAbs().maxCoeff() < 1e-8);
            }
        }
    }
}

TEST_CASE("angles_from_rotation rejects non-rotations") {
    Matrix M = Matrix::Identity(3, 3);
    M(0, 0) = 2.0;
    CHECK_THROWS_AS(angles_from_rotation(M), InvalidRotationError);

    Matrix R = Matrix::Identity(3, 3);
    R(0, 0) = -1.0;  // determinant -1
    CHECK_THROWS_AS(angles_from_rotation(R), InvalidRotationError);
}

TEST_CASE("angle vector indexing") {
    CHECK(AngleVector::pair_count(4) == 6);
    CHECK(AngleVector::index_of(4, 1, 2) == 0);
    CHECK(AngleVector::index_of(4, 1, 4) == 2);
    CHECK(AngleVector::index_of(4, 2, 3) == 3);
    CHECK(AngleVector::index_of(4, 3, 4) == 5);
    AngleVector th = AngleVector::zero(4);
    CHECK(th.block_offset(1) == 0);
    CHECK(th.block_offset(2) == 3);
    CHECK(th.block_offset(3) == 5);
    CHECK(th.block_size(1) == 3);
    CHECK(th.block_size(3) == 1);
    CHECK_THROWS_AS(th.block_offset(4), InvalidIndexError);
}
