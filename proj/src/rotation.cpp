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

#include "mdmica/rotation.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace mdmica {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
// Both sine and cosine below this magnitude: the factorization is locally
// non-unique, the angle is set to 0.
constexpr double kDegenerate = 1e-12;

// Left-multiply M by G_{i,j}(psi) in place (0-based rows r1 = i-1, r2 = j-1):
// row_i <- c*row_i - s*row_j, row_j <- s*row_i + c*row_j.
void apply_givens_left(Matrix& M, int r1, int r2, double c, double s) {
    Eigen::RowVectorXd a = M.row(r1);
    Eigen::RowVectorXd b = M.row(r2);
    M.row(r1) = c * a - s * b;
    M.row(r2) = s * a + c * b;
}

// Right-multiply M by G_{i,j}(psi)' in place:
// col_i <- c*col_i - s*col_j, col_j <- s*col_i + c*col_j.
void apply_givens_transpose_right(Matrix& M, int c1, int c2, double c, double s) {
    Vector a = M.col(c1);
    Vector b = M.col(c2);
    M.col(c1) = c * a - s * b;
    M.col(c2) = s * a + c * b;
}

double wrap_two_pi(double a) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w;
}

// Extract block theta_k (1-based k) from row k of the partially peeled
// matrix. Row k of G^(k) has the spherical structure
//   v_k = prod_{j>k} cos(theta_{k,j}),
//   v_m = -sin(theta_{k,m}) * prod_{j>m} cos(theta_{k,j}),  m = k+1..d,
// so angles are read off right-to-left while tracking the signed partial
// cosine product P. The sign of each intermediate P is free in the
// parameterization; `signs` supplies the branch for positions m = d..k+2.
std::vector<double> extract_block(const Eigen::RowVectorXd& v, int k, int d,
                                  const std::vector<int>& signs) {
    std::vector<double> block(static_cast<size_t>(d - k), 0.0);
    double P = 1.0;
    int sign_idx = 0;
    for (int m = d; m >= k + 1; --m) {
        double prev_p;
        if (m == k + 1) {
            prev_p = v(k - 1);
        } else {
            double mag = 0.0;
            for (int j = k; j <= m - 1; ++j) mag += v(j - 1) * v(j - 1);
            prev_p = signs[sign_idx++] * std::sqrt(mag);
        }
        const double sgn = (P >= 0.0) ? 1.0 : -1.0;
        const double sy = -v(m - 1) * sgn;
        const double cy = prev_p * sgn;
        double ang = 0.0;
        if (std::abs(sy) >= kDegenerate || std::abs(cy) >= kDegenerate) {
            ang = std::atan2(sy, cy);
        }
        block[static_cast<size_t>(m - k - 1)] = ang;
        P = prev_p;
    }
    return block;
}

// For blocks k >= 2 the support [0, pi) forces every sine nonnegative, which
// pins sign(P_{m-1}) = -sign of the first nonzero entry scanning left from
// position m-1; when the whole tail vanishes the diagonal entry decides.
std::vector<int> pinned_signs(const Eigen::RowVectorXd& v, int k, int d) {
    std::vector<int> signs;
    signs.reserve(static_cast<size_t>(d - k - 1));
    for (int m = d; m >= k + 2; --m) {
        int s = 0;
        for (int j = m - 1; j >= k + 1; --j) {
            if (std::abs(v(j - 1)) > kDegenerate) {
                s = v(j - 1) > 0.0 ? -1 : 1;
                break;
            }
        }
        if (s == 0) s = (v(k - 1) >= 0.0) ? 1 : -1;
        signs.push_back(s);
    }
    return signs;
}

// Peel G^(k)(block)' off M from the right.
void peel_block(Matrix& M, int k, int d, const std::vector<double>& block) {
    // G^(k)' = G_{k,k+1}' ... G_{k,d}'
    for (int j = k + 1; j <= d; ++j) {
        const double a = block[static_cast<size_t>(j - k - 1)];
        apply_givens_transpose_right(M, k - 1, j - 1, std::cos(a), std::sin(a));
    }
}

}  // namespace

AngleVector AngleVector::zero(int d) {
    if (d < 2) throw ShapeError("AngleVector: dimension must be at least 2, got " + std::to_string(d));
    return AngleVector(d, Vector::Zero(pair_count(d)));
}

int AngleVector::index_of(int d, int i, int j) {
    if (i < 1 || i >= j || j > d) {
        throw InvalidIndexError("angle index (" + std::to_string(i) + ", " + std::to_string(j) +
                                ") out of range for d = " + std::to_string(d));
    }
    // Blocks 1..i-1 occupy (d-1) + ... + (d-i+1) slots.
    int off = (i - 1) * d - (i - 1) * i / 2;
    return off + (j - i - 1);
}

int AngleVector::block_offset(int i) const {
    if (i < 1 || i > d - 1) {
        throw InvalidIndexError("block index " + std::to_string(i) + " out of range for d = " + std::to_string(d));
    }
    return (i - 1) * d - (i - 1) * i / 2;
}

bool AngleVector::in_support(double slack) const {
    int idx = 0;
    for (int i = 1; i <= d - 1; ++i) {
        for (int j = i + 1; j <= d; ++j, ++idx) {
            const double a = angles(idx);
            const double hi = (i == 1) ? kTwoPi : M_PI;
            if (a < -slack || a >= hi + slack) return false;
        }
    }
    return true;
}

Matrix givens(int d, int i, int j, double psi) {
    if (d < 2) throw InvalidIndexError("givens: dimension must be at least 2");
    if (i < 1 || i >= j || j > d) {
        throw InvalidIndexError("givens: need 1 <= i < j <= d, got i = " + std::to_string(i) +
                                ", j = " + std::to_string(j) + ", d = " + std::to_string(d));
    }
    Matrix G = Matrix::Identity(d, d);
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    G(i - 1, i - 1) = c;
    G(j - 1, j - 1) = c;
    G(i - 1, j - 1) = -s;
    G(j - 1, i - 1) = s;
    return G;
}

Matrix rotation_from_angles(const AngleVector& theta) {
    const int d = theta.d;
    if (d < 2) throw ShapeError("rotation_from_angles: dimension must be at least 2");
    if (theta.angles.size() != AngleVector::pair_count(d)) {
        throw ShapeError("rotation_from_angles: expected " + std::to_string(AngleVector::pair_count(d)) +
                         " angles, got " + std::to_string(theta.angles.size()));
    }
    Matrix W = Matrix::Identity(d, d);
    // W = G^(d-1) ... G^(1): left-multiply block products in ascending k.
    int idx = 0;
    for (int k = 1; k <= d - 1; ++k) {
        // G^(k) = G_{k,d} ... G_{k,k+1}: left-multiply factors in ascending j.
        for (int j = k + 1; j <= d; ++j) {
            const double a = theta.angles(idx++);
            apply_givens_left(W, k - 1, j - 1, std::cos(a), std::sin(a));
        }
    }
    return W;
}

bool is_rotation(const Matrix& W, double tol) {
    if (W.rows() != W.cols() || W.rows() < 2) return false;
    const int d = static_cast<int>(W.rows());
    const Matrix I = Matrix::Identity(d, d);
    if (((W * W.transpose()) - I).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(W.determinant() - 1.0) <= tol;
}

AngleVector angles_from_rotation(const Matrix& W) {
    if (W.rows() != W.cols() || W.rows() < 2) {
        throw InvalidRotationError("angles_from_rotation: input must be square with d >= 2");
    }
    const int d = static_cast<int>(W.rows());
    if (!is_rotation(W, 1e-8)) {
        throw InvalidRotationError("angles_from_rotation: input is not orthogonal with determinant +1");
    }

    // Block 1 lives on [0, 2*pi)^{d-1}, which double-covers each cosine sign
    // of its partial products; blocks k >= 2 are pinned by their [0, pi)
    // support. Search the 2^{d-2} block-1 branches and keep the factorization
    // that reproduces W best.
    const int free_signs = std::max(0, d - 2);
    const long n_branches = 1L << free_signs;

    Vector best_angles;
    double best_err = std::numeric_limits<double>::infinity();

    std::vector<int> sig1(static_cast<size_t>(free_signs), 1);
    for (long mask = 0; mask < n_branches; ++mask) {
        for (int b = 0; b < free_signs; ++b) sig1[static_cast<size_t>(b)] = ((mask >> b) & 1) ? -1 : 1;

        Matrix M = W;
        Vector cand(AngleVector::pair_count(d));
        int idx = 0;
        bool feasible = true;

        auto block1 = extract_block(M.row(0), 1, d, sig1);
        for (double a : block1) cand(idx++) = a;
        peel_block(M, 1, d, block1);

        for (int k = 2; k <= d - 1 && feasible; ++k) {
            const Eigen::RowVectorXd v = M.row(k - 1);
            auto blk = extract_block(v, k, d, pinned_signs(v, k, d));
            for (double a : blk) {
                if (a < -1e-9 || a > M_PI + 1e-9) feasible = false;
                cand(idx) = a;
                ++idx;
            }
            peel_block(M, k, d, blk);
        }
        if (!feasible) continue;

        const double err = (M - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
        if (err < best_err) {
            best_err = err;
            best_angles = cand;
            if (err < 1e-11) break;
        }
    }

    if (best_angles.size() == 0) {
        // No branch satisfied the block constraints (degenerate input):
        // fall back to the all-positive branch.
        Matrix M = W;
        best_angles.resize(AngleVector::pair_count(d));
        int idx = 0;
        for (int k = 1; k <= d - 1; ++k) {
            const Eigen::RowVectorXd v = M.row(k - 1);
            std::vector<int> ones(static_cast<size_t>(std::max(0, d - k - 1)), 1);
            auto blk = extract_block(v, k, d, ones);
            for (double a : blk) best_angles(idx++) = a;
            peel_block(M, k, d, blk);
        }
    }

    // Wrap into the support. Block 1 wraps mod 2*pi (exact); blocks k >= 2
    // already satisfy [0, pi] up to atan2 range, reduce mod pi per the
    // support convention.
    AngleVector out(d, best_angles);
    int idx = 0;
    for (int i = 1; i <= d - 1; ++i) {
        for (int j = i + 1; j <= d; ++j, ++idx) {
            double a = out.angles(idx);
            if (i == 1) {
                a = wrap_two_pi(a);
                if (a >= kTwoPi) a = 0.0;
            } else if (std::abs(a) <= 1e-9 || std::abs(a - M_PI) <= 1e-9) {
                a = 0.0;
            } else if (a < 0.0 || a >= M_PI) {
                a = std::fmod(a, M_PI);
                if (a < 0.0) a += M_PI;
            }
            out.angles(idx) = a;
        }
    }
    return out;
}

}  // namespace mdmica
