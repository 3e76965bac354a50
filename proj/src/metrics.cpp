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

#include "mdmica/metrics.hpp"

#include <cmath>
#include <limits>

namespace mdmica {

Assignment hungarian(const Matrix& cost) {
    if (cost.rows() != cost.cols() || cost.rows() < 1) {
        throw ShapeError("hungarian: cost matrix must be square and nonempty");
    }
    if (!cost.allFinite()) throw Error("hungarian: cost matrix has non-finite entries");
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();

    // Shortest augmenting paths with dual potentials (1-based scratch).
    std::vector<double> u(static_cast<size_t>(n) + 1, 0.0), v(static_cast<size_t>(n) + 1, 0.0);
    std::vector<int> p(static_cast<size_t>(n) + 1, 0), way(static_cast<size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<size_t>(n) + 1, inf);
        std::vector<char> used(static_cast<size_t>(n) + 1, 0);
        do {
            used[static_cast<size_t>(j0)] = 1;
            const int i0 = p[static_cast<size_t>(j0)];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
                if (cur < minv[static_cast<size_t>(j)]) {
                    minv[static_cast<size_t>(j)] = cur;
                    way[static_cast<size_t>(j)] = j0;
                }
                if (minv[static_cast<size_t>(j)] < delta) {
                    delta = minv[static_cast<size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) {
                    u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
                    v[static_cast<size_t>(j)] -= delta;
                } else {
                    minv[static_cast<size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<size_t>(j0)];
            p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    Assignment out;
    out.row_to_col.assign(static_cast<size_t>(n), -1);
    for (int j = 1; j <= n; ++j) {
        if (p[static_cast<size_t>(j)] > 0) out.row_to_col[static_cast<size_t>(p[static_cast<size_t>(j)]) - 1] = j - 1;
    }
    out.total_cost = 0.0;
    for (int i = 0; i < n; ++i) out.total_cost += cost(i, out.row_to_col[static_cast<size_t>(i)]);
    return out;
}

MDReport md_index(const Matrix& W_hat, const Matrix& W0) {
    const int d = static_cast<int>(W0.rows());
    if (W0.rows() != W0.cols() || W_hat.rows() != d || W_hat.cols() != d) {
        throw ShapeError("md_index: matrices must be d x d with matching d");
    }
    if (d < 2) throw ShapeError("md_index: need d >= 2");

    Eigen::FullPivLU<Matrix> lu(W0);
    if (!lu.isInvertible()) throw Error("md_index: ground-truth matrix is singular");

    MDReport rep;
    rep.gain = W_hat * lu.inverse();

    Vector row_sq(d);
    for (int k = 0; k < d; ++k) {
        row_sq(k) = rep.gain.row(k).squaredNorm();
        if (!(row_sq(k) > 0.0)) {
            throw Error("md_index: row " + std::to_string(k + 1) + " of the gain matrix is zero");
        }
    }

    // Residual of optimally scaling row k onto basis vector e_j:
    // min_c ||c g - e_j||^2 = 1 - g_j^2 / ||g||^2.
    Matrix cost(d, d);
    for (int k = 0; k < d; ++k) {
        for (int j = 0; j < d; ++j) {
            cost(k, j) = 1.0 - rep.gain(k, j) * rep.gain(k, j) / row_sq(k);
        }
    }
    Assignment asg = hungarian(cost);

    rep.permutation = asg.row_to_col;
    rep.scalings.resize(d);
    double resid = 0.0;
    for (int k = 0; k < d; ++k) {
        const int j = asg.row_to_col[static_cast<size_t>(k)];
        rep.scalings(k) = rep.gain(k, j) / row_sq(k);
        resid += cost(k, j);
    }
    rep.md = std::sqrt(std::max(resid, 0.0)) / std::sqrt(static_cast<double>(d - 1));
    return rep;
}

std::pair<Matrix, SignedPermutation> align_components(const Matrix& X_hat, const Matrix& reference) {
    if (X_hat.rows() != reference.rows() || X_hat.cols() != reference.cols()) {
        throw ShapeError("align_components: shapes must match");
    }
    const int n = static_cast<int>(X_hat.rows());
    const int d = static_cast<int>(X_hat.cols());
    if (n < 2 || d < 1) throw ShapeError("align_components: need n >= 2 and d >= 1");

    Matrix A = X_hat.rowwise() - X_hat.colwise().mean();
    Matrix B = reference.rowwise() - reference.colwise().mean();
    Vector na(d), nb(d);
    for (int j = 0; j < d; ++j) {
        na(j) = A.col(j).norm();
        nb(j) = B.col(j).norm();
        if (!(na(j) > 0.0) || !(nb(j) > 0.0)) {
            throw Error("align_components: column " + std::to_string(j + 1) + " has zero variance");
        }
    }
    Matrix corr = (A.transpose() * B);
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) corr(k, j) /= na(k) * nb(j);

    Assignment asg = hungarian(Matrix::Ones(d, d) - corr.cwiseAbs());

    SignedPermutation sp;
    sp.source.assign(static_cast<size_t>(d), 0);
    sp.sign.assign(static_cast<size_t>(d), 1);
    Matrix aligned(n, d);
    for (int k = 0; k < d; ++k) {
        const int j = asg.row_to_col[static_cast<size_t>(k)];  // X_hat column k matches reference column j
        const int s = corr(k, j) >= 0.0 ? 1 : -1;
        sp.source[static_cast<size_t>(j)] = k;
        sp.sign[static_cast<size_t>(j)] = s;
        aligned.col(j) = static_cast<double>(s) * X_hat.col(k);
    }
    return {aligned, sp};
}

}  // namespace mdmica
