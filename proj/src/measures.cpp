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

#include "mdmica/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mdmica {

using Array = Eigen::ArrayXd;

MeasureKind MeasureKind::hsic_with(std::vector<double> bw) {
    MeasureKind k{MeasureTag::hsic, std::move(bw)};
    k.validate();
    return k;
}

void MeasureKind::validate() const {
    if (tag != MeasureTag::hsic && !bandwidths.empty()) {
        throw ConfigError("bandwidths are only meaningful for the hsic measure");
    }
    for (double b : bandwidths) {
        if (!(b > 0.0)) throw ConfigError("hsic bandwidths must be strictly positive");
    }
}

std::string to_string(MeasureTag tag) {
    switch (tag) {
        case MeasureTag::asym: return "asym";
        case MeasureTag::sym: return "sym";
        case MeasureTag::comp: return "comp";
        case MeasureTag::hsic: return "hsic";
    }
    return "?";
}

MeasureTag measure_tag_from_string(const std::string& s) {
    if (s == "asym") return MeasureTag::asym;
    if (s == "sym") return MeasureTag::sym;
    if (s == "comp") return MeasureTag::comp;
    if (s == "hsic") return MeasureTag::hsic;
    throw ConfigError("unknown measure '" + s + "' (expected asym, sym, comp, or hsic)");
}

GroupedSample GroupedSample::scalar_columns(Matrix X) {
    GroupedSample s;
    s.group_sizes.assign(static_cast<size_t>(X.cols()), 1);
    s.data = std::move(X);
    return s;
}

GroupedSample::GroupedSample(Matrix X, std::vector<int> sizes)
    : data(std::move(X)), group_sizes(std::move(sizes)) {
    validate();
}

int GroupedSample::block_start(int j) const {
    int s = 0;
    for (int b = 0; b < j; ++b) s += group_sizes[static_cast<size_t>(b)];
    return s;
}

void GroupedSample::validate() const {
    int total = 0;
    for (int g : group_sizes) {
        if (g <= 0) throw ShapeError("GroupedSample: block sizes must be positive");
        total += g;
    }
    if (total != data.cols()) {
        throw ShapeError("GroupedSample: block sizes sum to " + std::to_string(total) + " but data has " +
                         std::to_string(data.cols()) + " columns");
    }
}

namespace {

void require_sample(const GroupedSample& s, int min_blocks) {
    s.validate();
    if (s.n() < 2) throw InsufficientSampleError("measure: need at least 2 observations");
    if (s.d() < min_blocks) {
        throw ShapeError("measure: need at least " + std::to_string(min_blocks) + " blocks, got " +
                         std::to_string(s.d()));
    }
}

// Squared distances from row k to every row, restricted to columns
// [start, start+width).
void block_sqdist(const Matrix& X, int k, int start, int width, Array& out) {
    out = (X.col(start).array() - X(k, start)).square();
    for (int c = 1; c < width; ++c) {
        out += (X.col(start + c).array() - X(k, start + c)).square();
    }
}

struct PairAccumulator {
    double sum_ab = 0.0;
    double sum_a = 0.0;
    double sum_b = 0.0;
    double rowsum_prod = 0.0;

    void add_row(const Array& a, const Array& b) {
        sum_ab += (a * b).sum();
        const double sa = a.sum();
        const double sb = b.sum();
        sum_a += sa;
        sum_b += sb;
        rowsum_prod += sa * sb;
    }

    // V_n^2 = T1 + T2 - T3 with T3 in row-sum form.
    double value(int n) const {
        const double nn = static_cast<double>(n);
        const double t1 = sum_ab / (nn * nn);
        const double t2 = (sum_a / (nn * nn)) * (sum_b / (nn * nn));
        const double t3 = 2.0 * rowsum_prod / (nn * nn * nn);
        return t1 + t2 - t3;
    }
};

double clamp_nonneg(double v) { return v < 0.0 ? 0.0 : v; }

}  // namespace

double dcov_sq(const GroupedSample& sample) {
    require_sample(sample, 2);
    if (sample.d() != 2) {
        throw ShapeError("dcov_sq: expected exactly two blocks, got " + std::to_string(sample.d()));
    }
    const int n = sample.n();
    const int w0 = sample.group_sizes[0];
    const int w1 = sample.group_sizes[1];
    Array sq0(n), sq1(n);
    PairAccumulator acc;
    for (int k = 0; k < n; ++k) {
        block_sqdist(sample.data, k, 0, w0, sq0);
        block_sqdist(sample.data, k, w0, w1, sq1);
        acc.add_row(sq0.sqrt(), sq1.sqrt());
    }
    return clamp_nonneg(acc.value(n));
}

double mdm_asym(const GroupedSample& sample) {
    require_sample(sample, 2);
    const int n = sample.n();
    const int d = sample.d();
    std::vector<Array> sq(static_cast<size_t>(d), Array(n));
    Array suffix(n), a(n);
    std::vector<PairAccumulator> acc(static_cast<size_t>(d - 1));
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < d; ++j) {
            block_sqdist(sample.data, k, sample.block_start(j), sample.group_sizes[static_cast<size_t>(j)],
                         sq[static_cast<size_t>(j)]);
        }
        // Splits (X_c, X_{c+}) for c = 1..d-1, scanning c downward so the
        // suffix sum of squared distances grows one block at a time.
        suffix = sq[static_cast<size_t>(d - 1)];
        for (int c = d - 1; c >= 1; --c) {
            a = sq[static_cast<size_t>(c - 1)].sqrt();
            acc[static_cast<size_t>(c - 1)].add_row(a, suffix.sqrt());
            if (c > 1) suffix += sq[static_cast<size_t>(c - 1)];
        }
    }
    double total = 0.0;
    for (const auto& pa : acc) total += clamp_nonneg(pa.value(n));
    return total;
}

double mdm_sym(const GroupedSample& sample) {
    require_sample(sample, 2);
    const int n = sample.n();
    const int d = sample.d();
    std::vector<Array> sq(static_cast<size_t>(d), Array(n));
    Array total_sq(n), rest(n);
    std::vector<PairAccumulator> acc(static_cast<size_t>(d));
    for (int k = 0; k < n; ++k) {
        total_sq.setZero();
        for (int j = 0; j < d; ++j) {
            block_sqdist(sample.data, k, sample.block_start(j), sample.group_sizes[static_cast<size_t>(j)],
                         sq[static_cast<size_t>(j)]);
            total_sq += sq[static_cast<size_t>(j)];
        }
        for (int c = 0; c < d; ++c) {
            rest = total_sq - sq[static_cast<size_t>(c)];
            acc[static_cast<size_t>(c)].add_row(sq[static_cast<size_t>(c)].sqrt(), rest.sqrt());
        }
    }
    double total = 0.0;
    for (const auto& pa : acc) total += clamp_nonneg(pa.value(n));
    return total;
}

double mdm_comp_star(const GroupedSample& sample) {
    require_sample(sample, 2);
    const int n = sample.n();
    const int d = sample.d();
    const int p = static_cast<int>(sample.data.cols());

    // Shifted sample: block j of row l comes from row (l + j) mod n of the
    // original (0-based j, i.e. component j+1 uses offset j).
    Matrix shifted(n, p);
    for (int j = 0; j < d; ++j) {
        const int start = sample.block_start(j);
        const int width = sample.group_sizes[static_cast<size_t>(j)];
        for (int l = 0; l < n; ++l) {
            shifted.block(l, start, 1, width) = sample.data.block((l + j) % n, start, 1, width);
        }
    }

    Array sq(n);
    double a_sum = 0.0, b_sum = 0.0, c_sum = 0.0;
    for (int k = 0; k < n; ++k) {
        block_sqdist(shifted, k, 0, p, sq);  // |Xshift^k - Xshift^l|
        c_sum += sq.sqrt().sum();
        block_sqdist(sample.data, k, 0, p, sq);  // |X^k - X^l|
        b_sum += sq.sqrt().sum();
        // |X^k - Xshift^l|: squared distances from row k of X to rows of shifted.
        sq = (shifted.col(0).array() - sample.data(k, 0)).square();
        for (int c = 1; c < p; ++c) {
            sq += (shifted.col(c).array() - sample.data(k, c)).square();
        }
        a_sum += sq.sqrt().sum();
    }
    const double nn = static_cast<double>(n);
    return (2.0 * a_sum - b_sum - c_sum) / (nn * nn);
}

std::vector<double> median_bandwidths(const GroupedSample& sample) {
    require_sample(sample, 1);
    const int n = sample.n();
    const int d = sample.d();
    std::vector<double> sigmas(static_cast<size_t>(d));
    std::vector<double> dists;
    Array sq(n);
    for (int j = 0; j < d; ++j) {
        dists.clear();
        dists.reserve(static_cast<size_t>(n) * (n - 1) / 2);
        const int start = sample.block_start(j);
        const int width = sample.group_sizes[static_cast<size_t>(j)];
        for (int k = 0; k < n; ++k) {
            block_sqdist(sample.data, k, start, width, sq);
            for (int l = k + 1; l < n; ++l) {
                if (sq(l) > 0.0) dists.push_back(std::sqrt(sq(l)));
            }
        }
        if (dists.empty()) {
            throw DegenerateBandwidthError("median bandwidth undefined for component " + std::to_string(j + 1) +
                                           ": all pairwise distances are zero");
        }
        const size_t m = dists.size();
        auto mid = dists.begin() + static_cast<std::ptrdiff_t>(m / 2);
        std::nth_element(dists.begin(), mid, dists.end());
        double med = *mid;
        if (m % 2 == 0) {
            auto lo = std::max_element(dists.begin(), mid);
            med = 0.5 * (med + *lo);
        }
        sigmas[static_cast<size_t>(j)] = med;
    }
    return sigmas;
}

double dhsic(const GroupedSample& sample, const MeasureKind& kind) {
    require_sample(sample, 2);
    if (kind.tag != MeasureTag::hsic) throw ConfigError("dhsic: measure kind must be hsic");
    const int n = sample.n();
    const int d = sample.d();

    std::vector<double> sigmas = kind.bandwidths;
    if (sigmas.empty()) {
        sigmas = median_bandwidths(sample);
    } else if (static_cast<int>(sigmas.size()) != d) {
        throw ConfigError("dhsic: expected " + std::to_string(d) + " bandwidths, got " +
                          std::to_string(sigmas.size()));
    }
    for (int j = 0; j < d; ++j) {
        if (!(sigmas[static_cast<size_t>(j)] > 0.0)) {
            throw DegenerateBandwidthError("dhsic: bandwidth for component " + std::to_string(j + 1) +
                                           " is not positive");
        }
    }

    Array sq(n), kern(n), prod(n);
    std::vector<double> comp_sum(static_cast<size_t>(d), 0.0);
    double term1 = 0.0, term3 = 0.0;
    for (int k = 0; k < n; ++k) {
        prod.setOnes();
        double row_prod = 1.0;
        for (int j = 0; j < d; ++j) {
            block_sqdist(sample.data, k, sample.block_start(j), sample.group_sizes[static_cast<size_t>(j)], sq);
            kern = (-sq / (2.0 * sigmas[static_cast<size_t>(j)] * sigmas[static_cast<size_t>(j)])).exp();
            prod *= kern;
            const double s = kern.sum();
            comp_sum[static_cast<size_t>(j)] += s;
            row_prod *= s / static_cast<double>(n);
        }
        term1 += prod.sum();
        term3 += row_prod;
    }
    const double nn = static_cast<double>(n);
    double term2 = 1.0;
    for (int j = 0; j < d; ++j) term2 *= comp_sum[static_cast<size_t>(j)] / (nn * nn);
    return clamp_nonneg(term1 / (nn * nn) + term2 - 2.0 / nn * term3);
}

double evaluate_measure(const GroupedSample& sample, const MeasureKind& kind) {
    switch (kind.tag) {
        case MeasureTag::asym: return mdm_asym(sample);
        case MeasureTag::sym: return mdm_sym(sample);
        case MeasureTag::comp: return mdm_comp_star(sample);
        case MeasureTag::hsic: return dhsic(sample, kind);
    }
    throw ConfigError("evaluate_measure: unknown measure tag");
}

}  // namespace mdmica
