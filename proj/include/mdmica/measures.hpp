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

#include <string>
#include <vector>

#include "mdmica/types.hpp"

namespace mdmica {

enum class MeasureTag { asym, sym, comp, hsic };

/// Which dependence statistic to use as an objective. For hsic, explicit
/// per-component bandwidths may be given; an empty list means the median
/// heuristic (median of nonzero pairwise distances within each component).
struct MeasureKind {
    MeasureTag tag = MeasureTag::sym;
    std::vector<double> bandwidths;

    static MeasureKind asym() { return {MeasureTag::asym, {}}; }
    static MeasureKind sym() { return {MeasureTag::sym, {}}; }
    static MeasureKind comp() { return {MeasureTag::comp, {}}; }
    static MeasureKind hsic() { return {MeasureTag::hsic, {}}; }
    static MeasureKind hsic_with(std::vector<double> bw);

    void validate() const;
};

std::string to_string(MeasureTag tag);
MeasureTag measure_tag_from_string(const std::string& s);

/// An n x p sample whose columns are partitioned into d ordered blocks
/// (components) of sizes group_sizes[0..d-1]. In the ICA application every
/// block is a single column.
struct GroupedSample {
    Matrix data;
    std::vector<int> group_sizes;

    /// One block per column.
    static GroupedSample scalar_columns(Matrix X);
    GroupedSample() = default;
    GroupedSample(Matrix X, std::vector<int> sizes);

    int n() const { return static_cast<int>(data.rows()); }
    int d() const { return static_cast<int>(group_sizes.size()); }
    int block_start(int j) const;  // 0-based block index
    void validate() const;
};

/// Squared empirical distance covariance V_n^2 between the two blocks of the
/// sample: the three-term V-statistic with the O(n^2) row-sum form of the
/// triple-sum term. Clamped at 0 (tiny negatives are roundoff).
double dcov_sq(const GroupedSample& sample);

/// Asymmetric measure R_n = sum_{c=1}^{d-1} V_n^2((X_c, X_{c+})).
double mdm_asym(const GroupedSample& sample);

/// Symmetric measure S_n = sum_{c=1}^{d} V_n^2((X_c, X_{-c})).
double mdm_sym(const GroupedSample& sample);

/// Simplified complete measure Q*_n built from cyclically shifted rows
/// (component j of the shifted sample takes row k+j-1 mod n):
///   Q*_n = (2*A - B - C) / n^2 with
///   A = sum_{k,l} |X^k - Xshift^l|, B = sum_{k,l} |X^k - X^l|,
///   C = sum_{k,l} |Xshift^k - Xshift^l|.
/// Reported as computed, no clamping.
double mdm_comp_star(const GroupedSample& sample);

/// d-variable HSIC V-statistic with Gaussian kernels
/// K_j(k,l) = exp(-|X_j^k - X_j^l|^2 / (2 sigma_j^2)). Clamped at 0.
double dhsic(const GroupedSample& sample, const MeasureKind& kind);

/// Median-heuristic bandwidths: per component, the median of the nonzero
/// pairwise distances. Throws DegenerateBandwidthError naming the component
/// when a component has no nonzero pairwise distance.
std::vector<double> median_bandwidths(const GroupedSample& sample);

/// Dispatch on kind.tag.
double evaluate_measure(const GroupedSample& sample, const MeasureKind& kind);

}  // namespace mdmica
