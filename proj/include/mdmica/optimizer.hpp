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

#include <cstdint>
#include <optional>
#include <vector>

#include "mdmica/init.hpp"
#include "mdmica/measures.hpp"
#include "mdmica/rotation.hpp"
#include "mdmica/types.hpp"

namespace mdmica {

enum class Scheme { deflation, parallel };
enum class InitStrategy { single, lhs, lhs_bo };

std::string to_string(Scheme s);
std::string to_string(InitStrategy s);

struct OptimizerConfig {
    Scheme scheme = Scheme::parallel;
    MeasureKind measure = MeasureKind::sym();
    InitStrategy init = InitStrategy::lhs;
    int lhs_points = 0;  // 0 resolves to 10*d
    int bo_iters = 0;    // 0 resolves to 10*d
    GPKernel bo_kernel = GPKernel::exp;
    double grad_step = 1e-6;
    double tol_grad = 1e-8;
    int max_iters = 200;
    std::uint64_t seed = 0;
    /// Alg. 1 variant: at deflation stage i minimize only the c = i summand
    /// of R_n instead of the full measure. Off by default.
    bool deflation_single_term = false;
    /// When set, skips the init strategy and starts the local method here.
    std::optional<AngleVector> theta0;

    int resolved_lhs_points(int d) const { return lhs_points > 0 ? lhs_points : 10 * d; }
    int resolved_bo_iters(int d) const { return bo_iters > 0 ? bo_iters : 10 * d; }
    void validate(int d) const;
};

struct ICAResult {
    AngleVector theta_hat;
    Matrix W_hat;
    Matrix H;
    Vector mean;
    Matrix X_hat;
    double objective = 0.0;
    double init_objective = 0.0;
    long evaluations = 0;
    std::vector<double> trace;  // objective after each accepted step
};

/// Objective-evaluation accounting for the finite-difference local method.
struct LocalStats {
    long evaluations = 0;
    int iterations = 0;
    std::vector<double> trace;
};

/// Backtracking halvings allowed per line search; part of the evaluation
/// budget contract:
///   evaluations <= (1 + 2m) + max_iters * (2m + kLineSearchMax + 2) + 1
/// where m is the number of free coordinates (gradient 2m, line search at
/// most kLineSearchMax + 1 attempts, plus one refresh after a wrap).
inline constexpr int kLineSearchMax = 25;

/// Quasi-Newton (BFGS) descent with central finite-difference gradients,
/// step h_i = grad_step * (1 + |theta_i|). Stops when the gradient max-norm
/// falls below tol_grad, the line search stalls, or max_iters is reached.
/// When free_block is set (1-based), only the angles of that block vary.
/// The returned objective never exceeds the starting objective. Throws
/// NonFiniteObjectiveError (message includes the offending angles) when the
/// objective produces NaN or infinity.
std::pair<AngleVector, double> local_minimize(const Objective& objective, const AngleVector& theta0,
                                              const OptimizerConfig& config,
                                              std::optional<int> free_block = std::nullopt,
                                              LocalStats* stats = nullptr);

/// Deflation scheme of Alg. 1: for i = 1..d-1 minimize the measure over
/// block theta_i with the other blocks held fixed, then commit. Requires
/// measure = asym. Z must already be whitened.
ICAResult ica_deflation(const Matrix& Z, const OptimizerConfig& config);

/// Parallel scheme: one joint minimization over all p angles.
ICAResult ica_parallel(const Matrix& Z, const OptimizerConfig& config);

/// Full pipeline: whiten Y, initialize per config.init, run the configured
/// scheme, and assemble the result so that X_hat = (Y - mean) * H' * W_hat'.
ICAResult estimate_ica(const Matrix& Y, const OptimizerConfig& config);

/// The measure of Z rotated by W(theta)' (the ICA objective).
double rotated_measure(const Matrix& Z, const AngleVector& theta, const MeasureKind& kind);

}  // namespace mdmica
