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
#include <functional>
#include <utility>
#include <vector>

#include "mdmica/rotation.hpp"
#include "mdmica/types.hpp"

namespace mdmica {

using Objective = std::function<double(const AngleVector&)>;

/// Evaluated initialization candidates with per-point provenance.
struct CandidateSet {
    enum class Provenance { lhs, bo };

    std::vector<AngleVector> points;
    std::vector<double> values;
    std::vector<Provenance> provenance;
    int skipped_nonfinite = 0;

    size_t size() const { return points.size(); }
    void append(AngleVector point, double value, Provenance prov);
    /// Index of the smallest value (lowest index on ties). Requires nonempty.
    size_t best_index() const;
};

/// Latin hypercube sample of m angle vectors over the support: each of the
/// p coordinates is split into m equal strata, every stratum receives
/// exactly one point (uniform within the stratum), with an independent
/// stratum permutation per coordinate.
std::vector<AngleVector> lhs_sample(int m, int d, std::uint64_t seed);

/// Evaluate the objective at every candidate and return the argmin together
/// with the evaluated set. Non-finite evaluations are skipped and counted;
/// all-non-finite throws NonFiniteObjectiveError.
struct BestCandidate {
    AngleVector point;
    double value = 0.0;
    CandidateSet set;
};
BestCandidate best_candidate(const Objective& objective, const std::vector<AngleVector>& candidates,
                             CandidateSet::Provenance prov = CandidateSet::Provenance::lhs);

enum class GPKernel { exp, matern52 };
std::string to_string(GPKernel k);
GPKernel gp_kernel_from_string(const std::string& s);

/// Gaussian-process surrogate over angle space.
struct GPModel {
    GPKernel kernel = GPKernel::exp;
    double length_scale = 1.0;
    double signal_variance = 1.0;
    double noise_variance = 1e-10;
    double prior_mean = 0.0;
    CandidateSet observations;

    // Cached factorization of K + noise*I and K^{-1}(y - prior_mean).
    Matrix chol_lower;
    Vector alpha;
};

/// Kernel value at distance r: exp -> s2*exp(-r^2/(2 l^2));
/// matern52 -> s2*(1 + sqrt5 r/l + 5 r^2/(3 l^2))*exp(-sqrt5 r/l).
double gp_kernel_value(GPKernel kernel, double r, double length_scale, double signal_variance);

/// Build the Gram matrix, factorize, and cache the solve. Hyperparameters
/// are taken from the model fields. Throws IllConditionedGPError when the
/// Cholesky factorization fails.
void gp_factorize(GPModel& model);

/// Fit length scale, signal variance, and prior mean by maximizing the
/// marginal likelihood over a small geometric grid of length scales
/// (closed-form prior mean and signal variance per grid point); the noise
/// floor is 1e-8 * signal variance (at least 1e-10).
GPModel fit_gp(const CandidateSet& observations, GPKernel kernel);

/// Posterior mean and variance at x (variance clamped at 0).
std::pair<double, double> gp_posterior(const GPModel& model, const AngleVector& x);

/// Expected improvement for minimization at a point with posterior
/// (mean, var), relative to the incumbent best value.
double expected_improvement(double mean, double var, double best);

/// Run `iters` Bayesian-optimization steps from the evaluated initial set:
/// refit the GP, maximize expected improvement over a fresh LHS batch of
/// 100*p points plus the incumbent, evaluate the objective there, append.
/// Returns the union set.
CandidateSet bayes_opt(const Objective& objective, CandidateSet init_candidates, int iters, GPKernel kernel,
                       std::uint64_t seed);

}  // namespace mdmica
