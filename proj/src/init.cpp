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

#include "mdmica/init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mdmica/rng.hpp"

namespace mdmica {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Upper bound of the support range for flat coordinate index `idx` at
// dimension d: 2*pi for block 1, pi otherwise.
double coord_range(int d, int idx) {
    return idx < d - 1 ? kTwoPi : M_PI;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

}  // namespace

void CandidateSet::append(AngleVector point, double value, Provenance prov) {
    points.push_back(std::move(point));
    values.push_back(value);
    provenance.push_back(prov);
}

size_t CandidateSet::best_index() const {
    if (values.empty()) throw Error("CandidateSet: empty set has no best point");
    size_t best = 0;
    for (size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[best]) best = i;
    }
    return best;
}

std::vector<AngleVector> lhs_sample(int m, int d, std::uint64_t seed) {
    if (m < 1) throw ConfigError("lhs_sample: need at least one sample");
    if (d < 2) throw ShapeError("lhs_sample: dimension must be at least 2");
    const int p = AngleVector::pair_count(d);

    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<AngleVector> out(static_cast<size_t>(m));
    for (auto& av : out) av = AngleVector::zero(d);

    std::vector<int> strata(static_cast<size_t>(m));
    for (int c = 0; c < p; ++c) {
        std::iota(strata.begin(), strata.end(), 0);
        std::shuffle(strata.begin(), strata.end(), rng);
        const double range = coord_range(d, c);
        for (int s = 0; s < m; ++s) {
            const double u = (static_cast<double>(strata[static_cast<size_t>(s)]) + unif(rng)) /
                             static_cast<double>(m);
            out[static_cast<size_t>(s)].angles(c) = u * range;
        }
    }
    return out;
}

BestCandidate best_candidate(const Objective& objective, const std::vector<AngleVector>& candidates,
                             CandidateSet::Provenance prov) {
    if (candidates.empty()) throw ConfigError("best_candidate: empty candidate list");
    BestCandidate out;
    for (const auto& c : candidates) {
        const double v = objective(c);
        if (!std::isfinite(v)) {
            ++out.set.skipped_nonfinite;
            continue;
        }
        out.set.append(c, v, prov);
    }
    if (out.set.size() == 0) {
        throw NonFiniteObjectiveError("best_candidate: objective was non-finite at every candidate");
    }
    const size_t b = out.set.best_index();
    out.point = out.set.points[b];
    out.value = out.set.values[b];
    return out;
}

std::string to_string(GPKernel k) { return k == GPKernel::exp ? "exp" : "matern52"; }

GPKernel gp_kernel_from_string(const std::string& s) {
    if (s == "exp") return GPKernel::exp;
    if (s == "matern52" || s == "matern") return GPKernel::matern52;
    throw ConfigError("unknown GP kernel '" + s + "' (expected exp or matern52)");
}

double gp_kernel_value(GPKernel kernel, double r, double length_scale, double signal_variance) {
    const double l = length_scale;
    if (kernel == GPKernel::exp) {
        return signal_variance * std::exp(-r * r / (2.0 * l * l));
    }
    const double a = std::sqrt(5.0) * r / l;
    return signal_variance * (1.0 + a + 5.0 * r * r / (3.0 * l * l)) * std::exp(-a);
}

namespace {

Matrix gram_matrix(const CandidateSet& obs, GPKernel kernel, double l, double s2) {
    const int n = static_cast<int>(obs.size());
    Matrix K(n, n);
    for (int i = 0; i < n; ++i) {
        K(i, i) = gp_kernel_value(kernel, 0.0, l, s2);
        for (int j = i + 1; j < n; ++j) {
            const double r = (obs.points[static_cast<size_t>(i)].angles -
                              obs.points[static_cast<size_t>(j)].angles)
                                 .norm();
            K(i, j) = K(j, i) = gp_kernel_value(kernel, r, l, s2);
        }
    }
    return K;
}

}  // namespace

void gp_factorize(GPModel& model) {
    const int n = static_cast<int>(model.observations.size());
    if (n < 1) throw ConfigError("gp_factorize: no observations");
    Matrix K = gram_matrix(model.observations, model.kernel, model.length_scale, model.signal_variance);
    K.diagonal().array() += model.noise_variance;
    Eigen::LLT<Matrix> llt(K);
    if (llt.info() != Eigen::Success) {
        throw IllConditionedGPError("gp_factorize: Cholesky factorization of the Gram matrix failed");
    }
    model.chol_lower = llt.matrixL();
    Vector y(n);
    for (int i = 0; i < n; ++i) y(i) = model.observations.values[static_cast<size_t>(i)] - model.prior_mean;
    model.alpha = llt.solve(y);
}

GPModel fit_gp(const CandidateSet& observations, GPKernel kernel) {
    const int n = static_cast<int>(observations.size());
    if (n < 1) throw ConfigError("fit_gp: no observations");

    Vector y(n);
    for (int i = 0; i < n; ++i) y(i) = observations.values[static_cast<size_t>(i)];
    const int d = observations.points[0].d;
    const double base = std::sqrt(static_cast<double>(AngleVector::pair_count(d))) * M_PI;

    GPModel best;
    double best_ll = -std::numeric_limits<double>::infinity();
    // Geometric grid of correlation lengths relative to the support diagonal.
    const double lo = 0.05 * base, hi = 3.0 * base;
    const int grid = 8;
    for (int g = 0; g < grid; ++g) {
        const double l = lo * std::pow(hi / lo, static_cast<double>(g) / (grid - 1));
        Matrix C = gram_matrix(observations, kernel, l, 1.0);
        C.diagonal().array() += 1e-8;
        Eigen::LLT<Matrix> llt(C);
        if (llt.info() != Eigen::Success) continue;

        const Vector ones = Vector::Ones(n);
        const Vector Ci_1 = llt.solve(ones);
        const Vector Ci_y = llt.solve(y);
        const double denom = ones.dot(Ci_1);
        const double mu = denom > 0.0 ? ones.dot(Ci_y) / denom : y.mean();
        const Vector r = y - mu * ones;
        double s2 = r.dot(llt.solve(r)) / static_cast<double>(n);
        const double floor = 1e-12 * std::max(1.0, y.squaredNorm() / n);
        if (!(s2 > floor)) s2 = floor;

        double logdet = 0.0;
        const Matrix L = llt.matrixL();
        for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(L(i, i));
        const double ll = -0.5 * (n * std::log(s2) + logdet + n + n * std::log(2.0 * M_PI));
        if (ll > best_ll) {
            best_ll = ll;
            best.kernel = kernel;
            best.length_scale = l;
            best.signal_variance = s2;
            best.noise_variance = std::max(1e-8 * s2, 1e-10);
            best.prior_mean = mu;
        }
    }
    if (!std::isfinite(best_ll)) {
        throw IllConditionedGPError("fit_gp: no length scale produced a valid factorization");
    }
    best.observations = observations;
    gp_factorize(best);
    return best;
}

std::pair<double, double> gp_posterior(const GPModel& model, const AngleVector& x) {
    const int n = static_cast<int>(model.observations.size());
    if (n < 1 || model.chol_lower.rows() != n) {
        throw ConfigError("gp_posterior: model is not factorized");
    }
    Vector k(n);
    for (int i = 0; i < n; ++i) {
        const double r = (model.observations.points[static_cast<size_t>(i)].angles - x.angles).norm();
        k(i) = gp_kernel_value(model.kernel, r, model.length_scale, model.signal_variance);
    }
    const double mean = model.prior_mean + k.dot(model.alpha);
    // var = k(x,x) - k' (K + noise I)^{-1} k via the cached Cholesky factor.
    Vector w = model.chol_lower.triangularView<Eigen::Lower>().solve(k);
    double var = gp_kernel_value(model.kernel, 0.0, model.length_scale, model.signal_variance) - w.squaredNorm();
    if (var < 0.0) var = 0.0;
    return {mean, var};
}

double expected_improvement(double mean, double var, double best) {
    const double sigma = std::sqrt(std::max(var, 0.0));
    const double delta = best - mean;
    if (sigma < 1e-12) return std::max(delta, 0.0);
    const double z = delta / sigma;
    return delta * normal_cdf(z) + sigma * normal_pdf(z);
}

CandidateSet bayes_opt(const Objective& objective, CandidateSet init_candidates, int iters, GPKernel kernel,
                       std::uint64_t seed) {
    if (init_candidates.size() == 0) throw ConfigError("bayes_opt: initial candidate set is empty");
    if (iters < 0) throw ConfigError("bayes_opt: negative iteration count");
    CandidateSet set = std::move(init_candidates);
    if (iters == 0) return set;

    const int d = set.points[0].d;
    const int p = AngleVector::pair_count(d);

    for (int t = 0; t < iters; ++t) {
        GPModel gp = fit_gp(set, kernel);
        const size_t inc = set.best_index();
        const double best_val = set.values[inc];

        std::vector<AngleVector> batch = lhs_sample(100 * p, d, derive_seed(seed, 1000 + static_cast<std::uint64_t>(t)));
        batch.push_back(set.points[inc]);

        size_t arg = 0;
        double best_ei = -1.0;
        for (size_t i = 0; i < batch.size(); ++i) {
            const auto [mu, var] = gp_posterior(gp, batch[i]);
            const double ei = expected_improvement(mu, var, best_val);
            if (ei > best_ei) {
                best_ei = ei;
                arg = i;
            }
        }
        const double v = objective(batch[arg]);
        if (!std::isfinite(v)) {
            ++set.skipped_nonfinite;
            continue;
        }
        set.append(batch[arg], v, CandidateSet::Provenance::bo);
    }
    return set;
}

}  // namespace mdmica
