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

#include "mdmica/simgen.hpp"

#include <chrono>
#include <cmath>

#include "mdmica/metrics.hpp"
#include "mdmica/parallel.hpp"
#include "mdmica/rng.hpp"
#include "mdmica/whitening.hpp"

namespace mdmica {

namespace {

enum class Family { student_t, uniform, laplace, exponential, gaussian_mixture };

struct FullEntry {
    int id;
    std::string name;
    Family family;
    double dof = 0.0;                // student_t
    std::vector<double> w, mu, sd;   // gaussian_mixture
    double mean = 0.0;
    double variance = 1.0;
};

FullEntry mixture(int id, std::string name, std::vector<double> w, std::vector<double> mu,
                  std::vector<double> sd) {
    FullEntry e;
    e.id = id;
    e.name = std::move(name);
    e.family = Family::gaussian_mixture;
    e.w = std::move(w);
    e.mu = std::move(mu);
    e.sd = std::move(sd);
    double m = 0.0, m2 = 0.0;
    for (size_t i = 0; i < e.w.size(); ++i) {
        m += e.w[i] * e.mu[i];
        m2 += e.w[i] * (e.sd[i] * e.sd[i] + e.mu[i] * e.mu[i]);
    }
    e.mean = m;
    e.variance = m2 - m * m;
    return e;
}

const std::vector<FullEntry>& full_catalog() {
    static const std::vector<FullEntry> entries = [] {
        std::vector<FullEntry> v;
        FullEntry t3;
        t3.id = 1; t3.name = "t3"; t3.family = Family::student_t; t3.dof = 3.0;
        t3.mean = 0.0; t3.variance = 3.0;
        v.push_back(t3);
        FullEntry t5;
        t5.id = 2; t5.name = "t5"; t5.family = Family::student_t; t5.dof = 5.0;
        t5.mean = 0.0; t5.variance = 5.0 / 3.0;
        v.push_back(t5);
        FullEntry uni;
        uni.id = 3; uni.name = "uniform"; uni.family = Family::uniform;
        uni.mean = 0.0; uni.variance = 1.0 / 3.0;
        v.push_back(uni);
        FullEntry lap;
        lap.id = 4; lap.name = "double_exponential"; lap.family = Family::laplace;
        lap.mean = 0.0; lap.variance = 2.0;
        v.push_back(lap);
        FullEntry ex;
        ex.id = 5; ex.name = "exponential"; ex.family = Family::exponential;
        ex.mean = 1.0; ex.variance = 1.0;
        v.push_back(ex);
        v.push_back(mixture(6, "bimodal_wide", {0.5, 0.5}, {-2.0, 2.0}, {0.5, 0.5}));
        v.push_back(mixture(7, "bimodal_narrow", {0.5, 0.5}, {-1.0, 1.0}, {0.5, 0.5}));
        v.push_back(mixture(8, "bimodal_skew", {0.7, 0.3}, {-1.0, 1.8}, {0.5, 0.3}));
        v.push_back(mixture(9, "trimodal", {0.25, 0.5, 0.25}, {-2.5, 0.0, 2.5}, {0.5, 0.5, 0.5}));
        v.push_back(mixture(10, "trimodal_skew", {0.5, 0.3, 0.2}, {-1.5, 0.5, 2.5}, {0.4, 0.4, 0.4}));
        v.push_back(mixture(11, "spike_heavy_tail", {0.8, 0.2}, {0.0, 0.0}, {0.25, 3.0}));
        v.push_back(mixture(12, "scale_mixture", {0.5, 0.5}, {0.0, 0.0}, {1.0, 4.0}));
        v.push_back(mixture(13, "skew_mild", {0.75, 0.25}, {-0.4, 1.2}, {0.7, 1.2}));
        v.push_back(mixture(14, "skew_sharp", {0.9, 0.1}, {-0.2, 1.8}, {0.5, 1.0}));
        v.push_back(mixture(15, "bimodal_unequal", {0.6, 0.4}, {-1.0, 1.5}, {0.8, 0.4}));
        v.push_back(mixture(16, "bimodal_flat", {0.5, 0.5}, {-0.8, 0.8}, {0.6, 0.6}));
        v.push_back(mixture(17, "spike_mild", {0.95, 0.05}, {0.0, 0.0}, {0.4, 4.0}));
        v.push_back(mixture(18, "trimodal_wide", {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, {-3.0, 0.0, 3.0},
                            {0.6, 0.6, 0.6}));
        return v;
    }();
    return entries;
}

const FullEntry& entry_by_id(int id) {
    const auto& cat = full_catalog();
    if (id < 1 || id > static_cast<int>(cat.size())) {
        throw ConfigError("unknown source id " + std::to_string(id) + " (catalog has 1.." +
                          std::to_string(cat.size()) + ")");
    }
    return cat[static_cast<size_t>(id - 1)];
}

}  // namespace

SourceSpec SourceSpec::by_id(int id) {
    const auto& e = entry_by_id(id);
    return SourceSpec{e.id, e.name};
}

SourceSpec SourceSpec::by_name(const std::string& name) {
    for (const auto& e : full_catalog()) {
        if (e.name == name) return SourceSpec{e.id, e.name};
    }
    throw ConfigError("unknown source name '" + name + "'");
}

const std::vector<CatalogEntry>& source_catalog() {
    static const std::vector<CatalogEntry> pub = [] {
        std::vector<CatalogEntry> v;
        for (const auto& e : full_catalog()) v.push_back({e.id, e.name, e.mean, e.variance});
        return v;
    }();
    return pub;
}

Vector sample_source(const SourceSpec& spec, int n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("sample_source: need n >= 1");
    const FullEntry& e = !spec.name.empty() && spec.id == 0 ? entry_by_id(SourceSpec::by_name(spec.name).id)
                                                            : entry_by_id(spec.id);
    auto rng = make_rng(seed);
    Vector x(n);
    switch (e.family) {
        case Family::student_t: {
            std::student_t_distribution<double> dist(e.dof);
            for (int i = 0; i < n; ++i) x(i) = dist(rng);
            break;
        }
        case Family::uniform: {
            std::uniform_real_distribution<double> dist(-1.0, 1.0);
            for (int i = 0; i < n; ++i) x(i) = dist(rng);
            break;
        }
        case Family::laplace: {
            std::uniform_real_distribution<double> dist(0.0, 1.0);
            for (int i = 0; i < n; ++i) {
                const double u = dist(rng) - 0.5;
                x(i) = (u < 0.0 ? 1.0 : -1.0) * std::log(1.0 - 2.0 * std::abs(u));
            }
            break;
        }
        case Family::exponential: {
            std::exponential_distribution<double> dist(1.0);
            for (int i = 0; i < n; ++i) x(i) = dist(rng);
            break;
        }
        case Family::gaussian_mixture: {
            std::discrete_distribution<int> comp(e.w.begin(), e.w.end());
            std::normal_distribution<double> norm(0.0, 1.0);
            for (int i = 0; i < n; ++i) {
                const int c = comp(rng);
                x(i) = e.mu[static_cast<size_t>(c)] + e.sd[static_cast<size_t>(c)] * norm(rng);
            }
            break;
        }
    }
    // Exact standardization from the analytic moments.
    return (x.array() - e.mean) / std::sqrt(e.variance);
}

Matrix random_mixing(int d, double cond_lo, double cond_hi, std::uint64_t seed) {
    if (d < 2) throw ConfigError("random_mixing: need d >= 2");
    if (!(cond_lo >= 1.0) || !(cond_hi >= cond_lo)) {
        throw ConfigError("random_mixing: need 1 <= cond_lo <= cond_hi");
    }
    auto rng = make_rng(seed);
    std::normal_distribution<double> norm(0.0, 1.0);
    Matrix A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = norm(rng);

    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    std::uniform_real_distribution<double> cu(1.0 / cond_hi, 1.0 / cond_lo);
    const double c = cu(rng);
    Vector s(d);
    for (int i = 0; i < d; ++i) {
        s(i) = c + (1.0 - c) * static_cast<double>(i) / static_cast<double>(d - 1);
    }
    return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

std::string to_string(ModelKind m) {
    switch (m) {
        case ModelKind::different_distributions: return "different-distributions";
        case ModelKind::different_dimensions: return "different-dimensions";
        case ModelKind::different_inits: return "different-inits";
        case ModelKind::misspecified: return "misspecified";
    }
    return "?";
}

ModelSpec ModelSpec::standard(ModelKind kind, int d, int n) {
    ModelSpec spec;
    spec.kind = kind;
    spec.n = n;
    switch (kind) {
        case ModelKind::different_distributions:
        case ModelKind::different_dimensions:
            spec.d = d;
            spec.sources = {6};
            break;
        case ModelKind::different_inits:
            spec.d = d;
            spec.sources = {4, 11, 12, 18};
            break;
        case ModelKind::misspecified:
            spec.d = 2;
            spec.sources = {6};
            break;
    }
    return spec;
}

namespace {

int source_for_component(const ModelSpec& model, int j) {
    if (model.sources.empty()) throw ConfigError("ModelSpec: no sources given");
    if (model.sources.size() == 1) return model.sources[0];
    return model.sources[static_cast<size_t>(j) % model.sources.size()];
}

MeasureTriple measure_triple(const Matrix& X) {
    GroupedSample s = GroupedSample::scalar_columns(X);
    return {mdm_asym(s), mdm_sym(s), mdm_comp_star(s)};
}

}  // namespace

std::vector<TrialRecord> run_trials(const ModelSpec& model, const std::vector<EstimatorSpec>& estimators,
                                    int trials, std::uint64_t seed, int jobs) {
    if (trials < 1) throw ConfigError("run_trials: need at least one trial");
    if (estimators.empty()) throw ConfigError("run_trials: no estimators given");
    const int d = model.kind == ModelKind::misspecified ? 2 : model.d;
    if (d < 2) throw ConfigError("run_trials: need d >= 2");

    const int ne = static_cast<int>(estimators.size());
    std::vector<TrialRecord> records(static_cast<size_t>(trials) * static_cast<size_t>(ne));

    parallel_for_indexed(trials, jobs, [&](int t) {
        const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(t) + 1);

        Matrix X(model.n, d);
        for (int j = 0; j < d; ++j) {
            X.col(j) = sample_source(SourceSpec::by_id(source_for_component(model, j)), model.n,
                                     derive_seed(trial_seed, 10 + static_cast<std::uint64_t>(j)));
        }

        Matrix Y;
        Matrix M;
        if (model.kind == ModelKind::misspecified) {
            Y.resize(model.n, 2);
            Y.col(0) = X.col(0);
            Y.col(1) = X.col(1).array().square();
        } else {
            M = random_mixing(d, 1.0, 2.0, derive_seed(trial_seed, 7));
            Y = X * M.transpose();
        }

        for (int e = 0; e < ne; ++e) {
            TrialRecord& rec = records[static_cast<size_t>(t) * static_cast<size_t>(ne) + static_cast<size_t>(e)];
            rec.model = model.kind;
            rec.estimator = estimators[static_cast<size_t>(e)].label;
            rec.trial = t;
            rec.seed = derive_seed(trial_seed, 1000 + static_cast<std::uint64_t>(e));

            OptimizerConfig cfg = estimators[static_cast<size_t>(e)].config;
            cfg.seed = rec.seed;

            const auto t0 = std::chrono::steady_clock::now();
            try {
                ICAResult res = estimate_ica(Y, cfg);
                rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                rec.objective = res.objective;
                rec.init_objective = res.init_objective;
                if (model.kind == ModelKind::misspecified) {
                    Matrix Z = (Y.rowwise() - res.mean.transpose()) * res.H.transpose();
                    rec.measures_before = measure_triple(Z);
                    rec.measures_after = measure_triple(res.X_hat);
                } else {
                    const Matrix W0 = (res.H * M).inverse();
                    rec.md = md_index(res.W_hat, W0).md;
                }
                rec.ok = true;
            } catch (const std::exception& ex) {
                rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                rec.ok = false;
                rec.error = ex.what();
            }
        }
    });
    return records;
}

}  // namespace mdmica
