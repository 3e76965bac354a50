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
#include <string>
#include <vector>

#include "mdmica/optimizer.hpp"
#include "mdmica/types.hpp"

namespace mdmica {

/// One of the 18 catalog source distributions (indexed 1..18). Every entry
/// is non-Gaussian and is standardized to mean 0, variance 1 using its
/// analytic moments.
struct SourceSpec {
    int id = 1;           // 1..18
    std::string name;     // resolved from the catalog when empty

    static SourceSpec by_id(int id);
    static SourceSpec by_name(const std::string& name);
};

struct CatalogEntry {
    int id;
    std::string name;
    double mean;      // analytic mean of the raw draw
    double variance;  // analytic variance of the raw draw
};

/// The fixed 18-entry catalog (Student-t, uniform, double exponential,
/// centered exponential, and Gaussian-mixture shapes).
const std::vector<CatalogEntry>& source_catalog();

/// n i.i.d. standardized draws from the catalog entry.
Vector sample_source(const SourceSpec& spec, int n, std::uint64_t seed);

/// Random d x d matrix with condition number in [cond_lo, cond_hi]: random
/// Gaussian matrix's SVD orientation factors recomposed with singular values
/// linearly spaced from c to 1, c uniform in [1/cond_hi, 1/cond_lo].
Matrix random_mixing(int d, double cond_lo, double cond_hi, std::uint64_t seed);

enum class ModelKind { different_distributions, different_dimensions, different_inits, misspecified };
std::string to_string(ModelKind m);

struct ModelSpec {
    ModelKind kind = ModelKind::different_distributions;
    int d = 3;
    int n = 1000;
    /// Catalog ids per component; a single id is replicated across components.
    std::vector<int> sources;

    /// Benchmark defaults: models 1/2 use one bimodal entry for all
    /// components, model 3 a fixed 4-tuple, model 4 one entry at d = 2.
    static ModelSpec standard(ModelKind kind, int d, int n);
};

struct EstimatorSpec {
    std::string label;
    OptimizerConfig config;
};

struct MeasureTriple {
    double r = 0.0;
    double s = 0.0;
    double q = 0.0;
};

struct TrialRecord {
    ModelKind model = ModelKind::different_distributions;
    std::string estimator;
    int trial = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    std::optional<double> md;
    double objective = 0.0;
    double init_objective = 0.0;
    double wall_time = 0.0;
    std::optional<MeasureTriple> measures_before;
    std::optional<MeasureTriple> measures_after;
};

/// Run `trials` independent trials of the model for every estimator. Each
/// trial draws its own sub-seed from the master seed; records are ordered by
/// (trial, estimator) regardless of scheduling, and per-trial estimation
/// failures are recorded without aborting the batch.
std::vector<TrialRecord> run_trials(const ModelSpec& model, const std::vector<EstimatorSpec>& estimators,
                                    int trials, std::uint64_t seed, int jobs = 1);

}  // namespace mdmica
