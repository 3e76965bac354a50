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

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace mdmica {

/// Samples are stored rows-as-observations, columns-as-components.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched dimensions or malformed inputs.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Givens plane indices out of range (requires 1 <= i < j <= d).
class InvalidIndexError : public Error {
public:
    using Error::Error;
};

/// Input matrix is not orthogonal with determinant +1.
class InvalidRotationError : public Error {
public:
    using Error::Error;
};

/// Sample covariance too close to singular to whiten.
class SingularCovarianceError : public Error {
public:
    using Error::Error;
};

/// Fewer observations than the statistic requires.
class InsufficientSampleError : public Error {
public:
    using Error::Error;
};

/// Median-heuristic kernel bandwidth undefined for a component.
class DegenerateBandwidthError : public Error {
public:
    using Error::Error;
};

/// Objective produced NaN or infinity during optimization.
class NonFiniteObjectiveError : public Error {
public:
    using Error::Error;
};

/// Gaussian-process Gram matrix could not be factorized.
class IllConditionedGPError : public Error {
public:
    using Error::Error;
};

/// Unknown catalog entry, estimator label, or invalid configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace mdmica
