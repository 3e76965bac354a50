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

#include "mdmica/optimizer.hpp"

#include <cmath>
#include <sstream>

#include "mdmica/rng.hpp"
#include "mdmica/whitening.hpp"

namespace mdmica {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kArmijo = 1e-4;

std::string format_angles(const AngleVector& theta) {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < theta.angles.size(); ++i) {
        if (i) os << ", ";
        os << theta.angles(i);
    }
    os << "]";
    return os.str();
}

double checked_eval(const Objective& objective, const AngleVector& theta, long& evals) {
    const double v = objective(theta);
    ++evals;
    if (!std::isfinite(v)) {
        throw NonFiniteObjectiveError("objective returned a non-finite value at theta = " + format_angles(theta));
    }
    return v;
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::deflation ? "deflation" : "parallel"; }

std::string to_string(InitStrategy s) {
    switch (s) {
        case InitStrategy::single: return "single";
        case InitStrategy::lhs: return "lhs";
        case InitStrategy::lhs_bo: return "lhs_bo";
    }
    return "?";
}

void OptimizerConfig::validate(int d) const {
    if (d < 2) throw ShapeError("OptimizerConfig: dimension must be at least 2");
    measure.validate();
    if (scheme == Scheme::deflation && measure.tag != MeasureTag::asym) {
        throw ConfigError("the deflation scheme is only defined for the asym measure");
    }
    if (resolved_lhs_points(d) < 1) throw ConfigError("lhs_points must be positive");
    if (resolved_bo_iters(d) < 1) throw ConfigError("bo_iters must be positive");
    if (!(grad_step > 0.0)) throw ConfigError("grad_step must be positive");
    if (!(tol_grad > 0.0)) throw ConfigError("tol_grad must be positive");
    if (max_iters < 1) throw ConfigError("max_iters must be positive");
    if (theta0 && (theta0->d != d || theta0->angles.size() != AngleVector::pair_count(d))) {
        throw ShapeError("OptimizerConfig: explicit theta0 has the wrong dimension");
    }
}

double rotated_measure(const Matrix& Z, const AngleVector& theta, const MeasureKind& kind) {
    const Matrix W = rotation_from_angles(theta);
    return evaluate_measure(GroupedSample::scalar_columns(Z * W.transpose()), kind);
}

std::pair<AngleVector, double> local_minimize(const Objective& objective, const AngleVector& theta0,
                                              const OptimizerConfig& config, std::optional<int> free_block,
                                              LocalStats* stats) {
    const int p = static_cast<int>(theta0.angles.size());
    int lo = 0, m = p;
    if (free_block) {
        lo = theta0.block_offset(*free_block);
        m = theta0.block_size(*free_block);
    }

    AngleVector current = theta0;
    long evals = 0;
    LocalStats local;

    auto eval_at = [&](const Vector& x) {
        current.angles.segment(lo, m) = x;
        return checked_eval(objective, current, evals);
    };

    auto gradient = [&](const Vector& x, Vector& g) {
        Vector xt = x;
        for (int i = 0; i < m; ++i) {
            const double h = config.grad_step * (1.0 + std::abs(x(i)));
            xt(i) = x(i) + h;
            const double fp = eval_at(xt);
            xt(i) = x(i) - h;
            const double fm = eval_at(xt);
            xt(i) = x(i);
            g(i) = (fp - fm) / (2.0 * h);
        }
    };

    Vector x = theta0.angles.segment(lo, m);
    double f = eval_at(x);
    const double f_start = f;
    local.trace.push_back(f);

    Vector g(m), g_new(m);
    gradient(x, g);

    Matrix H = Matrix::Identity(m, m);
    Vector dir(m), x_new(m), s(m), y(m);

    // Secondary stops in the style of Newton-type library routines: a step
    // below steptol or two consecutive negligible decreases.
    constexpr double kStepTol = 1e-10;
    constexpr double kDecreaseTol = 1e-14;
    int stagnant = 0;

    for (int iter = 0; iter < config.max_iters; ++iter) {
        if (g.cwiseAbs().maxCoeff() < config.tol_grad) break;

        dir = -(H * g);
        double slope = dir.dot(g);
        if (!(slope < 0.0)) {
            H.setIdentity();
            dir = -g;
            slope = dir.dot(g);
        }

        // Backtracking Armijo line search.
        double step = 1.0;
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls <= kLineSearchMax; ++ls) {
            x_new = x + step * dir;
            f_new = eval_at(x_new);
            if (f_new <= f + kArmijo * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        local.iterations = iter + 1;
        s = x_new - x;
        const double decrease = f - f_new;
        if (s.cwiseAbs().maxCoeff() < kStepTol * (1.0 + x.cwiseAbs().maxCoeff())) {
            x = x_new;
            f = f_new;
            local.trace.push_back(f);
            break;
        }
        if (decrease <= kDecreaseTol * (std::abs(f) + 1e-30)) {
            if (++stagnant >= 2) {
                x = x_new;
                f = f_new;
                local.trace.push_back(f);
                break;
            }
        } else {
            stagnant = 0;
        }
        gradient(x_new, g_new);
        y = g_new - g;

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            // BFGS inverse-Hessian update.
            const double rho = 1.0 / sy;
            const Matrix I = Matrix::Identity(m, m);
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
                rho * s * s.transpose();
        }

        x = x_new;
        f = f_new;
        g = g_new;

        // The measure objectives are exactly 2*pi-periodic per angle; pull
        // far-wandering coordinates back and refresh the objective value.
        bool wrapped = false;
        for (int i = 0; i < m; ++i) {
            if (std::abs(x(i)) > 4.0 * kTwoPi) {
                x(i) = std::fmod(x(i), kTwoPi);
                if (x(i) < 0.0) x(i) += kTwoPi;
                wrapped = true;
            }
        }
        if (wrapped) f = eval_at(x);
        local.trace.push_back(f);
    }

    // Reduce coordinates into [0, 2*pi) (an exact identity for the periodic
    // measure objectives; a no-op for minimizers already inside the range).
    bool final_wrap = false;
    for (int i = 0; i < m; ++i) {
        if (x(i) < 0.0 || x(i) >= kTwoPi) {
            x(i) = std::fmod(x(i), kTwoPi);
            if (x(i) < 0.0) x(i) += kTwoPi;
            final_wrap = true;
        }
    }
    if (final_wrap) f = eval_at(x);

    current.angles.segment(lo, m) = x;
    if (f > f_start) {
        // Descent guarantee: never return a point above the start.
        current = theta0;
        f = f_start;
    }

    local.evaluations = evals;
    if (stats) {
        stats->evaluations += local.evaluations;
        stats->iterations += local.iterations;
        stats->trace.insert(stats->trace.end(), local.trace.begin(), local.trace.end());
    }
    return {current, f};
}

namespace {

struct InitOutcome {
    AngleVector theta0;
    double objective = 0.0;
    long evaluations = 0;
};

InitOutcome initialize(const Objective& objective, int d, const OptimizerConfig& config) {
    InitOutcome out;
    if (config.theta0) {
        out.theta0 = *config.theta0;
        out.objective = objective(out.theta0);
        out.evaluations = 1;
        if (!std::isfinite(out.objective)) {
            throw NonFiniteObjectiveError("objective is non-finite at the supplied initial point");
        }
        return out;
    }

    const int m = config.init == InitStrategy::single ? 1 : config.resolved_lhs_points(d);
    auto points = lhs_sample(m, d, derive_seed(config.seed, 1));
    BestCandidate best = best_candidate(objective, points);
    long evals = static_cast<long>(best.set.size()) + best.set.skipped_nonfinite;

    if (config.init == InitStrategy::lhs_bo) {
        CandidateSet with_bo = bayes_opt(objective, std::move(best.set), config.resolved_bo_iters(d),
                                         config.bo_kernel, derive_seed(config.seed, 2));
        evals = static_cast<long>(with_bo.size()) + with_bo.skipped_nonfinite;
        const size_t b = with_bo.best_index();
        best.point = with_bo.points[b];
        best.value = with_bo.values[b];
    }

    out.theta0 = best.point;
    out.objective = best.value;
    out.evaluations = evals;
    return out;
}

// Final assembly shared by both schemes: bring theta into the support
// without changing W (mod-pi wrapping of individual angles would change
// W(theta), so out-of-support angles are canonicalized through the exact
// inverse mapping instead), re-evaluate, and enforce monotone improvement
// against the initialization.
ICAResult assemble(const Matrix& Z, const OptimizerConfig& config, const AngleVector& theta_raw,
                   const InitOutcome& init, long local_evals, std::vector<double> trace) {
    const int d = static_cast<int>(Z.cols());
    ICAResult res;
    res.trace = std::move(trace);
    res.evaluations = init.evaluations + local_evals;
    res.init_objective = init.objective;

    AngleVector theta = theta_raw;
    if (!theta.in_support()) {
        theta = angles_from_rotation(rotation_from_angles(theta_raw));
    }
    Matrix W = rotation_from_angles(theta);
    double obj = evaluate_measure(GroupedSample::scalar_columns(Z * W.transpose()), config.measure);
    ++res.evaluations;

    if (obj > init.objective) {
        theta = init.theta0;
        if (!theta.in_support()) {
            theta = angles_from_rotation(rotation_from_angles(theta));
        }
        W = rotation_from_angles(theta);
        obj = evaluate_measure(GroupedSample::scalar_columns(Z * W.transpose()), config.measure);
        ++res.evaluations;
    }

    res.theta_hat = theta;
    res.W_hat = W;
    res.X_hat = Z * W.transpose();
    res.objective = obj;
    res.H = Matrix::Identity(d, d);
    res.mean = Vector::Zero(d);
    return res;
}

}  // namespace

ICAResult ica_parallel(const Matrix& Z, const OptimizerConfig& config) {
    const int d = static_cast<int>(Z.cols());
    config.validate(d);
    if (config.scheme != Scheme::parallel) {
        throw ConfigError("ica_parallel: config.scheme must be parallel");
    }

    Objective objective = [&](const AngleVector& th) { return rotated_measure(Z, th, config.measure); };
    InitOutcome init = initialize(objective, d, config);

    LocalStats stats;
    auto [theta, value] = local_minimize(objective, init.theta0, config, std::nullopt, &stats);
    (void)value;
    return assemble(Z, config, theta, init, stats.evaluations, std::move(stats.trace));
}

ICAResult ica_deflation(const Matrix& Z, const OptimizerConfig& config) {
    const int d = static_cast<int>(Z.cols());
    config.validate(d);
    if (config.scheme != Scheme::deflation) {
        throw ConfigError("ica_deflation: config.scheme must be deflation");
    }

    Objective objective = [&](const AngleVector& th) { return rotated_measure(Z, th, config.measure); };
    InitOutcome init = initialize(objective, d, config);

    LocalStats stats;
    AngleVector theta = init.theta0;
    for (int i = 1; i <= d - 1; ++i) {
        if (config.deflation_single_term) {
            // Stage objective restricted to the c = i summand of R_n:
            // V_n^2((X_i, X_{i+})) of the rotated sample.
            const int stage = i;
            Objective stage_obj = [&Z, stage, d](const AngleVector& th) {
                const Matrix X = Z * rotation_from_angles(th).transpose();
                Matrix tail = X.block(0, stage - 1, X.rows(), d - stage + 1);
                return dcov_sq(GroupedSample(std::move(tail), {1, d - stage}));
            };
            auto [next, value] = local_minimize(stage_obj, theta, config, i, &stats);
            (void)value;
            theta = next;
        } else {
            auto [next, value] = local_minimize(objective, theta, config, i, &stats);
            (void)value;
            theta = next;
        }
    }
    return assemble(Z, config, theta, init, stats.evaluations, std::move(stats.trace));
}

ICAResult estimate_ica(const Matrix& Y, const OptimizerConfig& config) {
    WhiteningResult wh = whiten(Y);
    ICAResult res = config.scheme == Scheme::deflation ? ica_deflation(wh.Z, config)
                                                       : ica_parallel(wh.Z, config);
    res.H = wh.H;
    res.mean = wh.mean;
    return res;
}

}  // namespace mdmica
