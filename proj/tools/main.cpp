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

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mdmica/csv.hpp"
#include "mdmica/measures.hpp"
#include "mdmica/metrics.hpp"
#include "mdmica/optimizer.hpp"
#include "mdmica/simgen.hpp"
#include "mdmica/types.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mdmica;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 1 internal error, 2 usage/input error,
// 3 estimation failure.
enum ExitCode { kOk = 0, kInternal = 1, kUsage = 2, kEstimation = 3 };

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::uint64_t env_default_seed() {
    const char* s = std::getenv("MDMICA_SEED");
    if (!s || !*s) return 0;
    return std::strtoull(s, nullptr, 10);
}

std::vector<double> parse_bandwidths(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse bandwidth '" + tok + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty bandwidth list");
    return out;
}

json manifest_json(const std::string& command, const std::vector<std::string>& argv_resolved,
                   std::uint64_t seed, const json& config, const std::vector<std::string>& inputs,
                   const std::vector<std::string>& outputs, double wall_time) {
    json m;
    m["type"] = "manifest";
    m["version"] = kVersion;
    m["command"] = command;
    m["argv"] = argv_resolved;
    m["seed"] = seed;
    m["config"] = config;
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    m["wall_time_s"] = wall_time;
    return m;
}

struct IcaOptions {
    std::string input;
    std::string measure = "sym";
    std::string scheme = "par";
    std::string init = "lhs";
    int lhs_points = 0;
    int bo_iters = 0;
    std::string kernel = "exp";
    int max_iters = 200;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_dir;
    std::string bandwidth;
};

OptimizerConfig config_from_options(const IcaOptions& o) {
    OptimizerConfig cfg;
    cfg.measure.tag = measure_tag_from_string(o.measure);
    if (!o.bandwidth.empty()) {
        if (cfg.measure.tag != MeasureTag::hsic) {
            throw ConfigError("--bandwidth is only meaningful with --measure hsic");
        }
        cfg.measure.bandwidths = parse_bandwidths(o.bandwidth);
        cfg.measure.validate();
    }
    if (o.scheme == "def") {
        cfg.scheme = Scheme::deflation;
    } else if (o.scheme == "par") {
        cfg.scheme = Scheme::parallel;
    } else {
        throw ConfigError("unknown scheme '" + o.scheme + "' (expected def or par)");
    }
    if (o.init == "single") {
        cfg.init = InitStrategy::single;
    } else if (o.init == "lhs") {
        cfg.init = InitStrategy::lhs;
    } else if (o.init == "lhs+bo" || o.init == "lhs_bo") {
        cfg.init = InitStrategy::lhs_bo;
    } else {
        throw ConfigError("unknown init '" + o.init + "' (expected single, lhs, or lhs+bo)");
    }
    cfg.lhs_points = o.lhs_points;
    cfg.bo_iters = o.bo_iters;
    cfg.bo_kernel = gp_kernel_from_string(o.kernel);
    cfg.max_iters = o.max_iters;
    cfg.seed = o.seed;
    return cfg;
}

json config_json(const OptimizerConfig& cfg, int d) {
    json j;
    j["measure"] = to_string(cfg.measure.tag);
    if (!cfg.measure.bandwidths.empty()) j["bandwidths"] = cfg.measure.bandwidths;
    j["scheme"] = to_string(cfg.scheme);
    j["init"] = to_string(cfg.init);
    j["lhs_points"] = cfg.resolved_lhs_points(d);
    j["bo_iters"] = cfg.resolved_bo_iters(d);
    j["bo_kernel"] = to_string(cfg.bo_kernel);
    j["grad_step"] = cfg.grad_step;
    j["tol_grad"] = cfg.tol_grad;
    j["max_iters"] = cfg.max_iters;
    j["seed"] = cfg.seed;
    return j;
}

int run_cli(const std::vector<std::string>& args);

// ---------------------------------------------------------------- measure

int cmd_measure(const IcaOptions& o) {
    Timer timer;
    CsvMatrix in = read_csv_matrix(o.input);
    if (in.values.cols() < 2) throw ConfigError("measure: input must have at least 2 columns");
    if (in.values.rows() < 2) throw ConfigError("measure: input must have at least 2 rows");

    MeasureKind kind;
    kind.tag = measure_tag_from_string(o.measure);
    if (!o.bandwidth.empty()) {
        kind.bandwidths = parse_bandwidths(o.bandwidth);
        kind.validate();
    }
    const double value = evaluate_measure(GroupedSample::scalar_columns(in.values), kind);

    std::printf("%.12g\n", value);

    std::vector<std::string> argv_resolved{"measure", o.input, "--measure", o.measure, "--seed",
                                           std::to_string(o.seed)};
    if (!o.bandwidth.empty()) {
        argv_resolved.push_back("--bandwidth");
        argv_resolved.push_back(o.bandwidth);
    }
    json cfg;
    cfg["measure"] = o.measure;
    if (!o.bandwidth.empty()) cfg["bandwidths"] = kind.bandwidths;
    std::cout << manifest_json("measure", argv_resolved, o.seed, cfg, {o.input}, {}, timer.seconds()).dump()
              << "\n";
    return kOk;
}

// -------------------------------------------------------------------- ica

int cmd_ica(const IcaOptions& o) {
    Timer timer;
    CsvMatrix in = read_csv_matrix(o.input);
    const int d = static_cast<int>(in.values.cols());
    if (d < 2) throw ConfigError("ica: input must have at least 2 columns");

    OptimizerConfig cfg = config_from_options(o);
    cfg.validate(d);

    fs::create_directories(o.out_dir);
    ICAResult res = estimate_ica(in.values, cfg);
    const double wall = timer.seconds();

    const fs::path dir(o.out_dir);
    write_csv_matrix((dir / "X_hat.csv").string(), res.X_hat);
    write_csv_matrix((dir / "W_hat.csv").string(), res.W_hat);
    write_csv_matrix((dir / "H.csv").string(), res.H);
    write_csv_matrix((dir / "mean.csv").string(), res.mean.transpose());

    std::vector<std::string> argv_resolved{"ica",
                                           o.input,
                                           "--measure",
                                           o.measure,
                                           "--scheme",
                                           o.scheme,
                                           "--init",
                                           o.init,
                                           "--lhs-points",
                                           std::to_string(cfg.resolved_lhs_points(d)),
                                           "--bo-iters",
                                           std::to_string(cfg.resolved_bo_iters(d)),
                                           "--kernel",
                                           o.kernel,
                                           "--max-iters",
                                           std::to_string(cfg.max_iters),
                                           "--seed",
                                           std::to_string(cfg.seed),
                                           "--out-dir",
                                           o.out_dir};
    if (!o.bandwidth.empty()) {
        argv_resolved.push_back("--bandwidth");
        argv_resolved.push_back(o.bandwidth);
    }

    json result;
    result["type"] = "result";
    result["objective"] = res.objective;
    result["init_objective"] = res.init_objective;
    result["evaluations"] = res.evaluations;
    result["wall_time_s"] = wall;
    result["theta_hat"] = std::vector<double>(res.theta_hat.angles.data(),
                                              res.theta_hat.angles.data() + res.theta_hat.angles.size());

    const std::vector<std::string> outputs{(dir / "X_hat.csv").string(), (dir / "W_hat.csv").string(),
                                           (dir / "H.csv").string(), (dir / "mean.csv").string(),
                                           (dir / "result.jsonl").string()};
    json man = manifest_json("ica", argv_resolved, cfg.seed, config_json(cfg, d), {o.input}, outputs, wall);

    std::ofstream jl(dir / "result.jsonl");
    jl << man.dump() << "\n" << result.dump() << "\n";
    std::cout << result.dump() << "\n";
    return kOk;
}

// -------------------------------------------------------------- benchmark

const std::vector<std::string>& estimator_labels() {
    static const std::vector<std::string> labels{"asym-def", "asym-par", "sym", "comp", "hsic"};
    return labels;
}

EstimatorSpec estimator_from_label(const std::string& label, const IcaOptions& shared) {
    EstimatorSpec est;
    est.label = label;
    IcaOptions o = shared;
    if (label == "asym-def") {
        o.measure = "asym";
        o.scheme = "def";
    } else if (label == "asym-par") {
        o.measure = "asym";
        o.scheme = "par";
    } else if (label == "sym" || label == "comp" || label == "hsic") {
        o.measure = label;
        o.scheme = "par";
    } else {
        std::string valid;
        for (const auto& l : estimator_labels()) valid += (valid.empty() ? "" : ", ") + l;
        throw ConfigError("unknown estimator label '" + label + "' (valid: " + valid + ")");
    }
    est.config = config_from_options(o);
    return est;
}

std::string csv_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

int cmd_benchmark(const IcaOptions& shared, int model_id, const std::string& estimators_csv, int trials,
                  int d, int n, int jobs, const std::string& out_path) {
    Timer timer;
    ModelKind kind;
    switch (model_id) {
        case 1: kind = ModelKind::different_distributions; break;
        case 2: kind = ModelKind::different_dimensions; break;
        case 3: kind = ModelKind::different_inits; break;
        case 4: kind = ModelKind::misspecified; break;
        default: throw ConfigError("unknown model " + std::to_string(model_id) + " (expected 1..4)");
    }
    ModelSpec model = ModelSpec::standard(kind, d, n);

    std::vector<EstimatorSpec> ests;
    std::stringstream ss(estimators_csv);
    std::string label;
    while (std::getline(ss, label, ',')) {
        if (!label.empty()) ests.push_back(estimator_from_label(label, shared));
    }
    if (ests.empty()) throw ConfigError("no estimators given");

    auto records = run_trials(model, ests, trials, shared.seed, jobs);

    std::ofstream out(out_path);
    if (!out) throw Error("cannot write '" + out_path + "'");
    out << "model,estimator,trial,seed,ok,error,md,objective,init_objective,wall_time,"
           "r_before,s_before,q_before,r_after,s_after,q_after\n";
    auto triple = [](const std::optional<MeasureTriple>& t, int which) -> std::optional<double> {
        if (!t) return std::nullopt;
        return which == 0 ? t->r : which == 1 ? t->s : t->q;
    };
    for (const auto& r : records) {
        out << to_string(r.model) << ',' << r.estimator << ',' << r.trial << ',' << r.seed << ','
            << (r.ok ? 1 : 0) << ',' << r.error << ',' << csv_field(r.md) << ',' << format_double(r.objective)
            << ',' << format_double(r.init_objective) << ',' << format_double(r.wall_time);
        for (int which = 0; which < 3; ++which) out << ',' << csv_field(triple(r.measures_before, which));
        for (int which = 0; which < 3; ++which) out << ',' << csv_field(triple(r.measures_after, which));
        out << '\n';
    }
    // Aggregate rows (mean, stderr of md and objective over successful trials).
    for (const auto& est : ests) {
        std::vector<double> mds, objs;
        for (const auto& r : records) {
            if (r.estimator != est.label || !r.ok) continue;
            if (r.md) mds.push_back(*r.md);
            objs.push_back(r.objective);
        }
        auto mean_of = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return v.empty() ? 0.0 : s / static_cast<double>(v.size());
        };
        auto stderr_of = [&](const std::vector<double>& v) {
            if (v.size() < 2) return 0.0;
            const double m = mean_of(v);
            double ss = 0.0;
            for (double x : v) ss += (x - m) * (x - m);
            return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
        };
        out << to_string(model.kind) << ',' << est.label << ",mean,,,,"
            << (mds.empty() ? std::string() : format_double(mean_of(mds))) << ','
            << format_double(mean_of(objs)) << ",,,,,,,,\n";
        out << to_string(model.kind) << ',' << est.label << ",stderr,,,,"
            << (mds.empty() ? std::string() : format_double(stderr_of(mds))) << ','
            << format_double(stderr_of(objs)) << ",,,,,,,,\n";
    }
    out.close();

    std::vector<std::string> argv_resolved{"benchmark",
                                           "--model",
                                           std::to_string(model_id),
                                           "--estimators",
                                           estimators_csv,
                                           "--trials",
                                           std::to_string(trials),
                                           "--d",
                                           std::to_string(model.d),
                                           "--n",
                                           std::to_string(model.n),
                                           "--init",
                                           shared.init,
                                           "--lhs-points",
                                           std::to_string(shared.lhs_points),
                                           "--bo-iters",
                                           std::to_string(shared.bo_iters),
                                           "--kernel",
                                           shared.kernel,
                                           "--max-iters",
                                           std::to_string(shared.max_iters),
                                           "--seed",
                                           std::to_string(shared.seed),
                                           "--jobs",
                                           std::to_string(jobs),
                                           "--out",
                                           out_path};
    json cfg;
    cfg["model"] = model_id;
    cfg["estimators"] = estimators_csv;
    cfg["trials"] = trials;
    cfg["d"] = model.d;
    cfg["n"] = model.n;
    cfg["jobs"] = jobs;
    cfg["init"] = shared.init;
    json man = manifest_json("benchmark", argv_resolved, shared.seed, cfg, {}, {out_path}, timer.seconds());
    std::ofstream mf(out_path + ".manifest.json");
    mf << man.dump() << "\n";
    std::cout << man.dump() << "\n";
    return kOk;
}

// --------------------------------------------------------------------- md

int cmd_md(const std::string& west_path, const std::string& w0_path, std::uint64_t seed) {
    Timer timer;
    CsvMatrix west = read_csv_matrix(west_path);
    CsvMatrix w0 = read_csv_matrix(w0_path);
    if (west.values.rows() != w0.values.rows() || west.values.cols() != w0.values.cols() ||
        west.values.rows() != west.values.cols()) {
        throw ShapeError("md: expected two square matrices of equal size");
    }
    MDReport rep = md_index(west.values, w0.values);

    std::cout << format_double(rep.md) << "\n";
    std::cout << "permutation:";
    for (int t : rep.permutation) std::cout << ' ' << (t + 1);
    std::cout << "\nscalings:";
    for (int i = 0; i < rep.scalings.size(); ++i) std::cout << ' ' << format_double(rep.scalings(i));
    std::cout << "\n";

    std::vector<std::string> argv_resolved{"md", west_path, w0_path};
    std::cout << manifest_json("md", argv_resolved, seed, json::object(), {west_path, w0_path}, {},
                               timer.seconds())
                     .dump()
              << "\n";
    return kOk;
}

// ----------------------------------------------------------------- replay

int cmd_replay(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw Error("cannot open '" + manifest_path + "'");
    json man;
    try {
        in >> man;
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse manifest: " + std::string(e.what()));
    }
    if (!man.contains("argv") || !man["argv"].is_array()) {
        throw ConfigError("manifest has no argv array");
    }
    std::vector<std::string> args;
    for (const auto& a : man["argv"]) args.push_back(a.get<std::string>());
    return run_cli(args);
}

// ------------------------------------------------------------------ main

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"mdmica: independent component analysis by minimizing mutual dependence measures"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    IcaOptions o;
    o.seed = env_default_seed();

    // measure
    auto* measure = app.add_subcommand("measure", "compute a dependence measure of a CSV sample");
    measure->add_option("input", o.input, "n x d CSV matrix")->required();
    measure->add_option("--measure", o.measure, "asym|sym|comp|hsic")->capture_default_str();
    measure->add_option("--bandwidth", o.bandwidth, "comma-separated hsic bandwidths");
    measure->add_option("--seed", o.seed, "random seed")->capture_default_str();

    // ica
    auto* ica = app.add_subcommand("ica", "estimate independent components of a CSV sample");
    ica->add_option("input", o.input, "n x d CSV matrix")->required();
    ica->add_option("--measure", o.measure, "asym|sym|comp|hsic")->capture_default_str();
    ica->add_option("--scheme", o.scheme, "def|par")->capture_default_str();
    ica->add_option("--init", o.init, "single|lhs|lhs+bo")->capture_default_str();
    ica->add_option("--lhs-points", o.lhs_points, "LHS candidates (0 = 10*d)")->capture_default_str();
    ica->add_option("--bo-iters", o.bo_iters, "BO iterations (0 = 10*d)")->capture_default_str();
    ica->add_option("--kernel", o.kernel, "exp|matern52")->capture_default_str();
    ica->add_option("--max-iters", o.max_iters, "local optimizer iteration cap")->capture_default_str();
    ica->add_option("--bandwidth", o.bandwidth, "comma-separated hsic bandwidths");
    ica->add_option("--seed", o.seed, "random seed")->capture_default_str();
    ica->add_option("--out-dir", o.out_dir, "output directory")->required();

    // benchmark
    int model_id = 1, trials = 10, bd = 3, bn = 1000, jobs = 1;
    std::string estimators = "sym";
    std::string out_path;
    auto* bench = app.add_subcommand("benchmark", "run simulation trials and write a results table");
    bench->add_option("--model", model_id, "1..4")->capture_default_str();
    bench->add_option("--estimators", estimators, "comma-separated labels (asym-def, asym-par, sym, comp, hsic)")
        ->capture_default_str();
    bench->add_option("--trials", trials, "trials per estimator")->capture_default_str();
    bench->add_option("--d", bd, "dimension")->capture_default_str();
    bench->add_option("--n", bn, "sample size")->capture_default_str();
    bench->add_option("--jobs", jobs, "worker threads (1 keeps runs bitwise reproducible)")
        ->capture_default_str();
    bench->add_option("--init", o.init, "single|lhs|lhs+bo")->capture_default_str();
    bench->add_option("--lhs-points", o.lhs_points, "LHS candidates (0 = 10*d)")->capture_default_str();
    bench->add_option("--bo-iters", o.bo_iters, "BO iterations (0 = 10*d)")->capture_default_str();
    bench->add_option("--kernel", o.kernel, "exp|matern52")->capture_default_str();
    bench->add_option("--max-iters", o.max_iters, "local optimizer iteration cap")->capture_default_str();
    bench->add_option("--seed", o.seed, "master seed")->capture_default_str();
    bench->add_option("--out", out_path, "output CSV table")->required();

    // md
    std::string west_path, w0_path;
    auto* md = app.add_subcommand("md", "minimum-distance index between two unmixing matrices");
    md->add_option("west", west_path, "estimated d x d matrix CSV")->required();
    md->add_option("w0", w0_path, "ground-truth d x d matrix CSV")->required();
    md->add_option("--seed", o.seed, "recorded in the manifest")->capture_default_str();

    // replay
    std::string manifest_path;
    auto* replay = app.add_subcommand("replay", "re-run a command from its manifest");
    replay->add_option("manifest", manifest_path, "manifest JSON file")->required();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (measure->parsed()) return cmd_measure(o);
        if (ica->parsed()) return cmd_ica(o);
        if (bench->parsed()) return cmd_benchmark(o, model_id, estimators, trials, bd, bn, jobs, out_path);
        if (md->parsed()) return cmd_md(west_path, w0_path, o.seed);
        if (replay->parsed()) return cmd_replay(manifest_path);
    } catch (const CsvParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidIndexError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DegenerateBandwidthError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InsufficientSampleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const SingularCovarianceError& e) {
        std::cerr << "estimation failure: " << e.what() << "\n";
        return kEstimation;
    } catch (const NonFiniteObjectiveError& e) {
        std::cerr << "estimation failure: " << e.what() << "\n";
        return kEstimation;
    } catch (const IllConditionedGPError& e) {
        std::cerr << "estimation failure: " << e.what() << "\n";
        return kEstimation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<size_t>(argc));
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}
