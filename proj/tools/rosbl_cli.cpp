/*
 * Copyright 2026 The rosbl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// rosbl: command-line front end.
//
//   rosbl solve A.csv Y.csv blocks.json [solver.json] --out DIR
//   rosbl bench spec.json --out DIR [--jobs N] [--seed U64]
//   rosbl classify dict.csv labels.txt tests.csv --group-size L [--solver solver.json] [--truth truth.txt] --out DIR
//   rosbl gen synth.json --out DIR [--seed U64]
//
// Exit codes: 0 success, 1 input error, 2 solve stopped at max_iters,
// 3 bench with more than 10% failed runs.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rosbl/bench.hpp"
#include "rosbl/classify.hpp"
#include "rosbl/config.hpp"
#include "rosbl/csv.hpp"
#include "rosbl/solver.hpp"
#include "rosbl/synth.hpp"

namespace fs = std::filesystem;
using namespace rosbl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitBenchFailures = 3;

struct Options {
    fs::path out;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

void require_files(const std::vector<fs::path>& paths) {
    for (const auto& p : paths) {
        if (!fs::is_regular_file(p)) throw ParseError("input file not found: " + p.string());
    }
}

void prepare_outdir(const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw ParseError("cannot create output directory " + out.string());
}

std::vector<std::string> read_labels(const fs::path& path) {
    const std::string text = read_text_file(path);
    std::vector<std::string> labels;
    std::size_t pos = 0;
    std::size_t line = 0;
    std::size_t pending_blank = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string label = text.substr(pos, end - pos);
        pos = end + 1;
        ++line;
        while (!label.empty() && (label.back() == '\r' || label.back() == ' ' || label.back() == '\t')) label.pop_back();
        const auto first = label.find_first_not_of(" \t");
        label = first == std::string::npos ? std::string() : label.substr(first);
        if (label.empty()) {
            ++pending_blank;
            continue;
        }
        if (pending_blank && !labels.empty()) {
            throw ParseError(path.string() + ": blank label before line " + std::to_string(line));
        }
        pending_blank = 0;
        labels.push_back(std::move(label));
    }
    if (labels.empty()) throw ParseError(path.string() + ": no labels");
    return labels;
}

std::string evidence_csv(const std::vector<double>& trace) {
    std::string out = "iteration,log_evidence\n";
    for (std::size_t k = 0; k < trace.size(); ++k) out += std::to_string(k) + ',' + format_double(trace[k]) + '\n';
    return out;
}

int cmd_solve(const fs::path& a_path, const fs::path& y_path, const fs::path& blocks_path,
              const std::optional<fs::path>& solver_path, const Options& opt) {
    std::vector<fs::path> inputs{a_path, y_path, blocks_path};
    if (solver_path) inputs.push_back(*solver_path);
    require_files(inputs);

    Problem p;
    p.A = read_matrix_csv(a_path);
    p.Y = read_matrix_csv(y_path);
    p.blocks = blocks_from_json(load_json_file(blocks_path));
    const SolverConfig cfg = solver_path ? solver_config_from_json(load_json_file(*solver_path)) : SolverConfig{};
    try {
        p.validate();
    } catch (const StructureError& e) {
        throw ParseError(e.what());
    }

    const Estimate est = fit(p, cfg);

    json hyper = to_json(est.hyper);
    hyper["iterations"] = est.iterations;
    hyper["converged"] = est.converged;
    hyper["pruned_groups"] = pruned_groups(est.hyper, cfg.gamma_floor);
    hyper["solver"] = to_json(cfg);

    prepare_outdir(opt.out);
    write_matrix_csv(est.X_hat, opt.out / "X_hat.csv");
    write_matrix_csv(est.E_hat, opt.out / "E_hat.csv");
    write_file_atomic(opt.out / "hyper.json", hyper.dump(2) + "\n");
    write_file_atomic(opt.out / "evidence.csv", evidence_csv(est.evidence_trace));

    if (!opt.quiet) {
        std::cerr << "rosbl solve: " << est.iterations << " iterations, "
                  << (est.converged ? "converged" : "stopped at max_iters") << ", log evidence "
                  << est.evidence_trace.back() << "\n";
    }
    return est.converged ? kExitOk : kExitNotConverged;
}

int cmd_bench(const fs::path& spec_path, const Options& opt) {
    require_files({spec_path});
    BenchSpec spec = bench_spec_from_json(load_json_file(spec_path));
    if (opt.seed) spec.master_seed = *opt.seed;
    prepare_outdir(opt.out);

    const std::size_t total = spec.s_values.size() * static_cast<std::size_t>(spec.trials);
    std::size_t done = 0;
    json failures = json::array();
    auto on_trial = [&](const TrialRecord& rec) {
        ++done;
        for (const auto& o : rec.outcomes) {
            if (o.ok) continue;
            failures.push_back({{"algorithm", std::string(to_string(o.algorithm))},
                                {"s", rec.s},
                                {"trial", rec.trial},
                                {"error", o.error}});
            if (!opt.quiet) {
                std::cerr << "rosbl bench: " << to_string(o.algorithm) << " failed at s=" << rec.s
                          << " trial " << rec.trial << ": " << o.error << "\n";
            }
        }
        if (!opt.quiet) std::cerr << "\rrosbl bench: " << done << "/" << total << " trials" << std::flush;
    };

    const BenchResult result = run_sweep(spec, opt.jobs, on_trial);
    if (!opt.quiet) std::cerr << "\n";

    std::sort(failures.begin(), failures.end(), [](const json& a, const json& b) {
        return std::tie(a["s"], a["trial"], a["algorithm"]) < std::tie(b["s"], b["trial"], b["algorithm"]);
    });

    json meta{{"version", ROSBL_VERSION},
              {"master_seed", spec.master_seed},
              {"trials", spec.trials},
              {"s_values", spec.s_values},
              {"lambda_grid", spec.lambda_grid},
              {"baseline_tuning",
               "oracle: per trial, the lambda grid entry with the lowest error against ground truth"},
              {"spec", to_json(spec)},
              {"runs", result.total_runs()},
              {"failed_runs", result.failed_runs()},
              {"failures", failures}};

    write_file_atomic(opt.out / "results.csv", results_csv(result));
    write_file_atomic(opt.out / "raw.csv", raw_csv(result));
    write_file_atomic(opt.out / "meta.json", meta.dump(2) + "\n");

    const int runs = result.total_runs();
    const bool enough = runs > 0 && 10 * (runs - result.failed_runs()) >= 9 * runs;
    return enough ? kExitOk : kExitBenchFailures;
}

int cmd_classify(const fs::path& dict_path, const fs::path& labels_path, const fs::path& tests_path, Index group_size,
                 const std::optional<fs::path>& solver_path, const std::optional<fs::path>& truth_path,
                 const Options& opt) {
    std::vector<fs::path> inputs{dict_path, labels_path, tests_path};
    if (solver_path) inputs.push_back(*solver_path);
    if (truth_path) inputs.push_back(*truth_path);
    require_files(inputs);

    const Matrix columns = read_matrix_csv(dict_path);
    const auto labels = read_labels(labels_path);
    const Matrix tests = read_matrix_csv(tests_path);
    const SolverConfig cfg = solver_path ? solver_config_from_json(load_json_file(*solver_path)) : SolverConfig{};

    if (group_size < 1) throw ParseError("group size must be >= 1");
    if (tests.rows() != columns.rows()) {
        throw ParseError("n mismatch: tests have " + std::to_string(tests.rows()) + " rows, dictionary has " +
                         std::to_string(columns.rows()));
    }
    if (tests.cols() % group_size != 0) {
        throw ParseError(std::to_string(tests.cols()) + " test columns cannot be split into groups of " +
                         std::to_string(group_size));
    }
    ClassDictionary dict;
    try {
        dict = build_dictionary(columns, labels);
    } catch (const StructureError& e) {
        throw ParseError(e.what());
    }
    const Index groups = tests.cols() / group_size;
    std::optional<std::vector<std::string>> truth;
    if (truth_path) {
        truth = read_labels(*truth_path);
        if (static_cast<Index>(truth->size()) != groups) {
            throw ParseError("truth file has " + std::to_string(truth->size()) + " labels for " +
                             std::to_string(groups) + " test groups");
        }
    }

    std::string report = "sample_group,predicted";
    if (truth) report += ",true";
    for (const auto& l : dict.labels) report += ",residual_" + l;
    report += '\n';

    Matrix recon(tests.rows(), tests.cols());
    int correct = 0;
    for (Index g = 0; g < groups; ++g) {
        const Matrix Y = tests.middleCols(g * group_size, group_size);
        const auto res = solve_and_classify(dict, Y, cfg);
        recon.middleCols(g * group_size, group_size) = reconstruct(dict, res.estimate.X_hat);
        const auto& predicted = dict.labels[static_cast<std::size_t>(res.predicted)];
        report += std::to_string(g) + ',' + predicted;
        if (truth) {
            report += ',' + (*truth)[static_cast<std::size_t>(g)];
            if ((*truth)[static_cast<std::size_t>(g)] == predicted) ++correct;
        }
        for (Index k = 0; k < res.residuals.size(); ++k) report += ',' + format_double(res.residuals[k]);
        report += '\n';
    }

    prepare_outdir(opt.out);
    write_file_atomic(opt.out / "report.csv", report);
    write_matrix_csv(recon, opt.out / "reconstruction.csv");
    if (!opt.quiet) {
        std::cerr << "rosbl classify: " << groups << " groups";
        if (truth) std::cerr << ", accuracy " << static_cast<double>(correct) / static_cast<double>(groups);
        std::cerr << "\n";
    }
    return kExitOk;
}

int cmd_gen(const fs::path& config_path, const Options& opt) {
    require_files({config_path});
    SynthConfig cfg = synth_config_from_json(load_json_file(config_path));
    if (opt.seed) cfg.seed = *opt.seed;
    Problem p;
    try {
        p = generate(cfg);
    } catch (const StructureError& e) {
        throw ParseError(e.what());
    }

    prepare_outdir(opt.out);
    write_matrix_csv(p.A, opt.out / "A.csv");
    write_matrix_csv(p.Y, opt.out / "Y.csv");
    write_matrix_csv(p.truth->X, opt.out / "X.csv");
    write_matrix_csv(p.truth->E, opt.out / "E.csv");
    write_file_atomic(opt.out / "config.json", to_json(cfg).dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust sparse Bayesian learning for joint block-sparse recovery with outliers.\n"
                 "Matrices are headerless CSV; row and column labels in all outputs are 0-based."};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--out", opt.out, "Output directory");
    app.add_option("--jobs", opt.jobs, "Worker threads for bench trials")->check(CLI::PositiveNumber);
    app.add_option("--seed", opt.seed, "Override the configuration seed");
    app.add_flag("--quiet", opt.quiet, "Suppress progress messages");
    app.set_version_flag("--version", ROSBL_VERSION);

    fs::path a_path, y_path, blocks_path, spec_path, dict_path, labels_path, tests_path, synth_path;
    std::optional<fs::path> solver_path, truth_path;
    Index group_size = 1;

    auto* solve = app.add_subcommand("solve", "Fit the EM solver to A.csv / Y.csv");
    solve->add_option("A", a_path, "Dictionary CSV (n x m)")->required();
    solve->add_option("Y", y_path, "Measurements CSV (n x L)")->required();
    solve->add_option("blocks", blocks_path, "Block structure JSON")->required();
    solve->add_option("solver", solver_path, "Solver config JSON");

    auto* bench = app.add_subcommand("bench", "Run a Monte-Carlo sweep");
    bench->add_option("spec", spec_path, "Bench spec JSON")->required();

    auto* classify_cmd = app.add_subcommand("classify", "Classify groups of test columns");
    classify_cmd->add_option("dictionary", dict_path, "Dictionary columns CSV (n x m)")->required();
    classify_cmd->add_option("labels", labels_path, "One label per dictionary column")->required();
    classify_cmd->add_option("tests", tests_path, "Test columns CSV (n x T)")->required();
    classify_cmd->add_option("--group-size,-L", group_size, "Consecutive test columns per instance");
    classify_cmd->add_option("--solver", solver_path, "Solver config JSON");
    classify_cmd->add_option("--truth", truth_path, "True label per test group");

    auto* gen = app.add_subcommand("gen", "Generate a synthetic problem");
    gen->add_option("config", synth_path, "Synth config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    if (opt.out.empty()) {
        std::cerr << "rosbl: --out DIR is required\n";
        return kExitInput;
    }

    try {
        if (*solve) return cmd_solve(a_path, y_path, blocks_path, solver_path, opt);
        if (*bench) return cmd_bench(spec_path, opt);
        if (*classify_cmd) return cmd_classify(dict_path, labels_path, tests_path, group_size, solver_path, truth_path, opt);
        if (*gen) return cmd_gen(synth_path, opt);
    } catch (const ParseError& e) {
        std::cerr << "rosbl: input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const StructureError& e) {
        std::cerr << "rosbl: input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "rosbl: error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
