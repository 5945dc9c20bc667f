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

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rosbl/baselines.hpp"
#include "rosbl/core.hpp"
#include "rosbl/solver.hpp"
#include "rosbl/synth.hpp"

namespace rosbl {

enum class Algorithm { RoSBL, MBSBL, L1, L2L1 };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view text);

struct BenchSpec {
    SynthConfig synth;  // template; s and seed are overridden per trial
    std::vector<Index> s_values{1, 2, 3, 4, 5, 6};
    int trials = 50;
    std::vector<Algorithm> algorithms{Algorithm::RoSBL, Algorithm::MBSBL, Algorithm::L1, Algorithm::L2L1};
    SolverConfig solver;
    ProxConfig prox;
    /// Baseline lambda candidates, as multiples of ||D^T y_i||_inf.
    std::vector<double> lambda_grid{1e-3, 1e-2, 1e-1, 0.3, 1.0};
    std::uint64_t master_seed = 0;
    /// Fix sigma2 to the realised noise power instead of learning it.
    bool fix_sigma2_to_truth = false;
    /// Run the baselines on [A | I] (outlier entries as extra singleton groups).
    bool baselines_on_augmented = true;

    void validate() const;
};

struct AlgorithmOutcome {
    Algorithm algorithm = Algorithm::RoSBL;
    bool ok = false;
    double rel_err = 0.0;
    double wall_ms = 0.0;
    double lambda_factor = 0.0;  // baselines only: the selected grid entry
    std::string error;
};

struct TrialRecord {
    Index s = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    std::vector<AlgorithmOutcome> outcomes;
};

struct CellSummary {
    Algorithm algorithm = Algorithm::RoSBL;
    Index s = 0;
    int trials = 0;  // successful trials
    int failures = 0;
    double mean = 0.0;
    double median = 0.0;
    double stderr_mean = 0.0;
    double wall_ms = 0.0;  // mean per successful trial
    std::vector<double> errors;
};

struct BenchResult {
    std::vector<CellSummary> cells;    // ordered by algorithm (spec order), then s
    std::vector<TrialRecord> records;  // ordered by (s, trial)

    const CellSummary& cell(Algorithm a, Index s) const;
    int total_runs() const;
    int failed_runs() const;
};

/// (1/L) sum_i ||x_i - x_hat_i||^2 / ||x_i||^2. A zero truth column is an error.
double relative_l2_error(const Matrix& X, const Matrix& X_hat);

/// Seed of trial k at sparsity s; independent of execution order.
std::uint64_t trial_seed(std::uint64_t master_seed, Index s, int trial_index);

TrialRecord run_trial(const BenchSpec& spec, Index s, int trial_index);

using TrialCallback = std::function<void(const TrialRecord&)>;

/// Runs every (s, trial) on up to `jobs` threads and aggregates.
BenchResult run_sweep(const BenchSpec& spec, int jobs = 1, const TrialCallback& on_trial = {});

BenchResult aggregate(const BenchSpec& spec, std::vector<TrialRecord> records);

/// `algorithm,s,trials,mean_rel_err,median_rel_err,stderr,wall_ms,failures`
std::string results_csv(const BenchResult& result);

/// `algorithm,s,trial,rel_err`, successful runs only, sorted by (algorithm, s, trial).
std::string raw_csv(const BenchResult& result);

}  // namespace rosbl
