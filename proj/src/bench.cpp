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

#include "rosbl/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "rosbl/csv.hpp"

namespace rosbl {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Best relative error over the lambda grid, one lambda scale per column.
AlgorithmOutcome run_baseline(const BenchSpec& spec, const Problem& p, Algorithm algorithm) {
    AlgorithmOutcome out;
    out.algorithm = algorithm;

    const Index m = p.m();
    const Matrix D = spec.baselines_on_augmented ? augment(p.A) : p.A;
    const Index extra = D.cols() - m;
    const BlockStructure blocks = algorithm == Algorithm::L1
                                      ? BlockStructure::singletons(D.cols())
                                      : p.blocks.with_trailing_singletons(extra);

    double best = std::numeric_limits<double>::infinity();
    for (double factor : spec.lambda_grid) {
        Matrix X_hat(m, p.L());
        for (Index i = 0; i < p.L(); ++i) {
            ProxConfig cfg = spec.prox;
            cfg.lambda = factor * (D.transpose() * p.Y.col(i)).cwiseAbs().maxCoeff();
            X_hat.col(i) = group_lasso(D, p.Y.col(i), blocks, cfg).head(m);
        }
        const double err = relative_l2_error(p.truth->X, X_hat);
        if (err < best) {
            best = err;
            out.lambda_factor = factor;
        }
    }
    out.rel_err = best;
    out.ok = std::isfinite(best);
    if (!out.ok) out.error = "no finite error over the lambda grid";
    return out;
}

AlgorithmOutcome run_algorithm(const BenchSpec& spec, const Problem& p, Algorithm algorithm) {
    const auto start = Clock::now();
    AlgorithmOutcome out;
    out.algorithm = algorithm;
    try {
        if (algorithm == Algorithm::RoSBL || algorithm == Algorithm::MBSBL) {
            SolverConfig cfg = spec.solver;
            cfg.outlier_model =
                algorithm == Algorithm::RoSBL ? OutlierModel::TimeVarying : OutlierModel::Stationary;
            if (spec.fix_sigma2_to_truth) {
                const Matrix V = p.Y - p.A * p.truth->X - p.truth->E;
                cfg.learn_sigma2 = false;
                cfg.sigma2_init = std::max(V.squaredNorm() / static_cast<double>(V.size()), kSigma2Floor);
            }
            const Estimate est = fit(p, cfg);
            out.rel_err = relative_l2_error(p.truth->X, est.X_hat);
            out.ok = true;
        } else {
            out = run_baseline(spec, p, algorithm);
        }
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    out.wall_ms = elapsed_ms(start);
    return out;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::RoSBL: return "rosbl";
        case Algorithm::MBSBL: return "mbsbl";
        case Algorithm::L1: return "l1";
        case Algorithm::L2L1: return "l2l1";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view text) {
    if (text == "rosbl") return Algorithm::RoSBL;
    if (text == "mbsbl") return Algorithm::MBSBL;
    if (text == "l1") return Algorithm::L1;
    if (text == "l2l1") return Algorithm::L2L1;
    throw ParseError("unknown algorithm '" + std::string(text) + "' (expected rosbl, mbsbl, l1 or l2l1)");
}

void BenchSpec::validate() const {
    if (trials < 1) throw StructureError("trials must be >= 1");
    if (s_values.empty()) throw StructureError("s_values must not be empty");
    if (algorithms.empty()) throw StructureError("algorithms must not be empty");
    if (lambda_grid.empty()) throw StructureError("lambda grid must not be empty");
    for (double f : lambda_grid) {
        if (!(f >= 0.0)) throw StructureError("lambda grid entries must be >= 0");
    }
    for (Index s : s_values) {
        SynthConfig c = synth;
        c.s = s;
        c.validate();
        if (s < 1) throw StructureError("s must be >= 1 (the error metric needs nonzero truth columns)");
    }
    solver.validate();
    prox.validate();
}

const CellSummary& BenchResult::cell(Algorithm a, Index s) const {
    for (const auto& c : cells) {
        if (c.algorithm == a && c.s == s) return c;
    }
    throw StructureError("no result cell for " + std::string(to_string(a)) + " at s=" + std::to_string(s));
}

int BenchResult::total_runs() const {
    int n = 0;
    for (const auto& c : cells) n += c.trials + c.failures;
    return n;
}

int BenchResult::failed_runs() const {
    int n = 0;
    for (const auto& c : cells) n += c.failures;
    return n;
}

double relative_l2_error(const Matrix& X, const Matrix& X_hat) {
    if (X.rows() != X_hat.rows() || X.cols() != X_hat.cols()) {
        throw StructureError("relative error needs matrices of equal shape");
    }
    if (X.cols() == 0) throw StructureError("relative error needs at least one column");
    double total = 0.0;
    for (Index i = 0; i < X.cols(); ++i) {
        const double denom = X.col(i).squaredNorm();
        if (!(denom > 0.0)) {
            throw StructureError("relative error undefined: truth column " + std::to_string(i) + " is zero");
        }
        total += (X.col(i) - X_hat.col(i)).squaredNorm() / denom;
    }
    return total / static_cast<double>(X.cols());
}

std::uint64_t trial_seed(std::uint64_t master_seed, Index s, int trial_index) {
    const std::uint64_t key = (static_cast<std::uint64_t>(s) << 32) ^ static_cast<std::uint32_t>(trial_index);
    return master_seed + mix_seed(key);
}

TrialRecord run_trial(const BenchSpec& spec, Index s, int trial_index) {
    TrialRecord rec;
    rec.s = s;
    rec.trial = trial_index;
    rec.seed = trial_seed(spec.master_seed, s, trial_index);

    SynthConfig cfg = spec.synth;
    cfg.s = s;
    cfg.seed = rec.seed;

    Problem problem;
    std::string gen_error;
    try {
        problem = generate(cfg);
    } catch (const std::exception& e) {
        gen_error = std::string("generation failed: ") + e.what();
    }

    for (Algorithm a : spec.algorithms) {
        if (!gen_error.empty()) {
            rec.outcomes.push_back(AlgorithmOutcome{a, false, 0.0, 0.0, 0.0, gen_error});
            continue;
        }
        rec.outcomes.push_back(run_algorithm(spec, problem, a));
    }
    return rec;
}

BenchResult run_sweep(const BenchSpec& spec, int jobs, const TrialCallback& on_trial) {
    spec.validate();
    std::vector<std::pair<Index, int>> work;
    for (Index s : spec.s_values) {
        for (int k = 0; k < spec.trials; ++k) work.emplace_back(s, k);
    }

    std::vector<TrialRecord> records(work.size());
    std::atomic<std::size_t> next{0};
    std::mutex callback_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < work.size(); i = next++) {
            records[i] = run_trial(spec, work[i].first, work[i].second);
            if (on_trial) {
                std::lock_guard lock(callback_mutex);
                on_trial(records[i]);
            }
        }
    };

    const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(work.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return aggregate(spec, std::move(records));
}

BenchResult aggregate(const BenchSpec& spec, std::vector<TrialRecord> records) {
    std::sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
        return std::tie(a.s, a.trial) < std::tie(b.s, b.trial);
    });

    BenchResult out;
    for (Algorithm a : spec.algorithms) {
        for (Index s : spec.s_values) {
            CellSummary cell;
            cell.algorithm = a;
            cell.s = s;
            double wall = 0.0;
            for (const auto& rec : records) {
                if (rec.s != s) continue;
                for (const auto& o : rec.outcomes) {
                    if (o.algorithm != a) continue;
                    if (o.ok) {
                        cell.errors.push_back(o.rel_err);
                        wall += o.wall_ms;
                    } else {
                        ++cell.failures;
                    }
                }
            }
            cell.trials = static_cast<int>(cell.errors.size());
            if (cell.trials > 0) {
                double sum = 0.0;
                for (double e : cell.errors) sum += e;
                cell.mean = sum / cell.trials;
                cell.median = median_of(cell.errors);
                if (cell.trials > 1) {
                    double ss = 0.0;
                    for (double e : cell.errors) ss += (e - cell.mean) * (e - cell.mean);
                    cell.stderr_mean = std::sqrt(ss / (cell.trials - 1)) / std::sqrt(static_cast<double>(cell.trials));
                }
                cell.wall_ms = wall / cell.trials;
            } else {
                cell.mean = cell.median = std::numeric_limits<double>::quiet_NaN();
            }
            out.cells.push_back(std::move(cell));
        }
    }
    out.records = std::move(records);
    return out;
}

std::string results_csv(const BenchResult& result) {
    std::string out = "algorithm,s,trials,mean_rel_err,median_rel_err,stderr,wall_ms,failures\n";
    for (const auto& c : result.cells) {
        out += std::string(to_string(c.algorithm)) + ',' + std::to_string(c.s) + ',' + std::to_string(c.trials) +
               ',' + format_double(c.mean) + ',' + format_double(c.median) + ',' + format_double(c.stderr_mean) +
               ',' + format_double(std::round(c.wall_ms * 1000.0) / 1000.0) + ',' + std::to_string(c.failures) +
               '\n';
    }
    return out;
}

std::string raw_csv(const BenchResult& result) {
    std::string out = "algorithm,s,trial,rel_err\n";
    for (const auto& c : result.cells) {
        for (const auto& rec : result.records) {
            if (rec.s != c.s) continue;
            for (const auto& o : rec.outcomes) {
                if (o.algorithm != c.algorithm || !o.ok) continue;
                out += std::string(to_string(o.algorithm)) + ',' + std::to_string(rec.s) + ',' +
                       std::to_string(rec.trial) + ',' + format_double(o.rel_err) + '\n';
            }
        }
    }
    return out;
}

}  // namespace rosbl
