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

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "rosbl/core.hpp"

namespace rosbl {

/// How the outlier matrix E is modelled.
///
/// TimeVarying: one variance per entry (j, i); outlier support may change
/// between measurements. Stationary: one variance per row j shared by all
/// measurements (row-sparse E). None: no outlier component, dictionary is A.
enum class OutlierModel { TimeVarying, Stationary, None };

std::string_view to_string(OutlierModel model);
OutlierModel parse_outlier_model(std::string_view text);

inline constexpr double kSigma2Floor = 1e-12;

struct SolverConfig {
    OutlierModel outlier_model = OutlierModel::TimeVarying;
    int max_iters = 500;
    /// Stop when the largest relative hyperparameter change drops below this.
    double tol = 1e-4;
    bool learn_sigma2 = true;
    /// Initial noise variance; unset means max(1e-2 * ||Y||_F^2 / (nL), 1e-6).
    std::optional<double> sigma2_init;
    /// Lower clamp applied to gamma and delta after every M-step.
    double gamma_floor = 1e-10;

    void validate() const;
};

/// [A | I_n].
Matrix augment(const Matrix& A);

/// Dictionary used by the solver for a given outlier model.
Matrix working_dictionary(const Matrix& A, OutlierModel model);

struct MeasurementPosterior {
    Vector mu;
    Matrix sigma;
};

/// Gaussian posterior of one augmented coefficient vector given y.
///
/// With P = diag([gamma_tilde; delta]) and C = sigma2 I_n + A_tilde P A_tilde^T:
///   mu    = P A_tilde^T C^{-1} y
///   Sigma = P - P A_tilde^T C^{-1} A_tilde P
/// `delta` must be empty when A_tilde carries no identity block.
MeasurementPosterior e_step(const Matrix& A_tilde, const Vector& y, const Vector& gamma_tilde,
                            const Vector& delta, double sigma2);

/// Posterior for every column of Y under the given hyperparameters.
Posterior compute_posterior(const Matrix& A_tilde, const Matrix& Y, const Hyperparameters& hyper,
                            const BlockStructure& blocks);

/// Closed-form maximiser of the expected complete-data log likelihood.
/// `sigma2_current` is carried over unchanged when config.learn_sigma2 is false.
Hyperparameters m_step(const Posterior& posterior, const BlockStructure& blocks, const Matrix& Y,
                       const Matrix& A_tilde, const SolverConfig& config, double sigma2_current);

/// sum_i log N(y_i; 0, sigma2 I + A_tilde P_i A_tilde^T).
double log_evidence(const Matrix& A_tilde, const Matrix& Y, const Hyperparameters& hyper,
                    const BlockStructure& blocks);

/// Splits each posterior mean into its signal part (first m) and outlier part.
std::pair<Matrix, Matrix> extract_estimate(const Posterior& posterior, Index m, Index n);

double initial_sigma2(const Matrix& Y, const SolverConfig& config);

/// Groups whose variance sits at the floor.
std::vector<Index> pruned_groups(const Hyperparameters& hyper, double floor);

/// EM on the augmented model until hyperparameters settle or max_iters.
///
/// evidence_trace[0] is the evidence at the initial hyperparameters and
/// evidence_trace[k] the evidence after the k-th M-step. Deterministic.
Estimate fit(const Problem& problem, const SolverConfig& config);

}  // namespace rosbl
