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

#include "rosbl/core.hpp"

namespace rosbl {

struct ProxConfig {
    double lambda = 0.1;
    int max_iters = 2000;
    /// Relative objective decrease that counts as converged.
    double tol = 1e-8;
    /// Unset selects 1 / (2 lambda_max(A^T A)).
    std::optional<double> step;

    void validate() const;
};

/// Thrown when an explicit step size makes the iterates blow up.
class DivergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Proximal operator of tau * sum_g ||v_g||_2: each group is shrunk towards
/// zero by tau in norm, or zeroed if its norm is at most tau.
Vector block_soft_threshold(const Vector& v, const BlockStructure& blocks, double tau);

/// ||A x - y||^2 + lambda * sum_g ||x_g||_2.
double group_lasso_objective(const Matrix& A, const Vector& y, const Vector& x, const BlockStructure& blocks,
                             double lambda);

/// Largest eigenvalue of A^T A by power iteration.
double gram_spectral_norm(const Matrix& A, int iterations = 50, double tol = 1e-6);

/// Monotone FISTA on the group-lasso objective, starting from x = 0.
/// Singleton groups give the l1 (lasso) problem.
Vector group_lasso(const Matrix& A, const Vector& y, const BlockStructure& blocks, const ProxConfig& config);

/// group_lasso applied to every column of Y independently.
Matrix mmv_columnwise(const Matrix& A, const Matrix& Y, const BlockStructure& blocks, const ProxConfig& config);

}  // namespace rosbl
