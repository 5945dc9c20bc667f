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

// Reference computations for the test suites. Each one takes a different
// numerical route from the library code it checks.

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include <Eigen/Dense>

#include "rosbl/core.hpp"

namespace rosbl::oracle {

/// Information form: Sigma = (P^{-1} + A^T A / sigma2)^{-1}, mu = Sigma A^T y / sigma2.
/// Needs strictly positive prior variances.
inline std::pair<Vector, Matrix> information_posterior(const Matrix& A_tilde, const Vector& y, const Vector& prior,
                                                       double sigma2) {
    Matrix precision = A_tilde.transpose() * A_tilde / sigma2;
    precision.diagonal() += prior.cwiseInverse();
    const Matrix sigma = precision.fullPivLu().inverse();
    const Vector mu = sigma * A_tilde.transpose() * y / sigma2;
    return {mu, sigma};
}

/// log N(y; 0, C) with logdet from eigenvalues and the quadratic form from an explicit inverse.
inline double dense_log_gaussian(const Matrix& C, const Vector& y) {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(C);
    const double logdet = es.eigenvalues().array().log().sum();
    const double quad = y.dot(C.inverse() * y);
    return -0.5 * (static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi) + logdet + quad);
}

inline double group_objective(const Matrix& A, const Vector& y, const Vector& x, const BlockStructure& blocks,
                              double lambda) {
    double pen = 0.0;
    for (Index g = 0; g < blocks.num_groups(); ++g) {
        double sq = 0.0;
        for (Index j : blocks.members(g)) sq += x[j] * x[j];
        pen += std::sqrt(sq);
    }
    return (A * x - y).squaredNorm() + lambda * pen;
}

/// Subgradient descent with diminishing steps, returning the best objective seen.
inline double subgradient_minimum(const Matrix& A, const Vector& y, const BlockStructure& blocks, double lambda,
                                  int iterations) {
    Vector x = Vector::Zero(A.cols());
    double best = group_objective(A, y, x, blocks, lambda);
    const double lip = 2.0 * Eigen::SelfAdjointEigenSolver<Matrix>(A.transpose() * A).eigenvalues().maxCoeff();
    for (int k = 1; k <= iterations; ++k) {
        Vector g = 2.0 * A.transpose() * (A * x - y);
        for (Index grp = 0; grp < blocks.num_groups(); ++grp) {
            double sq = 0.0;
            for (Index j : blocks.members(grp)) sq += x[j] * x[j];
            const double norm = std::sqrt(sq);
            if (norm > 0.0) {
                for (Index j : blocks.members(grp)) g[j] += lambda * x[j] / norm;
            }
        }
        x -= g / (lip * std::sqrt(static_cast<double>(k)));
        best = std::min(best, group_objective(A, y, x, blocks, lambda));
    }
    return best;
}

/// Plain ISTA with scalar soft thresholding for ||Ax - y||^2 + lambda ||x||_1.
inline Vector lasso_ista(const Matrix& A, const Vector& y, double lambda, int iterations) {
    const double lip = 2.0 * Eigen::SelfAdjointEigenSolver<Matrix>(A.transpose() * A).eigenvalues().maxCoeff();
    const double step = 1.0 / lip;
    Vector x = Vector::Zero(A.cols());
    for (int k = 0; k < iterations; ++k) {
        const Vector v = x - step * 2.0 * A.transpose() * (A * x - y);
        for (Index j = 0; j < x.size(); ++j) {
            const double mag = std::abs(v[j]) - step * lambda;
            x[j] = mag > 0.0 ? std::copysign(mag, v[j]) : 0.0;
        }
    }
    return x;
}

/// Minimiser of 0.5 ||u - v||^2 + tau ||u||_2 over u in R^2 by successive grid refinement.
inline Eigen::Vector2d grid_prox_2d(const Eigen::Vector2d& v, double tau) {
    auto f = [&](const Eigen::Vector2d& u) { return 0.5 * (u - v).squaredNorm() + tau * u.norm(); };
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double half = v.cwiseAbs().maxCoeff() + 1.0;
    constexpr int steps = 80;
    for (int level = 0; level < 12; ++level) {
        Eigen::Vector2d best = center;
        double best_val = f(center);
        for (int a = -steps; a <= steps; ++a) {
            for (int b = -steps; b <= steps; ++b) {
                const Eigen::Vector2d u = center + Eigen::Vector2d(a, b) * (half / steps);
                const double val = f(u);
                if (val < best_val) {
                    best_val = val;
                    best = u;
                }
            }
        }
        center = best;
        half *= 4.0 / steps;
    }
    return center;
}

}  // namespace rosbl::oracle
