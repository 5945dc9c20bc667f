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

#include "rosbl/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rosbl {

namespace {

// Consecutive rejected proximal steps tolerated with an explicit step size.
constexpr int kDivergencePatience = 50;
// Consecutive small decreases required before stopping.
constexpr int kStallPatience = 3;

double group_penalty(const Vector& x, const BlockStructure& blocks) {
    double total = 0.0;
    for (Index g = 0; g < blocks.num_groups(); ++g) {
        double sq = 0.0;
        for (Index j : blocks.members(g)) sq += x[j] * x[j];
        total += std::sqrt(sq);
    }
    return total;
}

}  // namespace

void ProxConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw StructureError("lambda must be >= 0");
    if (max_iters < 1) throw StructureError("max_iters must be >= 1");
    if (!(tol > 0.0)) throw StructureError("tol must be > 0");
    if (step && !(*step > 0.0)) throw StructureError("explicit step must be > 0");
}

Vector block_soft_threshold(const Vector& v, const BlockStructure& blocks, double tau) {
    if (v.size() != blocks.num_coefficients()) {
        throw StructureError("vector length does not match block partition");
    }
    if (!(tau >= 0.0)) throw StructureError("threshold must be >= 0");
    Vector out = Vector::Zero(v.size());
    for (Index g = 0; g < blocks.num_groups(); ++g) {
        const auto members = blocks.members(g);
        double sq = 0.0;
        for (Index j : members) sq += v[j] * v[j];
        const double norm = std::sqrt(sq);
        if (norm <= tau) continue;
        const double shrink = 1.0 - tau / norm;
        for (Index j : members) out[j] = shrink * v[j];
    }
    return out;
}

double group_lasso_objective(const Matrix& A, const Vector& y, const Vector& x, const BlockStructure& blocks,
                             double lambda) {
    return (A * x - y).squaredNorm() + lambda * group_penalty(x, blocks);
}

double gram_spectral_norm(const Matrix& A, int iterations, double tol) {
    Vector v = Vector::Constant(A.cols(), 1.0 / std::sqrt(static_cast<double>(A.cols())));
    double estimate = 0.0;
    for (int it = 0; it < iterations; ++it) {
        const Vector w = A.transpose() * (A * v);
        const double next = w.norm();
        if (next == 0.0) return 0.0;
        v = w / next;
        const bool settled = std::abs(next - estimate) <= tol * next;
        estimate = next;
        if (settled) break;
    }
    return estimate;
}

Vector group_lasso(const Matrix& A, const Vector& y, const BlockStructure& blocks, const ProxConfig& config) {
    config.validate();
    if (A.rows() != y.size()) throw StructureError("measurement length does not match dictionary rows");
    if (A.cols() != blocks.num_coefficients()) {
        throw StructureError("dictionary columns do not match block partition");
    }

    const Index m = A.cols();
    double step = 0.0;
    if (config.step) {
        step = *config.step;
    } else {
        const double lip = 2.0 * gram_spectral_norm(A);
        if (lip == 0.0) return Vector::Zero(m);
        step = 1.0 / lip;
    }

    Vector x = Vector::Zero(m);
    Vector w = x;
    double t = 1.0;
    double F = group_lasso_objective(A, y, x, blocks, config.lambda);
    int rejected = 0;
    int stalled = 0;

    for (int k = 0; k < config.max_iters; ++k) {
        const Vector grad = 2.0 * (A.transpose() * (A * w - y));
        const Vector z = block_soft_threshold(w - step * grad, blocks, step * config.lambda);
        const double Fz = group_lasso_objective(A, y, z, blocks, config.lambda);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));

        const bool accept = std::isfinite(Fz) && Fz <= F;
        if (!accept) {
            if (config.step && ++rejected >= kDivergencePatience) {
                throw DivergenceError("proximal gradient objective keeps increasing with step " +
                                      std::to_string(step) + "; use a smaller step or 'auto'");
            }
        } else {
            rejected = 0;
        }

        const Vector x_next = accept ? z : x;
        const double F_next = accept ? Fz : F;
        w = x_next + (t / t_next) * (z - x_next) + ((t - 1.0) / t_next) * (x_next - x);
        const double decrease = (F - F_next) / std::max(F, std::numeric_limits<double>::min());
        x = x_next;
        t = t_next;
        F = F_next;

        if (accept && decrease < config.tol) {
            if (++stalled >= kStallPatience) break;
        } else if (accept) {
            stalled = 0;
        }
    }
    return x;
}

Matrix mmv_columnwise(const Matrix& A, const Matrix& Y, const BlockStructure& blocks, const ProxConfig& config) {
    Matrix X(A.cols(), Y.cols());
    for (Index i = 0; i < Y.cols(); ++i) {
        try {
            X.col(i) = group_lasso(A, Y.col(i), blocks, config);
        } catch (const DivergenceError& e) {
            throw DivergenceError("column " + std::to_string(i) + ": " + e.what());
        } catch (const NumericalError& e) {
            throw NumericalError("column " + std::to_string(i) + ": " + e.what());
        } catch (const StructureError& e) {
            throw StructureError("column " + std::to_string(i) + ": " + e.what());
        }
    }
    return X;
}

}  // namespace rosbl
