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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rosbl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid block partition or inconsistent problem dimensions.
class StructureError : public Error {
public:
    using Error::Error;
};

/// Malformed input file (CSV or JSON).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A numerical routine produced non-finite values or failed to make progress.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Partition of the coefficient indices 0..m-1 into G disjoint, nonempty groups.
///
/// Groups built by uniform() are contiguous ranges; from_groups() accepts any
/// disjoint cover. Immutable after construction.
class BlockStructure {
public:
    BlockStructure() = default;

    /// G = m / block_len contiguous groups of equal size, in index order.
    static BlockStructure uniform(Index m, Index block_len);

    /// Every index 0..m-1 must appear in exactly one group; m is inferred.
    static BlockStructure from_groups(std::vector<std::vector<Index>> groups);

    /// One group per coefficient (plain sparsity).
    static BlockStructure singletons(Index m);

    Index num_groups() const { return static_cast<Index>(members_.size()); }
    Index num_coefficients() const { return static_cast<Index>(group_of_.size()); }
    Index group_of(Index j) const { return group_of_.at(static_cast<std::size_t>(j)); }
    Index group_size(Index g) const { return static_cast<Index>(members(g).size()); }
    std::span<const Index> members(Index g) const { return members_.at(static_cast<std::size_t>(g)); }
    std::vector<Index> group_sizes() const;
    bool is_contiguous() const;

    /// Broadcast one value per group to one value per coefficient.
    Vector expand(const Vector& per_group) const;

    /// Groups of this structure followed by `extra` singleton groups.
    BlockStructure with_trailing_singletons(Index extra) const;

    bool operator==(const BlockStructure&) const = default;

private:
    std::vector<Index> group_of_;
    std::vector<std::vector<Index>> members_;
};

BlockStructure partition_uniform(Index m, Index block_len);

struct GroundTruth {
    Matrix X;  // m x L
    Matrix E;  // n x L
};

/// Y = A X + E + V with a known block partition of the columns of A.
struct Problem {
    Matrix Y;  // n x L
    Matrix A;  // n x m
    BlockStructure blocks;
    std::optional<GroundTruth> truth;

    Index n() const { return A.rows(); }
    Index m() const { return A.cols(); }
    Index L() const { return Y.cols(); }

    /// Throws StructureError naming the offending dimension.
    void validate() const;
};

/// gamma: one signal variance per group. delta: n x L outlier variances,
/// empty when the outlier component is disabled. sigma2: noise variance.
struct Hyperparameters {
    Vector gamma;
    Matrix delta;
    double sigma2 = 1.0;
};

/// Per-measurement Gaussian posterior over the augmented coefficients [x_i; e_i].
struct Posterior {
    std::vector<Vector> mu;
    std::vector<Matrix> sigma;

    Index L() const { return static_cast<Index>(mu.size()); }
};

struct Estimate {
    Matrix X_hat;  // m x L
    Matrix E_hat;  // n x L
    Hyperparameters hyper;
    std::vector<double> evidence_trace;
    int iterations = 0;
    bool converged = false;
};

}  // namespace rosbl
