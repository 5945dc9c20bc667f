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
#include <optional>
#include <random>
#include <vector>

#include "rosbl/core.hpp"
#include "rosbl/solver.hpp"

namespace rosbl {

/// Seeded random source used by the generators.
///
/// Engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The continuous transforms are implemented here rather than with
/// <random> distributions so that draws are identical across standard
/// libraries:
///   uniform_open: ((x >> 11) + 0.5) * 2^-53, strictly inside (0, 1)
///   normal:       Box-Muller on two uniforms, both outputs used in order
///   cauchy:       tan(pi (u - 1/2))
///   below(k):     rejection sampling on the top bits
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform_open();
    double normal();
    double cauchy();
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_normal_;
};

/// SplitMix64 finaliser; used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t x);

double cauchy_from_uniform(double u);

struct SynthConfig {
    Index n = 80;
    Index m = 160;
    Index block_len = 8;
    Index s = 3;
    Index L = 5;
    double sgnr_db = 40.0;
    /// Unset or +inf disables outliers, as does outlier_mode None.
    std::optional<double> sonr_db = 5.0;
    OutlierModel outlier_mode = OutlierModel::TimeVarying;
    std::uint64_t seed = 0;

    void validate() const;
    bool has_outliers() const;
};

/// Gaussian entries, columns normalised to unit l2 norm.
Matrix sample_dictionary(Index n, Index m, Rng& rng);

struct BlockSparseDraw {
    Matrix X;
    std::vector<Index> active_groups;  // sorted
};

/// s distinct groups chosen uniformly; their rows get N(0,1) entries in
/// every column, all other rows are zero.
BlockSparseDraw sample_block_sparse_X(const BlockStructure& blocks, Index s, Index L, Rng& rng);

Matrix sample_normal(Index rows, Index cols, Rng& rng);
Matrix sample_cauchy(Index rows, Index cols, Rng& rng);

/// 10 log10(||signal||_F^2 / ||noise||_F^2).
double ratio_db(const Matrix& signal, const Matrix& noise);

/// noise * c such that ratio_db(signal, noise * c) == target_db.
Matrix scale_to_ratio(const Matrix& signal, const Matrix& noise, double target_db);

/// Draws A, X, V, E in that order from Rng(config.seed) and returns
/// Y = A X + E + V with the truth attached. Stationary outliers repeat one
/// Cauchy column across all measurements.
Problem generate(const SynthConfig& config);

}  // namespace rosbl
