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

#include "rosbl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace rosbl {

double Rng::uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
    if (spare_normal_) {
        const double z = *spare_normal_;
        spare_normal_.reset();
        return z;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_normal_ = r * std::sin(theta);
    return r * std::cos(theta);
}

double Rng::cauchy() { return cauchy_from_uniform(uniform_open()); }

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw Error("Rng::below needs a positive bound");
    // Smallest all-ones mask covering bound - 1, then reject out-of-range draws.
    std::uint64_t mask = bound - 1;
    for (int shift = 1; shift < 64; shift <<= 1) mask |= mask >> shift;
    while (true) {
        const std::uint64_t x = engine_() & mask;
        if (x < bound) return x;
    }
}

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double cauchy_from_uniform(double u) {
    if (!(u > 0.0 && u < 1.0)) throw Error("Cauchy transform needs u in (0, 1)");
    return std::tan(std::numbers::pi * (u - 0.5));
}

void SynthConfig::validate() const {
    if (n < 1 || m < 1 || L < 1) throw StructureError("synthetic problem needs n, m, L >= 1");
    if (block_len < 1 || m % block_len != 0) {
        throw StructureError("block length " + std::to_string(block_len) + " does not divide m=" +
                             std::to_string(m));
    }
    if (s < 0 || s > m / block_len) {
        throw StructureError("s=" + std::to_string(s) + " exceeds the " + std::to_string(m / block_len) +
                             " available blocks");
    }
    if (std::isnan(sgnr_db) || (sonr_db && std::isnan(*sonr_db))) {
        throw StructureError("SGNR/SONR must not be NaN");
    }
}

bool SynthConfig::has_outliers() const {
    return outlier_mode != OutlierModel::None && sonr_db && !std::isinf(*sonr_db);
}

Matrix sample_normal(Index rows, Index cols, Rng& rng) {
    Matrix M(rows, cols);
    // Column-major fill order defines the draw sequence.
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) M(r, c) = rng.normal();
    return M;
}

Matrix sample_cauchy(Index rows, Index cols, Rng& rng) {
    if (rows < 1 || cols < 1) throw StructureError("Cauchy sample needs positive dimensions");
    Matrix M(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) M(r, c) = rng.cauchy();
    return M;
}

Matrix sample_dictionary(Index n, Index m, Rng& rng) {
    if (n < 1 || m < 1) throw StructureError("dictionary needs n, m >= 1");
    Matrix A(n, m);
    for (Index c = 0; c < m; ++c) {
        double norm = 0.0;
        do {
            for (Index r = 0; r < n; ++r) A(r, c) = rng.normal();
            norm = A.col(c).norm();
        } while (norm == 0.0);
        A.col(c) /= norm;
    }
    return A;
}

BlockSparseDraw sample_block_sparse_X(const BlockStructure& blocks, Index s, Index L, Rng& rng) {
    const Index G = blocks.num_groups();
    if (s < 0 || s > G) {
        throw StructureError("cannot select " + std::to_string(s) + " of " + std::to_string(G) + " groups");
    }
    // Partial Fisher-Yates over group ids.
    std::vector<Index> ids(static_cast<std::size_t>(G));
    for (Index g = 0; g < G; ++g) ids[static_cast<std::size_t>(g)] = g;
    for (Index k = 0; k < s; ++k) {
        const auto pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(G - k))) + k;
        std::swap(ids[static_cast<std::size_t>(k)], ids[static_cast<std::size_t>(pick)]);
    }

    BlockSparseDraw out;
    out.active_groups.assign(ids.begin(), ids.begin() + s);
    std::sort(out.active_groups.begin(), out.active_groups.end());
    out.X = Matrix::Zero(blocks.num_coefficients(), L);
    for (Index c = 0; c < L; ++c) {
        for (Index g : out.active_groups) {
            for (Index j : blocks.members(g)) out.X(j, c) = rng.normal();
        }
    }
    return out;
}

double ratio_db(const Matrix& signal, const Matrix& noise) {
    return 10.0 * std::log10(signal.squaredNorm() / noise.squaredNorm());
}

Matrix scale_to_ratio(const Matrix& signal, const Matrix& noise, double target_db) {
    const double s = signal.norm();
    const double v = noise.norm();
    if (!(s > 0.0)) throw StructureError("cannot calibrate against a zero signal");
    if (!(v > 0.0)) throw StructureError("cannot calibrate a zero noise matrix");
    const double c = s / (v * std::pow(10.0, target_db / 20.0));
    return noise * c;
}

Problem generate(const SynthConfig& config) {
    config.validate();
    Rng rng(config.seed);

    Problem p;
    p.blocks = BlockStructure::uniform(config.m, config.block_len);
    p.A = sample_dictionary(config.n, config.m, rng);
    auto draw = sample_block_sparse_X(p.blocks, config.s, config.L, rng);
    const Matrix signal = p.A * draw.X;

    Matrix V = sample_normal(config.n, config.L, rng);
    if (std::isinf(config.sgnr_db) && config.sgnr_db > 0) {
        V.setZero();
    } else {
        V = scale_to_ratio(signal, V, config.sgnr_db);
    }

    Matrix E = Matrix::Zero(config.n, config.L);
    if (config.has_outliers()) {
        if (config.outlier_mode == OutlierModel::Stationary) {
            E = sample_cauchy(config.n, 1, rng).replicate(1, config.L);
        } else {
            E = sample_cauchy(config.n, config.L, rng);
        }
        E = scale_to_ratio(signal, E, *config.sonr_db);
    }

    p.Y = signal + E + V;
    p.truth = GroundTruth{std::move(draw.X), std::move(E)};
    return p;
}

}  // namespace rosbl
