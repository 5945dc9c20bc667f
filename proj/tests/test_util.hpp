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

#include <random>

#include "rosbl/core.hpp"

namespace rosbl::testing {

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& gen) {
    std::normal_distribution<double> dist;
    Matrix M(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) M(r, c) = dist(gen);
    return M;
}

inline Vector random_positive(Index size, std::mt19937_64& gen, double lo = 0.1, double hi = 2.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Vector v(size);
    for (Index k = 0; k < size; ++k) v[k] = dist(gen);
    return v;
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
    const double scale = std::max(b.norm(), 1e-300);
    return (a - b).norm() / scale;
}

}  // namespace rosbl::testing
