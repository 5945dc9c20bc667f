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

#include "rosbl/core.hpp"

#include <algorithm>

namespace rosbl {

BlockStructure BlockStructure::uniform(Index m, Index block_len) {
    if (block_len <= 0 || m <= 0) {
        throw StructureError("block partition needs positive m and block length (got m=" +
                             std::to_string(m) + ", block_len=" + std::to_string(block_len) + ")");
    }
    if (m % block_len != 0) {
        throw StructureError("block length " + std::to_string(block_len) +
                             " does not divide m=" + std::to_string(m));
    }
    std::vector<std::vector<Index>> groups(static_cast<std::size_t>(m / block_len));
    for (Index j = 0; j < m; ++j) {
        groups[static_cast<std::size_t>(j / block_len)].push_back(j);
    }
    return from_groups(std::move(groups));
}

BlockStructure BlockStructure::from_groups(std::vector<std::vector<Index>> groups) {
    if (groups.empty()) {
        throw StructureError("block partition must contain at least one group");
    }
    Index m = 0;
    for (const auto& g : groups) {
        if (g.empty()) {
            throw StructureError("block partition contains an empty group");
        }
        m += static_cast<Index>(g.size());
    }

    BlockStructure out;
    out.group_of_.assign(static_cast<std::size_t>(m), -1);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (Index j : groups[g]) {
            if (j < 0 || j >= m) {
                throw StructureError("coefficient index " + std::to_string(j) +
                                     " outside 0.." + std::to_string(m - 1));
            }
            auto& slot = out.group_of_[static_cast<std::size_t>(j)];
            if (slot != -1) {
                throw StructureError("coefficient index " + std::to_string(j) +
                                     " appears in more than one group");
            }
            slot = static_cast<Index>(g);
        }
        std::sort(groups[g].begin(), groups[g].end());
    }
    out.members_ = std::move(groups);
    return out;
}

BlockStructure BlockStructure::singletons(Index m) { return uniform(m, 1); }

std::vector<Index> BlockStructure::group_sizes() const {
    std::vector<Index> sizes;
    sizes.reserve(members_.size());
    for (const auto& g : members_) sizes.push_back(static_cast<Index>(g.size()));
    return sizes;
}

bool BlockStructure::is_contiguous() const {
    for (const auto& g : members_) {
        if (g.back() - g.front() + 1 != static_cast<Index>(g.size())) return false;
    }
    return true;
}

Vector BlockStructure::expand(const Vector& per_group) const {
    if (per_group.size() != num_groups()) {
        throw StructureError("expected " + std::to_string(num_groups()) + " group values, got " +
                             std::to_string(per_group.size()));
    }
    Vector out(num_coefficients());
    for (Index j = 0; j < out.size(); ++j) out[j] = per_group[group_of(j)];
    return out;
}

BlockStructure BlockStructure::with_trailing_singletons(Index extra) const {
    auto groups = members_;
    const Index m = num_coefficients();
    for (Index k = 0; k < extra; ++k) groups.push_back({m + k});
    return from_groups(std::move(groups));
}

BlockStructure partition_uniform(Index m, Index block_len) {
    return BlockStructure::uniform(m, block_len);
}

void Problem::validate() const {
    if (A.rows() == 0 || A.cols() == 0) {
        throw StructureError("dictionary A is empty");
    }
    if (Y.cols() < 1) {
        throw StructureError("measurement matrix Y needs at least one column (L >= 1)");
    }
    if (Y.rows() != A.rows()) {
        throw StructureError("n mismatch: Y has " + std::to_string(Y.rows()) + " rows but A has " +
                             std::to_string(A.rows()));
    }
    if (blocks.num_coefficients() != A.cols()) {
        throw StructureError("m mismatch: A has " + std::to_string(A.cols()) +
                             " columns but the block partition covers " +
                             std::to_string(blocks.num_coefficients()));
    }
    if (!A.allFinite() || !Y.allFinite()) {
        throw StructureError("A and Y must contain only finite values");
    }
    if (truth) {
        if (truth->X.rows() != m() || truth->X.cols() != L()) {
            throw StructureError("ground-truth X must be m x L");
        }
        if (truth->E.rows() != n() || truth->E.cols() != L()) {
            throw StructureError("ground-truth E must be n x L");
        }
    }
}

}  // namespace rosbl
