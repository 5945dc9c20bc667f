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

#include "rosbl/classify.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rosbl/synth.hpp"

namespace rosbl {

namespace {

void check_shapes(const ClassDictionary& dict, const Matrix& Y, const Matrix& X_hat, const Matrix& E_hat) {
    const Index n = dict.A.rows();
    const Index m = dict.A.cols();
    if (Y.rows() != n) {
        throw StructureError("n mismatch: measurements have " + std::to_string(Y.rows()) +
                             " rows, dictionary has " + std::to_string(n));
    }
    if (X_hat.rows() != m || X_hat.cols() != Y.cols()) throw StructureError("X_hat must be m x L");
    if (E_hat.rows() != n || E_hat.cols() != Y.cols()) throw StructureError("E_hat must be n x L");
}

}  // namespace

Vector ClassDictionary::mask(Index k) const {
    if (k < 0 || k >= num_classes()) throw StructureError("unknown class index " + std::to_string(k));
    Vector phi = Vector::Zero(A.cols());
    for (Index j : blocks.members(k)) phi[j] = 1.0;
    return phi;
}

Index ClassDictionary::class_index(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw StructureError("unknown class label '" + label + "'");
    return static_cast<Index>(it - labels.begin());
}

ClassDictionary build_dictionary(const Matrix& columns, const std::vector<std::string>& labels,
                                 const std::optional<std::vector<std::string>>& class_order) {
    if (labels.empty()) throw StructureError("label list is empty");
    if (static_cast<Index>(labels.size()) != columns.cols()) {
        throw StructureError("got " + std::to_string(labels.size()) + " labels for " +
                             std::to_string(columns.cols()) + " dictionary columns");
    }

    std::vector<std::string> order;
    if (class_order) {
        order = *class_order;
    } else {
        for (const auto& l : labels) {
            if (std::find(order.begin(), order.end(), l) == order.end()) order.push_back(l);
        }
    }

    std::map<std::string, std::vector<Index>> by_class;
    for (std::size_t c = 0; c < labels.size(); ++c) by_class[labels[c]].push_back(static_cast<Index>(c));

    ClassDictionary dict;
    dict.labels = order;
    dict.A.resize(columns.rows(), columns.cols());
    std::vector<std::vector<Index>> groups;
    Index next = 0;
    for (const auto& label : order) {
        const auto it = by_class.find(label);
        if (it == by_class.end()) throw StructureError("class '" + label + "' has no dictionary columns");
        std::vector<Index> group;
        for (Index src : it->second) {
            const double norm = columns.col(src).norm();
            if (!(norm > 0.0)) {
                throw StructureError("dictionary column " + std::to_string(src) + " has zero norm");
            }
            dict.A.col(next) = columns.col(src) / norm;
            dict.permutation.push_back(src);
            group.push_back(next++);
        }
        groups.push_back(std::move(group));
        by_class.erase(it);
    }
    if (!by_class.empty()) {
        throw StructureError("label '" + by_class.begin()->first + "' is missing from the class order");
    }
    dict.blocks = BlockStructure::from_groups(std::move(groups));
    return dict;
}

double class_residual(const ClassDictionary& dict, const Matrix& Y, const Matrix& X_hat, const Matrix& E_hat,
                      Index k) {
    check_shapes(dict, Y, X_hat, E_hat);
    const Vector phi = dict.mask(k);
    const Matrix R = Y - dict.A * (phi.asDiagonal() * X_hat) - E_hat;
    return R.squaredNorm();
}

Vector class_residuals(const ClassDictionary& dict, const Matrix& Y, const Matrix& X_hat, const Matrix& E_hat) {
    Vector out(dict.num_classes());
    for (Index k = 0; k < out.size(); ++k) out[k] = class_residual(dict, Y, X_hat, E_hat, k);
    return out;
}

Index classify(const ClassDictionary& dict, const Matrix& Y, const Matrix& X_hat, const Matrix& E_hat) {
    const Vector r = class_residuals(dict, Y, X_hat, E_hat);
    Index best = 0;
    for (Index k = 1; k < r.size(); ++k) {
        if (r[k] < r[best]) best = k;
    }
    return best;
}

Matrix reconstruct(const ClassDictionary& dict, const Matrix& X_hat) {
    if (X_hat.rows() != dict.A.cols()) throw StructureError("X_hat must have m rows");
    return dict.A * X_hat;
}

ClassificationResult solve_and_classify(const ClassDictionary& dict, const Matrix& Y, const SolverConfig& config) {
    Problem p{Y, dict.A, dict.blocks, std::nullopt};
    ClassificationResult out;
    out.estimate = fit(p, config);
    out.residuals = class_residuals(dict, Y, out.estimate.X_hat, out.estimate.E_hat);
    out.predicted = classify(dict, Y, out.estimate.X_hat, out.estimate.E_hat);
    return out;
}

void ClassSynthConfig::validate() const {
    if (n < 1 || classes < 1 || per_class < 1) throw StructureError("class synthesizer needs positive sizes");
    if (!(spread >= 0.0) || !(shared_weight >= 0.0)) throw StructureError("weights must be >= 0");
}

namespace {

Vector draw_member(const Vector& common, const Vector& centroid, double shared, double spread, Rng& rng) {
    Vector v = shared * common + centroid + spread * sample_normal(common.size(), 1, rng);
    return v / v.norm();
}

}  // namespace

ClassSynthesizer::ClassSynthesizer(const ClassSynthConfig& config) : config_(config) {
    config_.validate();
    Rng rng(config_.seed);
    common_ = sample_normal(config_.n, 1, rng);
    for (Index k = 0; k < config_.classes; ++k) centroids_.push_back(sample_normal(config_.n, 1, rng));

    training_.columns.resize(config_.n, config_.classes * config_.per_class);
    for (Index k = 0; k < config_.classes; ++k) {
        for (Index j = 0; j < config_.per_class; ++j) {
            training_.columns.col(k * config_.per_class + j) =
                draw_member(common_, centroids_[static_cast<std::size_t>(k)], config_.shared_weight,
                            config_.spread, rng);
            training_.labels.push_back("class" + std::to_string(k));
        }
    }
    dict_ = build_dictionary(training_.columns, training_.labels);
}

ClassTestGroup ClassSynthesizer::test_group(std::uint64_t index, Index L) const {
    if (L < 1) throw StructureError("test group needs L >= 1");
    Rng rng(mix_seed(config_.seed ^ mix_seed(index)));
    ClassTestGroup out;
    out.true_class = static_cast<Index>(rng.below(static_cast<std::uint64_t>(config_.classes)));
    out.clean.resize(config_.n, L);
    for (Index i = 0; i < L; ++i) {
        out.clean.col(i) = draw_member(common_, centroids_[static_cast<std::size_t>(out.true_class)],
                                       config_.shared_weight, config_.spread, rng);
    }
    Matrix V = scale_to_ratio(out.clean, sample_normal(config_.n, L, rng), config_.sgnr_db);
    Matrix E = Matrix::Zero(config_.n, L);
    if (config_.outlier_mode == OutlierModel::TimeVarying) {
        E = scale_to_ratio(out.clean, sample_cauchy(config_.n, L, rng), config_.sonr_db);
    } else if (config_.outlier_mode == OutlierModel::Stationary) {
        E = scale_to_ratio(out.clean, sample_cauchy(config_.n, 1, rng).replicate(1, L), config_.sonr_db);
    }
    out.Y = out.clean + V + E;
    return out;
}

}  // namespace rosbl
