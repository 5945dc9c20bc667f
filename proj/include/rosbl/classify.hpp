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
#include <string>
#include <vector>

#include "rosbl/core.hpp"
#include "rosbl/solver.hpp"

namespace rosbl {

/// Labelled dictionary with one contiguous block of columns per class.
struct ClassDictionary {
    Matrix A;                         // n x m, unit-norm columns
    BlockStructure blocks;            // group g = columns of class g
    std::vector<std::string> labels;  // class g's label
    std::vector<Index> permutation;   // column c of A is input column permutation[c]

    Index num_classes() const { return static_cast<Index>(labels.size()); }

    /// Indicator of the coefficients belonging to class k.
    Vector mask(Index k) const;

    /// Throws StructureError for an unknown label.
    Index class_index(const std::string& label) const;
};

/// Groups columns by label (stable, classes ordered by first appearance or
/// by `class_order` when given) and normalises every column.
ClassDictionary build_dictionary(const Matrix& columns, const std::vector<std::string>& labels,
                                 const std::optional<std::vector<std::string>>& class_order = std::nullopt);

/// sum_i ||y_i - A (mask_k .* x_i) - e_i||^2.
double class_residual(const ClassDictionary& dict, const Matrix& Y, const Matrix& X_hat, const Matrix& E_hat,
                      Index k);

Vector class_residuals(const ClassDictionary& dict, const Matrix& Y, const Matrix& X_hat, const Matrix& E_hat);

/// Class with the smallest residual; ties go to the lowest class index.
Index classify(const ClassDictionary& dict, const Matrix& Y, const Matrix& X_hat, const Matrix& E_hat);

/// A X_hat: the measurements with the outlier component removed.
Matrix reconstruct(const ClassDictionary& dict, const Matrix& X_hat);

/// Solve the joint recovery problem for one group of L test columns and classify it.
struct ClassificationResult {
    Index predicted = -1;
    Vector residuals;
    Estimate estimate;
};

ClassificationResult solve_and_classify(const ClassDictionary& dict, const Matrix& Y, const SolverConfig& config);

// Synthetic labelled data standing in for a face database.
//
// Every class k has a random centroid c_k and all classes share a common
// component c_0. A dictionary column or test column of class k is the
// unit-normalised draw   shared_weight * c_0 + c_k + spread * z,  z ~ N(0, I).
// Test columns are fresh draws, so they are not exact combinations of the
// class's dictionary columns. Outliers are Cauchy, scaled to sonr_db against
// the clean test columns; Gaussian noise is scaled to sgnr_db.
struct ClassSynthConfig {
    Index n = 80;
    Index classes = 10;
    Index per_class = 8;
    double shared_weight = 1.0;
    double spread = 2.0;
    double sgnr_db = 40.0;
    double sonr_db = 0.0;
    OutlierModel outlier_mode = OutlierModel::TimeVarying;
    std::uint64_t seed = 0;

    void validate() const;
};

struct LabeledColumns {
    Matrix columns;
    std::vector<std::string> labels;
};

struct ClassTestGroup {
    Matrix Y;          // n x L
    Matrix clean;      // n x L, before noise and outliers
    Index true_class;  // index into the dictionary's classes
};

class ClassSynthesizer {
public:
    explicit ClassSynthesizer(const ClassSynthConfig& config);

    const ClassDictionary& dictionary() const { return dict_; }
    const LabeledColumns& training() const { return training_; }

    /// Test group `index` with L columns; a pure function of (seed, index, L).
    ClassTestGroup test_group(std::uint64_t index, Index L) const;

private:
    ClassSynthConfig config_;
    Vector common_;
    std::vector<Vector> centroids_;
    LabeledColumns training_;
    ClassDictionary dict_;
};

}  // namespace rosbl
