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

#include "rosbl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace rosbl {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Sufficient statistics of one measurement's posterior: everything the
// M-step and the evidence need, without the full covariance.
struct Moments {
    Vector mu;
    Vector second_moment;    // diag(Sigma) + mu^2
    double residual_energy;  // ||y - A_tilde mu||^2 + tr(A_tilde Sigma A_tilde^T)
    double log_evidence;
};

// Cholesky of C = A diag(gamma_tilde) A^T + diag(extra), where extra holds
// delta_i + sigma2 (or sigma2 alone without outliers), plus the diagonal
// quantities needed for posterior variances.
struct ColumnFactor {
    Eigen::LLT<Matrix> llt;
    Vector signal_quad;  // a_j^T C^{-1} a_j
    Vector cinv_diag;    // diag(C^{-1})
    double logdet = 0.0;
};

ColumnFactor factor_column(const Matrix& A, const Matrix& signal_cov, const Vector& extra_diag) {
    ColumnFactor f;
    Matrix C = signal_cov;
    C.diagonal() += extra_diag;
    f.llt.compute(C);
    if (f.llt.info() != Eigen::Success) {
        throw NumericalError("marginal covariance is not positive definite");
    }
    const auto L = f.llt.matrixL();
    f.logdet = 2.0 * L.nestedExpression().diagonal().array().log().sum();
    f.signal_quad = L.solve(A).colwise().squaredNorm().transpose();
    const Matrix Linv = L.solve(Matrix::Identity(C.rows(), C.cols()));
    f.cinv_diag = Linv.colwise().squaredNorm().transpose();
    return f;
}

Moments column_moments(const ColumnFactor& f, const Matrix& A, const Vector& y,
                       const Vector& gamma_tilde, const Vector* delta, double sigma2) {
    const Index m = A.cols();
    const Index n = A.rows();
    const Index dim = m + (delta ? n : 0);

    const Vector alpha = f.llt.solve(y);

    Moments out;
    out.mu.resize(dim);
    out.second_moment.resize(dim);
    out.mu.head(m) = gamma_tilde.cwiseProduct(A.transpose() * alpha);
    out.second_moment.head(m) =
        gamma_tilde - gamma_tilde.cwiseAbs2().cwiseProduct(f.signal_quad) + out.mu.head(m).cwiseAbs2();
    if (delta) {
        out.mu.tail(n) = delta->cwiseProduct(alpha);
        out.second_moment.tail(n) =
            *delta - delta->cwiseAbs2().cwiseProduct(f.cinv_diag) + out.mu.tail(n).cwiseAbs2();
    }

    // A_tilde mu = (C - sigma2 I) alpha, so the residual is sigma2 * alpha, and
    // tr(A_tilde Sigma A_tilde^T) = sigma2 (n - sigma2 tr C^{-1}).
    const double trace_cinv = f.cinv_diag.sum();
    out.residual_energy = sigma2 * sigma2 * alpha.squaredNorm() +
                          sigma2 * (static_cast<double>(n) - sigma2 * trace_cinv);
    out.log_evidence = -0.5 * (static_cast<double>(n) * kLog2Pi + f.logdet + y.dot(alpha));
    return out;
}

std::vector<Moments> all_moments(const Matrix& A, const Matrix& Y, const BlockStructure& blocks,
                                 const Hyperparameters& hyper, OutlierModel model) {
    const Index n = A.rows();
    const Index L = Y.cols();
    const Vector gamma_tilde = blocks.expand(hyper.gamma);
    const Matrix signal_cov = A * gamma_tilde.asDiagonal() * A.transpose();

    std::vector<Moments> out;
    out.reserve(static_cast<std::size_t>(L));
    std::optional<ColumnFactor> shared;
    for (Index i = 0; i < L; ++i) {
        Vector delta_i;
        Vector extra = Vector::Constant(n, hyper.sigma2);
        if (model != OutlierModel::None) {
            delta_i = hyper.delta.col(i);
            extra += delta_i;
        }
        // Without per-measurement outlier variances every column shares C.
        if (model == OutlierModel::TimeVarying || !shared) {
            shared = factor_column(A, signal_cov, extra);
        }
        out.push_back(column_moments(*shared, A, Y.col(i), gamma_tilde,
                                     model == OutlierModel::None ? nullptr : &delta_i, hyper.sigma2));
    }
    return out;
}

Hyperparameters update_from_moments(const std::vector<Moments>& moments, const BlockStructure& blocks,
                                    Index n, OutlierModel model, const SolverConfig& config,
                                    double sigma2_current) {
    const Index L = static_cast<Index>(moments.size());
    const Index G = blocks.num_groups();

    Hyperparameters out;
    out.gamma = Vector::Zero(G);
    for (Index g = 0; g < G; ++g) {
        double acc = 0.0;
        for (const auto& mo : moments) {
            for (Index j : blocks.members(g)) acc += mo.second_moment[j];
        }
        out.gamma[g] = std::max(acc / static_cast<double>(blocks.group_size(g) * L), config.gamma_floor);
    }

    if (model == OutlierModel::TimeVarying) {
        out.delta.resize(n, L);
        for (Index i = 0; i < L; ++i) {
            out.delta.col(i) = moments[static_cast<std::size_t>(i)]
                                   .second_moment.tail(n)
                                   .cwiseMax(config.gamma_floor);
        }
    } else if (model == OutlierModel::Stationary) {
        Vector row = Vector::Zero(n);
        for (const auto& mo : moments) row += mo.second_moment.tail(n);
        row /= static_cast<double>(L);
        row = row.cwiseMax(config.gamma_floor);
        out.delta = row.replicate(1, L);
    }

    if (config.learn_sigma2) {
        double acc = 0.0;
        for (const auto& mo : moments) acc += mo.residual_energy;
        out.sigma2 = std::max(acc / static_cast<double>(L * n), kSigma2Floor);
    } else {
        out.sigma2 = sigma2_current;
    }
    return out;
}

double max_relative_change(const Hyperparameters& before, const Hyperparameters& after, bool with_sigma2) {
    double worst = 0.0;
    auto visit = [&](double a, double b) {
        const double denom = std::max(std::abs(a), std::numeric_limits<double>::min());
        worst = std::max(worst, std::abs(b - a) / denom);
    };
    for (Index g = 0; g < before.gamma.size(); ++g) visit(before.gamma[g], after.gamma[g]);
    for (Index k = 0; k < before.delta.size(); ++k) visit(before.delta.data()[k], after.delta.data()[k]);
    if (with_sigma2) visit(before.sigma2, after.sigma2);
    return worst;
}

bool all_finite(const Hyperparameters& h) {
    return h.gamma.allFinite() && h.delta.allFinite() && std::isfinite(h.sigma2);
}

OutlierModel model_for_dictionary(const Matrix& A_tilde, const BlockStructure& blocks,
                                  OutlierModel requested) {
    const Index m = blocks.num_coefficients();
    if (A_tilde.cols() == m) return OutlierModel::None;
    if (A_tilde.cols() != m + A_tilde.rows()) {
        throw StructureError("dictionary has " + std::to_string(A_tilde.cols()) +
                             " columns; expected m=" + std::to_string(m) + " or m+n=" +
                             std::to_string(m + A_tilde.rows()));
    }
    if (requested == OutlierModel::None) {
        throw StructureError("outlier model 'none' requires the plain dictionary A");
    }
    return requested;
}

void check_posterior_inputs(const Vector& prior_var, double sigma2) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw NumericalError("sigma2 must be positive and finite");
    }
    if (!prior_var.allFinite()) {
        throw NumericalError("prior variances must be finite");
    }
    if ((prior_var.array() < 0.0).any()) {
        throw NumericalError("prior variances must be nonnegative");
    }
}

}  // namespace

std::string_view to_string(OutlierModel model) {
    switch (model) {
        case OutlierModel::TimeVarying: return "time_varying";
        case OutlierModel::Stationary: return "stationary";
        case OutlierModel::None: return "none";
    }
    return "unknown";
}

OutlierModel parse_outlier_model(std::string_view text) {
    if (text == "time_varying") return OutlierModel::TimeVarying;
    if (text == "stationary") return OutlierModel::Stationary;
    if (text == "none") return OutlierModel::None;
    throw ParseError("unknown outlier model '" + std::string(text) +
                     "' (expected time_varying, stationary or none)");
}

void SolverConfig::validate() const {
    if (max_iters < 1) throw StructureError("max_iters must be >= 1");
    if (!(tol > 0.0)) throw StructureError("tol must be > 0");
    if (!(gamma_floor > 0.0)) throw StructureError("gamma_floor must be > 0");
    if (sigma2_init && !(*sigma2_init > 0.0)) throw StructureError("sigma2_init must be > 0");
}

Matrix augment(const Matrix& A) {
    Matrix out(A.rows(), A.cols() + A.rows());
    out << A, Matrix::Identity(A.rows(), A.rows());
    return out;
}

Matrix working_dictionary(const Matrix& A, OutlierModel model) {
    return model == OutlierModel::None ? A : augment(A);
}

MeasurementPosterior e_step(const Matrix& A_tilde, const Vector& y, const Vector& gamma_tilde,
                            const Vector& delta, double sigma2) {
    const Index n = A_tilde.rows();
    if (y.size() != n) throw StructureError("measurement length does not match dictionary rows");
    if (gamma_tilde.size() + delta.size() != A_tilde.cols()) {
        throw StructureError("prior variance count does not match dictionary columns");
    }
    Vector prior(A_tilde.cols());
    prior << gamma_tilde, delta;
    check_posterior_inputs(prior, sigma2);
    if (!y.allFinite() || !A_tilde.allFinite()) throw NumericalError("non-finite measurement or dictionary");

    const Matrix AP = A_tilde * prior.asDiagonal();
    Matrix C = AP * A_tilde.transpose();
    C.diagonal().array() += sigma2;
    const Eigen::LLT<Matrix> llt(C);
    if (llt.info() != Eigen::Success) throw NumericalError("marginal covariance is not positive definite");

    // K = P A^T C^{-1}, an (m+n) x n gain.
    const Matrix K = llt.solve(AP).transpose();
    MeasurementPosterior out;
    out.mu = K * y;
    out.sigma = Matrix(prior.asDiagonal()) - K * AP;
    out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
    return out;
}

Posterior compute_posterior(const Matrix& A_tilde, const Matrix& Y, const Hyperparameters& hyper,
                            const BlockStructure& blocks) {
    const Vector gamma_tilde = blocks.expand(hyper.gamma);
    const bool has_outliers = A_tilde.cols() > blocks.num_coefficients();
    Posterior out;
    for (Index i = 0; i < Y.cols(); ++i) {
        const Vector delta = has_outliers ? Vector(hyper.delta.col(i)) : Vector();
        auto p = e_step(A_tilde, Y.col(i), gamma_tilde, delta, hyper.sigma2);
        out.mu.push_back(std::move(p.mu));
        out.sigma.push_back(std::move(p.sigma));
    }
    return out;
}

Hyperparameters m_step(const Posterior& posterior, const BlockStructure& blocks, const Matrix& Y,
                       const Matrix& A_tilde, const SolverConfig& config, double sigma2_current) {
    const OutlierModel model = model_for_dictionary(A_tilde, blocks, config.outlier_model);
    if (posterior.L() != Y.cols() || posterior.sigma.size() != posterior.mu.size()) {
        throw StructureError("posterior has " + std::to_string(posterior.L()) + " measurements, Y has " +
                             std::to_string(Y.cols()));
    }
    std::vector<Moments> moments;
    for (Index i = 0; i < posterior.L(); ++i) {
        const auto& mu = posterior.mu[static_cast<std::size_t>(i)];
        const auto& sigma = posterior.sigma[static_cast<std::size_t>(i)];
        if (mu.size() != A_tilde.cols() || sigma.rows() != A_tilde.cols()) {
            throw StructureError("posterior dimension does not match dictionary columns");
        }
        Moments mo;
        mo.mu = mu;
        mo.second_moment = sigma.diagonal() + mu.cwiseAbs2();
        mo.residual_energy = (Y.col(i) - A_tilde * mu).squaredNorm() +
                             (A_tilde * sigma * A_tilde.transpose()).trace();
        mo.log_evidence = 0.0;
        moments.push_back(std::move(mo));
    }
    return update_from_moments(moments, blocks, A_tilde.rows(), model, config, sigma2_current);
}

double log_evidence(const Matrix& A_tilde, const Matrix& Y, const Hyperparameters& hyper,
                    const BlockStructure& blocks) {
    const Index n = A_tilde.rows();
    const Vector gamma_tilde = blocks.expand(hyper.gamma);
    const bool has_outliers = A_tilde.cols() > blocks.num_coefficients();
    double total = 0.0;
    for (Index i = 0; i < Y.cols(); ++i) {
        Vector prior(A_tilde.cols());
        if (has_outliers) {
            prior << gamma_tilde, hyper.delta.col(i);
        } else {
            prior = gamma_tilde;
        }
        Matrix C = A_tilde * prior.asDiagonal() * A_tilde.transpose();
        C.diagonal().array() += hyper.sigma2;
        const Eigen::LLT<Matrix> llt(C);
        if (llt.info() != Eigen::Success) throw NumericalError("marginal covariance is not positive definite");
        const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
        total += -0.5 * (static_cast<double>(n) * kLog2Pi + logdet + Y.col(i).dot(llt.solve(Y.col(i))));
    }
    return total;
}

std::pair<Matrix, Matrix> extract_estimate(const Posterior& posterior, Index m, Index n) {
    const Index L = posterior.L();
    Matrix X = Matrix::Zero(m, L);
    Matrix E = Matrix::Zero(n, L);
    for (Index i = 0; i < L; ++i) {
        const auto& mu = posterior.mu[static_cast<std::size_t>(i)];
        if (mu.size() != m && mu.size() != m + n) {
            throw StructureError("posterior mean has length " + std::to_string(mu.size()) +
                                 "; expected m or m+n");
        }
        X.col(i) = mu.head(m);
        if (mu.size() == m + n) E.col(i) = mu.tail(n);
    }
    return {std::move(X), std::move(E)};
}

double initial_sigma2(const Matrix& Y, const SolverConfig& config) {
    if (config.sigma2_init) return *config.sigma2_init;
    const double scale = Y.squaredNorm() / static_cast<double>(Y.rows() * Y.cols());
    return std::max(1e-2 * scale, 1e-6);
}

std::vector<Index> pruned_groups(const Hyperparameters& hyper, double floor) {
    std::vector<Index> out;
    for (Index g = 0; g < hyper.gamma.size(); ++g) {
        if (hyper.gamma[g] <= floor) out.push_back(g);
    }
    return out;
}

Estimate fit(const Problem& problem, const SolverConfig& config) {
    problem.validate();
    config.validate();

    const Index n = problem.n();
    const Index m = problem.m();
    const Index L = problem.L();
    const OutlierModel model = config.outlier_model;

    Hyperparameters hyper;
    hyper.gamma = Vector::Ones(problem.blocks.num_groups());
    if (model != OutlierModel::None) hyper.delta = Matrix::Ones(n, L);
    hyper.sigma2 = initial_sigma2(problem.Y, config);

    Estimate est;
    for (int iter = 1; iter <= config.max_iters; ++iter) {
        const auto moments = all_moments(problem.A, problem.Y, problem.blocks, hyper, model);
        double evidence = 0.0;
        for (const auto& mo : moments) evidence += mo.log_evidence;
        est.evidence_trace.push_back(evidence);

        Hyperparameters next = update_from_moments(moments, problem.blocks, n, model, config, hyper.sigma2);
        if (!all_finite(next) || !std::isfinite(evidence)) {
            throw NumericalError("non-finite value at EM iteration " + std::to_string(iter));
        }
        const double change = max_relative_change(hyper, next, config.learn_sigma2);
        hyper = std::move(next);
        est.iterations = iter;
        if (change < config.tol) {
            est.converged = true;
            break;
        }
    }

    const auto moments = all_moments(problem.A, problem.Y, problem.blocks, hyper, model);
    double evidence = 0.0;
    est.X_hat.resize(m, L);
    est.E_hat = Matrix::Zero(n, L);
    for (Index i = 0; i < L; ++i) {
        const auto& mo = moments[static_cast<std::size_t>(i)];
        evidence += mo.log_evidence;
        est.X_hat.col(i) = mo.mu.head(m);
        if (model != OutlierModel::None) est.E_hat.col(i) = mo.mu.tail(n);
    }
    if (!std::isfinite(evidence) || !est.X_hat.allFinite()) {
        throw NumericalError("non-finite posterior after EM iteration " + std::to_string(est.iterations));
    }
    est.evidence_trace.push_back(evidence);
    est.hyper = std::move(hyper);
    return est;
}

}  // namespace rosbl
