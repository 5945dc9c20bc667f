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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rosbl/baselines.hpp"
#include "rosbl/bench.hpp"
#include "rosbl/classify.hpp"
#include "rosbl/core.hpp"
#include "rosbl/solver.hpp"
#include "rosbl/synth.hpp"

namespace py = pybind11;
using namespace rosbl;

namespace {

std::vector<std::vector<Index>> groups_of(const BlockStructure& b) {
    std::vector<std::vector<Index>> out;
    for (Index g = 0; g < b.num_groups(); ++g) {
        const auto mem = b.members(g);
        out.emplace_back(mem.begin(), mem.end());
    }
    return out;
}

Problem make_problem(const Matrix& Y, const Matrix& A, const BlockStructure& blocks) {
    Problem p{Y, A, blocks, std::nullopt};
    p.validate();
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Robust block sparse Bayesian learning with outlier modelling";
    m.attr("__version__") = ROSBL_VERSION;

    py::register_exception<StructureError>(m, "StructureError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<BlockStructure>(m, "BlockStructure")
        .def_static("uniform", &BlockStructure::uniform, py::arg("m"), py::arg("block_len"))
        .def_static("from_groups", &BlockStructure::from_groups, py::arg("groups"))
        .def_static("singletons", &BlockStructure::singletons, py::arg("m"))
        .def_property_readonly("num_groups", &BlockStructure::num_groups)
        .def_property_readonly("num_coefficients", &BlockStructure::num_coefficients)
        .def("group_of", &BlockStructure::group_of)
        .def("groups", &groups_of)
        .def("__eq__", [](const BlockStructure& a, const BlockStructure& b) { return a == b; })
        .def("__repr__", [](const BlockStructure& b) {
            return "<BlockStructure groups=" + std::to_string(b.num_groups()) +
                   " coefficients=" + std::to_string(b.num_coefficients()) + ">";
        });
    m.def("partition_uniform", &partition_uniform, py::arg("m"), py::arg("block_len"));

    py::enum_<OutlierModel>(m, "OutlierModel")
        .value("TimeVarying", OutlierModel::TimeVarying)
        .value("Stationary", OutlierModel::Stationary)
        .value("None_", OutlierModel::None);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("outlier_model", &SolverConfig::outlier_model)
        .def_readwrite("max_iters", &SolverConfig::max_iters)
        .def_readwrite("tol", &SolverConfig::tol)
        .def_readwrite("learn_sigma2", &SolverConfig::learn_sigma2)
        .def_readwrite("sigma2_init", &SolverConfig::sigma2_init)
        .def_readwrite("gamma_floor", &SolverConfig::gamma_floor);

    py::class_<Hyperparameters>(m, "Hyperparameters")
        .def(py::init<>())
        .def(py::init([](Vector gamma, Matrix delta, double sigma2) {
                 return Hyperparameters{std::move(gamma), std::move(delta), sigma2};
             }),
             py::arg("gamma"), py::arg("delta"), py::arg("sigma2"))
        .def_readwrite("gamma", &Hyperparameters::gamma)
        .def_readwrite("delta", &Hyperparameters::delta)
        .def_readwrite("sigma2", &Hyperparameters::sigma2);

    py::class_<Estimate>(m, "Estimate")
        .def_readonly("X_hat", &Estimate::X_hat)
        .def_readonly("E_hat", &Estimate::E_hat)
        .def_readonly("hyper", &Estimate::hyper)
        .def_readonly("evidence_trace", &Estimate::evidence_trace)
        .def_readonly("iterations", &Estimate::iterations)
        .def_readonly("converged", &Estimate::converged);

    m.def("augment", &augment, py::arg("A"));
    m.def(
        "e_step",
        [](const Matrix& A_tilde, const Vector& y, const Vector& gamma_tilde, const Vector& delta, double sigma2) {
            auto post = e_step(A_tilde, y, gamma_tilde, delta, sigma2);
            return py::make_tuple(post.mu, post.sigma);
        },
        py::arg("A_tilde"), py::arg("y"), py::arg("gamma_tilde"), py::arg("delta"), py::arg("sigma2"),
        "Posterior mean and covariance of one augmented coefficient vector.");
    m.def("log_evidence", &log_evidence, py::arg("A_tilde"), py::arg("Y"), py::arg("hyper"), py::arg("blocks"));
    m.def(
        "fit",
        [](const Matrix& Y, const Matrix& A, const BlockStructure& blocks, const SolverConfig& config) {
            const Problem p = make_problem(Y, A, blocks);
            py::gil_scoped_release release;
            return fit(p, config);
        },
        py::arg("Y"), py::arg("A"), py::arg("blocks"), py::arg("config") = SolverConfig{});

    py::class_<ProxConfig>(m, "ProxConfig")
        .def(py::init<>())
        .def_readwrite("lambda_", &ProxConfig::lambda)
        .def_readwrite("max_iters", &ProxConfig::max_iters)
        .def_readwrite("tol", &ProxConfig::tol)
        .def_readwrite("step", &ProxConfig::step);
    m.def("block_soft_threshold", &block_soft_threshold, py::arg("v"), py::arg("blocks"), py::arg("tau"));
    m.def("group_lasso", &group_lasso, py::arg("A"), py::arg("y"), py::arg("blocks"),
          py::arg("config") = ProxConfig{});
    m.def("mmv_columnwise", &mmv_columnwise, py::arg("A"), py::arg("Y"), py::arg("blocks"),
          py::arg("config") = ProxConfig{});

    py::class_<SynthConfig>(m, "SynthConfig")
        .def(py::init<>())
        .def_readwrite("n", &SynthConfig::n)
        .def_readwrite("m", &SynthConfig::m)
        .def_readwrite("block_len", &SynthConfig::block_len)
        .def_readwrite("s", &SynthConfig::s)
        .def_readwrite("L", &SynthConfig::L)
        .def_readwrite("sgnr_db", &SynthConfig::sgnr_db)
        .def_readwrite("sonr_db", &SynthConfig::sonr_db)
        .def_readwrite("outlier_mode", &SynthConfig::outlier_mode)
        .def_readwrite("seed", &SynthConfig::seed);
    m.def(
        "generate",
        [](const SynthConfig& config) {
            const Problem p = generate(config);
            py::dict out;
            out["Y"] = p.Y;
            out["A"] = p.A;
            out["X"] = p.truth->X;
            out["E"] = p.truth->E;
            out["blocks"] = p.blocks;
            return out;
        },
        py::arg("config"), "Synthetic problem as a dict with Y, A, X, E and blocks.");
    m.def("relative_l2_error", &relative_l2_error, py::arg("X"), py::arg("X_hat"));

    py::class_<ClassDictionary>(m, "ClassDictionary")
        .def_readonly("A", &ClassDictionary::A)
        .def_readonly("blocks", &ClassDictionary::blocks)
        .def_readonly("labels", &ClassDictionary::labels)
        .def_readonly("permutation", &ClassDictionary::permutation);
    m.def("build_dictionary", &build_dictionary, py::arg("columns"), py::arg("labels"),
          py::arg("class_order") = std::nullopt);
    m.def(
        "classify",
        [](const ClassDictionary& dict, const Matrix& Y, const SolverConfig& config) {
            ClassificationResult r;
            {
                py::gil_scoped_release release;
                r = solve_and_classify(dict, Y, config);
            }
            return py::make_tuple(dict.labels[static_cast<std::size_t>(r.predicted)], r.residuals);
        },
        py::arg("dictionary"), py::arg("Y"), py::arg("config") = SolverConfig{},
        "Jointly recover the columns of Y and return (label, per-class residuals).");
}
