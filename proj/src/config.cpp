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

#include "rosbl/config.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <set>
#include <string>

#include "rosbl/csv.hpp"

namespace rosbl {

namespace {

void require_object(const json& j, const char* what, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ParseError(std::string(what) + " must be a JSON object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items()) {
        if (!keys.count(key)) throw ParseError(std::string(what) + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get_as(const json& j, const char* key, const char* what) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(std::string(what) + ": bad value for '" + key + "'");
    }
}

double get_real(const json& j, const char* key, const char* what) {
    const json& v = j.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw ParseError(std::string(what) + ": '" + key + "' must be a number");
}

json real_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

Index get_index(const json& j, const char* key, const char* what) {
    const auto v = get_as<long long>(j, key, what);
    return static_cast<Index>(v);
}

}  // namespace

json load_json_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

BlockStructure blocks_from_json(const json& j) {
    constexpr const char* what = "block structure";
    require_object(j, what, {"uniform", "groups"});
    if (j.contains("uniform") == j.contains("groups")) {
        throw ParseError("block structure needs exactly one of 'uniform' or 'groups'");
    }
    if (j.contains("uniform")) {
        const json& u = j.at("uniform");
        require_object(u, "uniform block structure", {"m", "block_len"});
        return BlockStructure::uniform(get_index(u, "m", what), get_index(u, "block_len", what));
    }
    return BlockStructure::from_groups(get_as<std::vector<std::vector<Index>>>(j, "groups", what));
}

json to_json(const BlockStructure& blocks) {
    json groups = json::array();
    for (Index g = 0; g < blocks.num_groups(); ++g) {
        const auto mem = blocks.members(g);
        groups.push_back(std::vector<Index>(mem.begin(), mem.end()));
    }
    return json{{"groups", groups}};
}

SolverConfig solver_config_from_json(const json& j) {
    constexpr const char* what = "solver config";
    require_object(j, what, {"outlier_model", "max_iters", "tol", "learn_sigma2", "sigma2_init", "gamma_floor"});
    SolverConfig c;
    if (j.contains("outlier_model")) c.outlier_model = parse_outlier_model(get_as<std::string>(j, "outlier_model", what));
    if (j.contains("max_iters")) c.max_iters = get_as<int>(j, "max_iters", what);
    if (j.contains("tol")) c.tol = get_real(j, "tol", what);
    if (j.contains("learn_sigma2")) c.learn_sigma2 = get_as<bool>(j, "learn_sigma2", what);
    if (j.contains("sigma2_init")) {
        const json& v = j.at("sigma2_init");
        if (v.is_string() && v.get<std::string>() == "auto") {
            c.sigma2_init.reset();
        } else if (v.is_number()) {
            c.sigma2_init = v.get<double>();
        } else {
            throw ParseError("solver config: sigma2_init must be \"auto\" or a number");
        }
    }
    if (j.contains("gamma_floor")) c.gamma_floor = get_real(j, "gamma_floor", what);
    try {
        c.validate();
    } catch (const StructureError& e) {
        throw ParseError(std::string("solver config: ") + e.what());
    }
    return c;
}

json to_json(const SolverConfig& c) {
    return json{{"outlier_model", std::string(to_string(c.outlier_model))},
                {"max_iters", c.max_iters},
                {"tol", c.tol},
                {"learn_sigma2", c.learn_sigma2},
                {"sigma2_init", c.sigma2_init ? json(*c.sigma2_init) : json("auto")},
                {"gamma_floor", c.gamma_floor}};
}

ProxConfig prox_config_from_json(const json& j) {
    constexpr const char* what = "prox config";
    require_object(j, what, {"lambda", "max_iters", "tol", "step"});
    ProxConfig c;
    if (j.contains("lambda")) c.lambda = get_real(j, "lambda", what);
    if (j.contains("max_iters")) c.max_iters = get_as<int>(j, "max_iters", what);
    if (j.contains("tol")) c.tol = get_real(j, "tol", what);
    if (j.contains("step")) {
        const json& v = j.at("step");
        if (v.is_string() && v.get<std::string>() == "auto") {
            c.step.reset();
        } else if (v.is_number()) {
            c.step = v.get<double>();
        } else {
            throw ParseError("prox config: step must be \"auto\" or a number");
        }
    }
    try {
        c.validate();
    } catch (const StructureError& e) {
        throw ParseError(std::string("prox config: ") + e.what());
    }
    return c;
}

json to_json(const ProxConfig& c) {
    return json{{"lambda", c.lambda},
                {"max_iters", c.max_iters},
                {"tol", c.tol},
                {"step", c.step ? json(*c.step) : json("auto")}};
}

SynthConfig synth_config_from_json(const json& j) {
    constexpr const char* what = "synth config";
    require_object(j, what, {"n", "m", "block_len", "s", "L", "sgnr_db", "sonr_db", "outlier_mode", "seed"});
    SynthConfig c;
    if (j.contains("n")) c.n = get_index(j, "n", what);
    if (j.contains("m")) c.m = get_index(j, "m", what);
    if (j.contains("block_len")) c.block_len = get_index(j, "block_len", what);
    if (j.contains("s")) c.s = get_index(j, "s", what);
    if (j.contains("L")) c.L = get_index(j, "L", what);
    if (j.contains("sgnr_db")) c.sgnr_db = get_real(j, "sgnr_db", what);
    if (j.contains("sonr_db")) {
        if (j.at("sonr_db").is_null()) {
            c.sonr_db.reset();
        } else {
            c.sonr_db = get_real(j, "sonr_db", what);
        }
    }
    if (j.contains("outlier_mode")) c.outlier_mode = parse_outlier_model(get_as<std::string>(j, "outlier_mode", what));
    if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed", what);
    try {
        c.validate();
    } catch (const StructureError& e) {
        throw ParseError(std::string("synth config: ") + e.what());
    }
    return c;
}

json to_json(const SynthConfig& c) {
    return json{{"n", c.n},
                {"m", c.m},
                {"block_len", c.block_len},
                {"s", c.s},
                {"L", c.L},
                {"sgnr_db", real_to_json(c.sgnr_db)},
                {"sonr_db", c.sonr_db ? real_to_json(*c.sonr_db) : json(nullptr)},
                {"outlier_mode", std::string(to_string(c.outlier_mode))},
                {"seed", c.seed}};
}

BenchSpec bench_spec_from_json(const json& j) {
    constexpr const char* what = "bench spec";
    require_object(j, what,
                   {"synth", "s_values", "trials", "algorithms", "solver", "prox", "lambda_grid", "master_seed",
                    "fix_sigma2_to_truth", "baselines_on_augmented"});
    BenchSpec b;
    if (j.contains("synth")) b.synth = synth_config_from_json(j.at("synth"));
    if (j.contains("s_values")) b.s_values = get_as<std::vector<Index>>(j, "s_values", what);
    if (j.contains("trials")) b.trials = get_as<int>(j, "trials", what);
    if (j.contains("algorithms")) {
        b.algorithms.clear();
        for (const auto& a : get_as<std::vector<std::string>>(j, "algorithms", what)) {
            b.algorithms.push_back(parse_algorithm(a));
        }
    }
    if (j.contains("solver")) b.solver = solver_config_from_json(j.at("solver"));
    if (j.contains("prox")) b.prox = prox_config_from_json(j.at("prox"));
    if (j.contains("lambda_grid")) b.lambda_grid = get_as<std::vector<double>>(j, "lambda_grid", what);
    if (j.contains("master_seed")) b.master_seed = get_as<std::uint64_t>(j, "master_seed", what);
    if (j.contains("fix_sigma2_to_truth")) b.fix_sigma2_to_truth = get_as<bool>(j, "fix_sigma2_to_truth", what);
    if (j.contains("baselines_on_augmented")) {
        b.baselines_on_augmented = get_as<bool>(j, "baselines_on_augmented", what);
    }
    try {
        b.validate();
    } catch (const StructureError& e) {
        throw ParseError(std::string("bench spec: ") + e.what());
    }
    return b;
}

json to_json(const BenchSpec& b) {
    json algorithms = json::array();
    for (Algorithm a : b.algorithms) algorithms.push_back(std::string(to_string(a)));
    return json{{"synth", to_json(b.synth)},
                {"s_values", b.s_values},
                {"trials", b.trials},
                {"algorithms", algorithms},
                {"solver", to_json(b.solver)},
                {"prox", to_json(b.prox)},
                {"lambda_grid", b.lambda_grid},
                {"master_seed", b.master_seed},
                {"fix_sigma2_to_truth", b.fix_sigma2_to_truth},
                {"baselines_on_augmented", b.baselines_on_augmented}};
}

json to_json(const Hyperparameters& h) {
    json delta = json::array();
    for (Index r = 0; r < h.delta.rows(); ++r) {
        json jr = json::array();
        for (Index c = 0; c < h.delta.cols(); ++c) jr.push_back(h.delta(r, c));
        delta.push_back(std::move(jr));
    }
    return json{{"gamma", std::vector<double>(h.gamma.data(), h.gamma.data() + h.gamma.size())},
                {"delta", delta},
                {"sigma2", h.sigma2}};
}

}  // namespace rosbl
