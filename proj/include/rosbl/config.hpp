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

#include <filesystem>

#include <json.hpp>

#include "rosbl/baselines.hpp"
#include "rosbl/bench.hpp"
#include "rosbl/core.hpp"
#include "rosbl/solver.hpp"
#include "rosbl/synth.hpp"

namespace rosbl {

// JSON mirrors of the configuration types. Parsing is strict: unknown keys
// and wrong value types raise ParseError. Missing keys keep their defaults.
//
// Non-finite reals ("inf", "-inf") are accepted as strings where they make
// sense (SGNR/SONR); `null` for sonr_db disables outliers.

using json = nlohmann::json;

json load_json_file(const std::filesystem::path& path);

/// {"uniform": {"m": 160, "block_len": 8}} or {"groups": [[0, 1], [2, 3]]}.
BlockStructure blocks_from_json(const json& j);
json to_json(const BlockStructure& blocks);

SolverConfig solver_config_from_json(const json& j);
json to_json(const SolverConfig& config);

ProxConfig prox_config_from_json(const json& j);
json to_json(const ProxConfig& config);

SynthConfig synth_config_from_json(const json& j);
json to_json(const SynthConfig& config);

BenchSpec bench_spec_from_json(const json& j);
json to_json(const BenchSpec& spec);

json to_json(const Hyperparameters& hyper);

}  // namespace rosbl
