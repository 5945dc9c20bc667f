# Copyright 2026 The rosbl Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Robust block sparse Bayesian learning (Ro-SBL) for joint recovery under outliers."""

from ._core import (
    BlockStructure,
    ClassDictionary,
    Estimate,
    Hyperparameters,
    NumericalError,
    OutlierModel,
    ParseError,
    ProxConfig,
    SolverConfig,
    StructureError,
    SynthConfig,
    __version__,
    augment,
    block_soft_threshold,
    build_dictionary,
    classify,
    e_step,
    fit,
    generate,
    group_lasso,
    log_evidence,
    mmv_columnwise,
    partition_uniform,
    relative_l2_error,
)

__all__ = [
    "BlockStructure",
    "ClassDictionary",
    "Estimate",
    "Hyperparameters",
    "NumericalError",
    "OutlierModel",
    "ParseError",
    "ProxConfig",
    "SolverConfig",
    "StructureError",
    "SynthConfig",
    "__version__",
    "augment",
    "block_soft_threshold",
    "build_dictionary",
    "classify",
    "e_step",
    "fit",
    "generate",
    "group_lasso",
    "log_evidence",
    "mmv_columnwise",
    "partition_uniform",
    "relative_l2_error",
]
