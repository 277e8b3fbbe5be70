# Copyright 2026 The slra Authors.
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

"""Structured low-rank approximation by variable projection."""

try:
    from . import _slra
except ImportError:  # in-tree build: the extension sits next to the package
    import _slra


Structure = _slra.Structure
Weights = _slra.Weights
Evaluator = _slra.Evaluator
SolverOptions = _slra.SolverOptions
SolveResult = _slra.SolveResult

hankel = _slra.hankel
mosaic = _slra.mosaic
general = _slra.general
phi = _slra.phi
solve = _slra.solve
dense_cost = _slra.dense_cost
kernel_from_roots = _slra.kernel_from_roots
gf_bounds = _slra.gf_bounds
kappa_growth = _slra.kappa_growth
loglog_slope = _slra.loglog_slope

SlraError = _slra.SlraError
InputError = _slra.InputError
NecessaryConditionError = _slra.NecessaryConditionError
DimensionError = _slra.DimensionError
SingularGamma = _slra.SingularGamma
ContractViolation = _slra.ContractViolation
OracleError = _slra.OracleError

__all__ = [
    "Structure", "Weights", "Evaluator", "SolverOptions", "SolveResult",
    "hankel", "mosaic", "general", "phi", "solve", "dense_cost",
    "kernel_from_roots", "gf_bounds", "kappa_growth", "loglog_slope",
    "SlraError", "InputError", "NecessaryConditionError", "DimensionError",
    "SingularGamma", "ContractViolation", "OracleError",
]
