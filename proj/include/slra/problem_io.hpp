// Copyright 2026 The slra Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

///
/// \file problem_io.hpp
///
/// JSON problem, result, benchmark-plan and conditioning-spec files.
/// Parsers throw InputError with the offending field path, e.g.
/// "structure.m_vec[1]: expected an integer >= 1".
///
/// Problem file:
///
///     {
///       "structure": {"kind": "hankel", "m": 2, "n": 3},
///       "p": [1, 2, 3, 4],
///       "rank": 1,
///       "w": [1, "inf", 1, 1],          // or "W": [[...]] or "Winv_band"
///       "R0": [[1, -1]],                // optional
///       "options": {"max_iter": 100}    // optional, SolverOptions names
///     }
///
/// Structure kinds:
///   {"kind": "hankel", "m": m, "n": n}
///   {"kind": "mosaic", "m_vec": [...], "n_vec": [...]}
///   {"kind": "general", "m": m, "n": n, "np": np, "S0": [[...]],
///    "basis": [[[row, col, value], ...], ...]}      (0-based indices)
///   {"kind": "phi", "phi": [[...]], "inner": {...}}
///
/// "Winv_band": {"bandwidth": b, "band": [d_0, ..., d_b]} where d_k holds the
/// k-th subdiagonal of W^{-1}: d_k[i] = Winv(i + k, i).
///
#ifndef SLRA_PROBLEM_IO_HPP
#define SLRA_PROBLEM_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "slra/analysis.hpp"
#include "slra/optimizer.hpp"
#include "slra/structure.hpp"
#include "slra/weights.hpp"

namespace slra {

struct Problem {
  Structure structure;
  WeightSpec weights;
  Vector p;
  Index rank;
  std::optional<Matrix> r0;
  SolverOptions options;
};

Problem parse_problem(const std::string& text);
Problem load_problem(const std::string& path);

/// Serializes a solve result (full double precision).
std::string result_to_json(const SolveResult& res, int indent = 2);

struct ResultFile {
  Matrix r_opt;
  Vector p_hat;
  double f_opt;
  std::string convergence_reason;
};
ResultFile parse_result(const std::string& text);

/// {"instances": [{"m_vec": [...], "n_vec": [...], "d": 1,
///                 "variant": "block_wise"}],
///  "family": {"name": "ex1", "k_max": 10, "variants": [...]},
///  "operations": ["cost", "gradient", "pseudo_jacobian"],
///  "reps": 5, "seed": 0}
BenchPlan parse_bench_plan(const std::string& text);

struct CondSpec {
  Matrix kernel;  // 1 x m
  std::vector<Index> n_list;
  double tol = 1e-6;
  int samples = 512;
};
/// {"roots": [[re, im], ...]} or {"R": [c_0, ..., c_L]}, plus
/// "n_list": [...] (or "n_min"/"n_max"/"n_step"), optional "tol", "samples".
CondSpec parse_cond_spec(const std::string& text);

/// Matrix from a JSON text array of rows.
Matrix parse_matrix_text(const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace slra

#endif  // SLRA_PROBLEM_IO_HPP
