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
/// \file optimizer.hpp
///
/// Levenberg-Marquardt minimization of the projected cost f(R) over kernels
/// R. Two parametrizations: R = [X -I_d] Pi^T with a fixed column
/// permutation (only X varies), or all entries of R with the rows
/// re-orthonormalized after every accepted step.
///
#ifndef SLRA_OPTIMIZER_HPP
#define SLRA_OPTIMIZER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slra/structure.hpp"
#include "slra/varpro.hpp"
#include "slra/weights.hpp"

namespace slra {

enum class Parametrization { stls_xi, full_r };
enum class HessianSource { pseudo_jacobian, jacobian_dp };

struct SolverOptions {
  Parametrization parametrization = Parametrization::stls_xi;
  int max_iter = 100;
  double grad_tol = 1e-8;
  double step_tol = 1e-12;
  double lm_lambda0 = 1e-3;
  double lm_up = 10.0;
  double lm_down = 0.1;
  HessianSource hessian_source = HessianSource::pseudo_jacobian;
  /// Number of starting points; the first is the SVD initialization, the
  /// rest are Gaussian random kernels drawn from `seed`.
  int multistart = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class StopReason { grad_tol, step_tol, max_iter, zero_cost };

std::string to_string(StopReason reason);

struct TraceEntry {
  int iter;
  double f;
  double grad_norm;
  double lambda;
  double step_norm;
};

struct SolveResult {
  Matrix r_opt;  // d x m kernel of S(p_hat)
  Vector p_hat;
  double f_opt = 0.0;
  int iterations = 0;
  StopReason reason = StopReason::max_iter;
  std::vector<TraceEntry> trace;
  /// sigma_{r+1}(S(p_hat)) / sigma_1(S(p_hat)).
  double rank_ratio = 0.0;
  bool rank_certified = false;
  /// Solved on the transposed structure (input had m > n).
  bool transposed = false;
};

struct Initialization {
  Matrix r0;          // d x m
  Permutation perm;   // column permutation Pi
};

/// R0 from the d smallest left singular vectors of S(p); Pi moves the d
/// columns picked by a column-pivoted QR of R0 to the end.
Initialization initialize(const Structure& s, const Vector& p, Index d);

/// Column permutation for a given kernel (same rule as initialize()).
Permutation kernel_permutation(const Matrix& r0);

/// Best rank-r approximation. If the structure has more rows than columns
/// the transposed problem is solved. `r0` overrides the SVD start.
SolveResult solve(const Structure& s, const WeightSpec& w, const Vector& p, Index rank,
                  const SolverOptions& opts = {}, const std::optional<Matrix>& r0 = std::nullopt);

/// Levenberg-Marquardt from a given kernel on an already oriented problem.
SolveResult minimize(const Evaluator& ev, const Matrix& r0, const SolverOptions& opts);

/// A scalar Hankel problem H_{m, np-m+1} of rank r is equivalent to
/// H_{r+1, np-r} of rank r (one-row kernel).
struct ReducedHankel {
  Index m;
  Index n;
  Index rank;
  Index d;
};
ReducedHankel reduce_hankel_rank(Index m, Index np, Index rank);

}  // namespace slra

#endif  // SLRA_OPTIMIZER_HPP
