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
/// \file oracle.hpp
///
/// Dense reference computations. Everything here forms G(R) explicitly and
/// uses orthogonal factorizations; it shares no code with the banded path
/// beyond structure evaluation. Meant for tests and small problems only.
///
#ifndef SLRA_ORACLE_HPP
#define SLRA_ORACLE_HPP

#include "slra/structure.hpp"
#include "slra/weights.hpp"

namespace slra {

inline constexpr Index kDefaultOracleCap = 1'000'000;

struct DenseProblem {
  Index m = 0;
  Index n = 0;
  Matrix smat;        // mn x np
  Matrix s0;          // m x n
  Matrix sqrt_w_inv;  // np x np
  Vector p;
  Matrix r;           // d x m
};

/// Throws OracleError when m*n*np exceeds `cap`.
DenseProblem make_dense_problem(const Structure& s, const WeightSpec& w, const Vector& p,
                                const Matrix& r, Index cap = kDefaultOracleCap);

/// G(R) = (I_n (x) R) S sqrt(W)^{-1}, nd x np.
Matrix dense_G(const DenseProblem& dp);

struct DenseCost {
  double f = 0.0;
  Vector dp_star;
  Index rank_g = 0;  // numerical rank of G(R)
};

/// Least-norm solution of G dp = vec(R S(p)) by a complete orthogonal
/// decomposition, so rank-deficient but consistent systems are handled.
/// Throws OracleError when the system is inconsistent.
DenseCost dense_cost(const DenseProblem& dp);

/// Central differences of dense_cost with step h_scale * (1 + |R_ij|).
Matrix dense_gradient_fd(const DenseProblem& dp, double h_scale = 1e-6);

}  // namespace slra

#endif  // SLRA_ORACLE_HPP
