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

#include "slra/oracle.hpp"

#include <cmath>
#include <string>

#include <Eigen/QR>

#include "slra/errors.hpp"

namespace slra {

DenseProblem make_dense_problem(const Structure& s, const WeightSpec& w, const Vector& p,
                                const Matrix& r, Index cap) {
  const Index m = s.rows();
  const Index n = s.cols();
  const Index np = s.num_params();
  if (m * n * np > cap)
    throw OracleError("dense oracle refused: m*n*np = " + std::to_string(m * n * np) +
                      " exceeds the cap " + std::to_string(cap));
  if (p.size() != np) throw DimensionError("p has the wrong length");
  if (w.size() != np) throw DimensionError("weights and structure sizes differ");
  if (r.cols() != m) throw DimensionError("R must have m columns");

  const GeneralAffineStructure g = to_general(s);
  DenseProblem dp;
  dp.m = m;
  dp.n = n;
  dp.smat = vec_map(g);
  dp.s0 = g.offset();
  dp.sqrt_w_inv.resize(np, np);
  for (Index k = 0; k < np; ++k) dp.sqrt_w_inv.col(k) = w.apply_sqrt_inv(Vector::Unit(np, k));
  dp.p = p;
  dp.r = r;
  return dp;
}

Matrix dense_G(const DenseProblem& dp) {
  const Index d = dp.r.rows();
  const Index np = dp.smat.cols();
  Matrix rs(d * dp.n, np);
  for (Index k = 0; k < np; ++k) {
    const Eigen::Map<const Matrix> sk(dp.smat.col(k).data(), dp.m, dp.n);
    const Matrix prod = dp.r * sk;
    rs.col(k) = Eigen::Map<const Vector>(prod.data(), prod.size());
  }
  return rs * dp.sqrt_w_inv;
}

DenseCost dense_cost(const DenseProblem& dp) {
  const Matrix g = dense_G(dp);
  const Vector sp = Eigen::Map<const Vector>(dp.s0.data(), dp.s0.size()) + dp.smat * dp.p;
  const Matrix rs = dp.r * Eigen::Map<const Matrix>(sp.data(), dp.m, dp.n);
  const Vector rhs = Eigen::Map<const Vector>(rs.data(), rs.size());

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(g);
  DenseCost out;
  out.dp_star = cod.solve(rhs);
  out.rank_g = cod.rank();
  const double resid = (g * out.dp_star - rhs).norm();
  const double scale = std::max(rhs.norm(), g.norm() * out.dp_star.norm());
  if (resid > 1e-8 * scale && resid > 1e-300)
    throw OracleError("constraint R S(p - dp) = 0 is infeasible: residual " + std::to_string(resid));
  out.f = out.dp_star.squaredNorm();
  return out;
}

Matrix dense_gradient_fd(const DenseProblem& dp, double h_scale) {
  Matrix grad(dp.r.rows(), dp.r.cols());
  DenseProblem probe = dp;
  for (Index j = 0; j < dp.r.cols(); ++j)
    for (Index i = 0; i < dp.r.rows(); ++i) {
      const double h = h_scale * (1.0 + std::abs(dp.r(i, j)));
      probe.r = dp.r;
      probe.r(i, j) += h;
      const double fp = dense_cost(probe).f;
      probe.r(i, j) = dp.r(i, j) - h;
      const double fm = dense_cost(probe).f;
      grad(i, j) = (fp - fm) / (2.0 * h);
    }
  return grad;
}

}  // namespace slra
