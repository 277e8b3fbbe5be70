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

#include <cmath>

#include <gtest/gtest.h>

#include "slra/errors.hpp"
#include "slra/oracle.hpp"
#include "slra/varpro.hpp"
#include "test_support.hpp"

namespace slra {
namespace {

using testing::random_matrix;
using testing::random_vector;
using testing::rel_err;
using testing::Rng;

TEST(DenseG, FrobeniusWeightedRunningExample) {
  const Structure s{HankelStructure(2, 3)};
  const WeightSpec w = WeightSpec::diagonal((Vector(4) << 1, 2, 2, 1).finished());
  const Matrix r = (Matrix(1, 2) << 1, -1).finished();
  const DenseProblem dp = make_dense_problem(s, w, Vector::Zero(4), r);
  // Rows [R1 R2 0 0; 0 R1 R2 0; 0 0 R1 R2] times diag(1, 1/sqrt2, 1/sqrt2, 1).
  const double h = 1.0 / std::sqrt(2.0);
  const Matrix expected = (Matrix(3, 4) << 1, -h, 0, 0,  //
                           0, h, -h, 0,                  //
                           0, 0, h, -1)
                              .finished();
  EXPECT_LT((dense_G(dp) - expected).norm(), 1e-15);
}

TEST(DenseG, HankelIdentityWeightsIsBanded) {
  Rng rng(1);
  const Index m = 4;
  const Index n = 6;
  const Matrix r = random_matrix(rng, 1, m);
  const DenseProblem dp = make_dense_problem(Structure(HankelStructure(m, n)), WeightSpec::identity(m + n - 1),
                                             Vector::Zero(m + n - 1), r);
  const Matrix g = dense_G(dp);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < m + n - 1; ++k) EXPECT_EQ(g(i, k), (k >= i && k < i + m) ? r(0, k - i) : 0.0);
}

TEST(DenseG, GeneralColumnsAreVecRSk) {
  Rng rng(2);
  const auto gs = testing::random_general(rng, 3, 4, 5);
  const Matrix r = random_matrix(rng, 2, 3);
  const DenseProblem dp = make_dense_problem(Structure(gs), WeightSpec::identity(5), Vector::Zero(5), r);
  const Matrix g = dense_G(dp);
  for (Index k = 0; k < 5; ++k) {
    Matrix sk = Matrix::Zero(3, 4);
    for (const Entry& e : gs.basis(k)) sk(e.row, e.col) += e.value;
    const Matrix rsk = r * sk;
    EXPECT_LT((g.col(k) - Eigen::Map<const Vector>(rsk.data(), rsk.size())).norm(), 1e-14);
  }
}

TEST(DenseCost, RunningExample) {
  const DenseProblem dp = make_dense_problem(Structure(HankelStructure(2, 3)), WeightSpec::identity(4),
                                             (Vector(4) << 1, 2, 3, 4).finished(),
                                             (Matrix(1, 2) << 1, -1).finished());
  const DenseCost c = dense_cost(dp);
  EXPECT_NEAR(c.f, 5.0, 1e-13);
  EXPECT_LT((c.dp_star - (Vector(4) << -1.5, -0.5, 0.5, 1.5).finished()).norm(), 1e-13);
  EXPECT_EQ(c.rank_g, 3);
}

TEST(DenseCost, ZeroResidual) {
  const DenseProblem dp = make_dense_problem(Structure(HankelStructure(2, 3)), WeightSpec::identity(4),
                                             (Vector(4) << 1, 2, 4, 8).finished(),
                                             (Matrix(1, 2) << 2, -1).finished());
  EXPECT_EQ(dense_cost(dp).f, 0.0);
}

TEST(DenseCost, RankDeficientConsistentUsesPseudoInverse) {
  // Two identical columns: G has rank 1 < 2 rows, and r lies in its range.
  const GeneralAffineStructure g(2, 2, {{{0, 0, 1.0}, {0, 1, 1.0}}, {{1, 0, 1.0}, {1, 1, 1.0}}});
  const Vector p = (Vector(2) << 1.0, 3.0).finished();
  const Matrix r = (Matrix(1, 2) << 1, -1).finished();
  const DenseCost c = dense_cost(make_dense_problem(Structure(g), WeightSpec::identity(2), p, r));
  EXPECT_EQ(c.rank_g, 1);
  EXPECT_TRUE(std::isfinite(c.f));
  // r = [-2, -2]; G = [1 -1; 1 -1]; least-norm dp = [-1, 1].
  EXPECT_LT((c.dp_star - (Vector(2) << -1, 1).finished()).norm(), 1e-13);
  EXPECT_NEAR(c.f, 2.0, 1e-13);
  // The banded route reports the singular Gamma instead.
  EXPECT_THROW(cost(Structure(g), WeightSpec::identity(2), p, r), SingularGamma);
}

TEST(DenseCost, InconsistentThrows) {
  // r = [1, 2] is not a multiple of the single column [1, 1] of G.
  const Matrix s0 = (Matrix(2, 2) << 0, 1, 0, 0).finished();
  const GeneralAffineStructure g0(2, 2, s0, {{{0, 0, 1.0}, {0, 1, 1.0}}});
  const DenseProblem dp = make_dense_problem(Structure(g0), WeightSpec::identity(1), Vector::Ones(1),
                                             (Matrix(1, 2) << 1, 0).finished());
  EXPECT_THROW(dense_cost(dp), OracleError);
}

TEST(DenseCost, MatchesBandedRoute) {
  Rng rng(3);
  for (int t = 0; t < 40; ++t) {
    testing::Instance inst = testing::random_instance(rng, t % 3, static_cast<testing::WeightKind>(t % 4));
    const DenseCost c = dense_cost(make_dense_problem(inst.s, inst.w, inst.p, inst.r));
    EXPECT_LT(rel_err(c.f, cost(inst.s, inst.w, inst.p, inst.r)), 1e-9) << inst.label;
    EXPECT_LT(rel_err(c.dp_star, correction(inst.s, inst.w, inst.p, inst.r)), 1e-8);
  }
}

TEST(DenseCost, RankDeficiencyIffSingularGamma) {
  Rng rng(4);
  for (int t = 0; t < 40; ++t) {
    testing::Instance inst = testing::random_instance(rng, t % 3, testing::WeightKind::fixed);
    // Every other instance gets a kernel that kills a column of S.
    if (t % 2 == 1) inst.r.setZero();
    const DenseProblem dp = make_dense_problem(inst.s, inst.w, inst.p, inst.r);
    const Index rows = dense_G(dp).rows();
    bool singular = false;
    try {
      cost(inst.s, inst.w, inst.p, inst.r);
    } catch (const SingularGamma&) {
      singular = true;
    }
    Index rank = 0;
    try {
      rank = dense_cost(dp).rank_g;
    } catch (const OracleError&) {
      rank = -1;
    }
    EXPECT_EQ(singular, rank != rows) << inst.label << " t=" << t;
  }
}

TEST(DenseGradientFd, MatchesAnalyticGradient) {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    testing::Instance inst = testing::random_instance(rng, t % 3, static_cast<testing::WeightKind>(t % 3));
    const Matrix fd = dense_gradient_fd(make_dense_problem(inst.s, inst.w, inst.p, inst.r));
    const Matrix g = gradient(inst.s, inst.w, inst.p, inst.r);
    EXPECT_LT((fd - g).norm(), 1e-5 * std::max(1.0, g.norm())) << inst.label;
  }
}

TEST(DenseGradientFd, SignFlip) {
  Rng rng(6);
  const testing::Instance inst = testing::random_instance(rng, 1, testing::WeightKind::identity);
  const Matrix r = inst.r.topRows(1);
  const Matrix a = dense_gradient_fd(make_dense_problem(inst.s, inst.w, inst.p, r));
  const Matrix b = dense_gradient_fd(make_dense_problem(inst.s, inst.w, inst.p, -r));
  EXPECT_LT((a + b).norm(), 1e-6 * std::max(1.0, a.norm()));
}

TEST(DenseGradientFd, ZeroAtZeroResidual) {
  const DenseProblem dp = make_dense_problem(Structure(HankelStructure(2, 3)), WeightSpec::identity(4),
                                             (Vector(4) << 1, 2, 4, 8).finished(),
                                             (Matrix(1, 2) << 2, -1).finished());
  EXPECT_LT(dense_gradient_fd(dp).norm(), 1e-8);
}

TEST(MakeDenseProblem, CapIsLoud) {
  EXPECT_THROW(make_dense_problem(Structure(HankelStructure(50, 100)), WeightSpec::identity(149),
                                  Vector::Zero(149), Matrix::Ones(1, 50), 10'000),
               OracleError);
}

}  // namespace
}  // namespace slra
