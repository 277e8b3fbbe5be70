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
#include <sstream>

#include <Eigen/Cholesky>
#include <gtest/gtest.h>

#include "slra/errors.hpp"
#include "slra/gamma.hpp"
#include "test_support.hpp"

namespace slra {
namespace {

using testing::dense_gamma_reference;
using testing::random_matrix;
using testing::random_spd;
using testing::random_vector;
using testing::rel_err;
using testing::Rng;

GammaSystem build(const Structure& s, const WeightSpec& w, const Matrix& r, bool factor = true) {
  const auto vb = make_vblocks(s, w);
  GammaSystem gs = GammaSystem::build(*vb, r);
  if (factor) gs.factor();
  return gs;
}

Matrix tridiagonal() {
  return (Matrix(3, 3) << 2, -1, 0, -1, 2, -1, 0, -1, 2).finished();
}

TEST(BuildGamma, RunningExampleIsTridiagonal) {
  const GammaSystem gs = build(Structure(HankelStructure(2, 3)), WeightSpec::identity(4),
                               (Matrix(1, 2) << 1, -1).finished(), false);
  EXPECT_EQ(gs.dense(), tridiagonal());
  EXPECT_EQ(gs.bandwidth(), 2);
  EXPECT_TRUE(gs.is_toeplitz());
}

TEST(BuildGamma, FirstUnitKernelGivesIdentity) {
  for (Index m : {2, 3, 5}) {
    const Index n = 7;
    Matrix r = Matrix::Zero(1, m);
    r(0, 0) = 1.0;
    const GammaSystem gs = build(Structure(HankelStructure(m, n)), WeightSpec::identity(m + n - 1), r);
    EXPECT_EQ(gs.dense(), Matrix::Identity(n, n));
    EXPECT_EQ(gs.factor_dense(), Matrix::Identity(n, n));
  }
}

TEST(BuildGamma, FrobeniusWeightedRunningExample) {
  const Structure s(HankelStructure(2, 3));
  const WeightSpec w = WeightSpec::diagonal((Vector(4) << 1, 2, 2, 1).finished());
  const auto vb = make_vblocks(s, w);
  // V is the 6x6 block matrix with blocks W^{-1}(i:i+1, j:j+1).
  const Vector gamma = (Vector(4) << 1, 0.5, 0.5, 1).finished();
  const Matrix winv = gamma.asDiagonal();
  Matrix v(6, 6);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) v.block(2 * i, 2 * j, 2, 2) = winv.block(i, j, 2, 2);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) EXPECT_EQ(vb->block(i, j), v.block(2 * i, 2 * j, 2, 2));
  const Matrix r = (Matrix(1, 2) << 1, -1).finished();
  Matrix ir = Matrix::Zero(3, 6);
  for (Index j = 0; j < 3; ++j) ir.block(j, 2 * j, 1, 2) = r;
  EXPECT_LT((build(s, w, r, false).dense() - ir * v * ir.transpose()).norm(), 1e-15);
}

TEST(Factor, TridiagonalExample) {
  GammaSystem gs = build(Structure(HankelStructure(2, 3)), WeightSpec::identity(4),
                         (Matrix(1, 2) << 1, -1).finished());
  const Matrix l = gs.factor_dense();
  EXPECT_NEAR(l(0, 0), std::sqrt(2.0), 1e-15);
  EXPECT_LT((l * l.transpose() - tridiagonal()).norm(), 1e-14);
}

TEST(Factor, ZeroKernelIsSingular) {
  GammaSystem gs = build(Structure(HankelStructure(2, 3)), WeightSpec::identity(4), Matrix::Zero(1, 2), false);
  EXPECT_THROW(gs.factor(), SingularGamma);
}

TEST(Factor, SingularUnderFixedWeights) {
  // All parameters fixed: Gamma = 0.
  const Vector w = Vector::Constant(4, std::numeric_limits<double>::infinity());
  GammaSystem gs = build(Structure(HankelStructure(2, 3)), WeightSpec::diagonal(w),
                         (Matrix(1, 2) << 1, -1).finished(), false);
  EXPECT_THROW(gs.factor(), SingularGamma);
}

TEST(Solve, TridiagonalExample) {
  const GammaSystem gs = build(Structure(HankelStructure(2, 3)), WeightSpec::identity(4),
                               (Matrix(1, 2) << 1, -1).finished());
  const Vector v = -Vector::Ones(3);
  const Vector u = gs.solve(v);
  EXPECT_LT((u - (Vector(3) << -1.5, -2, -1.5).finished()).norm(), 1e-14);
  EXPECT_NEAR(gs.half_solve(v).squaredNorm(), 5.0, 1e-14);
}

TEST(Solve, IdentityGamma) {
  Matrix r = Matrix::Zero(1, 3);
  r(0, 0) = 1.0;
  const GammaSystem gs = build(Structure(HankelStructure(3, 6)), WeightSpec::identity(8), r);
  Rng rng(1);
  const Vector v = random_vector(rng, 6);
  EXPECT_EQ(gs.solve(v), v);
  EXPECT_EQ(gs.half_solve(v), v);
}

TEST(Solve, MatchesDenseOnRandomInstances) {
  Rng rng(2);
  for (int t = 0; t < 30; ++t) {
    const testing::WeightKind wk = static_cast<testing::WeightKind>(t % 3);
    testing::Instance inst = testing::random_instance(rng, t % 3, wk);
    const GammaSystem gs = build(inst.s, inst.w, inst.r);
    const Matrix dense = gs.dense();
    const Index nd = dense.rows();
    const Vector v = random_vector(rng, nd);
    const Vector u_ref = dense.llt().solve(v);
    EXPECT_LT(rel_err(gs.solve(v), u_ref), 1e-10) << inst.label;
    EXPECT_LT(rel_err(gs.half_solve(v).squaredNorm(), v.dot(gs.solve(v))), 1e-10);
    EXPECT_LT(rel_err(gs.multiply(v), dense * v), 1e-13);
    const Matrix l = gs.factor_dense();
    EXPECT_LT(rel_err(l * l.transpose(), dense), 1e-12);
    const Vector g = gs.half_solve(v);
    EXPECT_LT(rel_err(gs.half_solve_transpose(g), u_ref), 1e-10);
  }
}

TEST(Assembly, MatchesDenseReferenceAllKinds) {
  Rng rng(3);
  for (int t = 0; t < 60; ++t) {
    const auto wk = static_cast<testing::WeightKind>(t % 4);
    testing::Instance inst = testing::random_instance(rng, t % 3, wk);
    if (inst.s.cols() > 8 || inst.s.rows() > 5) continue;
    const Matrix ref = dense_gamma_reference(inst.s, inst.w.inverse(), inst.r);
    const Matrix got = build(inst.s, inst.w, inst.r, false).dense();
    EXPECT_LT((got - ref).norm(), 1e-12 * (1.0 + ref.norm())) << inst.label << " " << to_string(wk);
  }
}

TEST(VBlocks, ScalarHankelSubmatrixLaw) {
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const Index m = testing::uniform_int(rng, 1, 5);
    const Index n = testing::uniform_int(rng, 1, 8);
    const Index np = m + n - 1;
    const Matrix winv = random_spd(rng, np).inverse();
    const auto vb = make_vblocks(Structure(HankelStructure(m, n)), WeightSpec::from_inverse(winv));
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        EXPECT_LT((vb->block(i, j) - winv.block(i, j, m, m)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(VBlocks, IdentityWeightsGiveShiftPowers) {
  const Index m = 4;
  const auto vb = make_vblocks(Structure(HankelStructure(m, 9)), WeightSpec::identity(m + 8));
  const Matrix lt = shift_matrix(m).transpose();
  Matrix pw = Matrix::Identity(m, m);
  for (Index k = 0; k < m + 2; ++k) {
    for (Index i = 0; i + k < 9; ++i) EXPECT_EQ(vb->block(i, i + k), pw);
    pw = pw * lt;
  }
  EXPECT_TRUE(vb->all_toeplitz());
  EXPECT_EQ(vb->bandwidth(), m);
}

TEST(VBlocks, Symmetry) {
  Rng rng(5);
  const MosaicHankelStructure ms({2, 3}, {4, 3});
  Vector w(ms.num_params());
  for (Index i = 0; i < w.size(); ++i) w(i) = testing::uniform(rng, 0.5, 2.0);
  const auto vb = make_vblocks(Structure(ms), WeightSpec::diagonal(w));
  for (Index i = 0; i < ms.cols(); ++i)
    for (Index j = 0; j < ms.cols(); ++j) EXPECT_EQ(vb->block(i, j), vb->block(j, i).transpose());
}

TEST(VBlocks, LayeredDiagonalFormula) {
  Rng rng(6);
  const std::vector<Index> mv{2, 3, 1};
  const Index n = 6;
  const MosaicHankelStructure ms(mv, {n});
  Vector w(ms.num_params());
  for (Index i = 0; i < w.size(); ++i) w(i) = testing::uniform(rng, 0.5, 2.0);
  const auto vb = make_vblocks(Structure(ms), WeightSpec::diagonal(w));
  // diag(gamma^(k)_{i : i+m_k-1}) (Lambda_m^T)^{j-i} with Lambda_m block diagonal.
  Matrix lam = Matrix::Zero(6, 6);
  Index off = 0;
  for (Index mk : mv) {
    lam.block(off, off, mk, mk) = shift_matrix(mk);
    off += mk;
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) {
      Vector dg(6);
      Index row = 0;
      for (std::size_t k = 0; k < mv.size(); ++k) {
        const Index po = ms.param_offset(static_cast<Index>(k), 0);
        for (Index t = 0; t < mv[k]; ++t) dg(row++) = 1.0 / w(po + i + t);
      }
      Matrix pw = Matrix::Identity(6, 6);
      for (Index t = i; t < j; ++t) pw = pw * lam.transpose();
      EXPECT_LT((vb->block(i, j) - Matrix(dg.asDiagonal()) * pw).norm(), 1e-15);
    }
}

TEST(Properties, BandednessUnderDiagonalWeights) {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    std::vector<Index> mv;
    for (Index k = 0, q = testing::uniform_int(rng, 1, 3); k < q; ++k) mv.push_back(testing::uniform_int(rng, 1, 4));
    std::vector<Index> nv;
    for (Index l = 0, nb = testing::uniform_int(rng, 1, 3); l < nb; ++l) nv.push_back(testing::uniform_int(rng, 3, 9));
    const MosaicHankelStructure ms(mv, nv);
    Vector w(ms.num_params());
    for (Index i = 0; i < w.size(); ++i) w(i) = testing::uniform(rng, 0.5, 2.0);
    const Index d = testing::uniform_int(rng, 1, ms.rows());
    const GammaSystem gs = build(Structure(ms), WeightSpec::diagonal(w), random_matrix(rng, d, ms.rows()), false);
    const Index s = *std::max_element(mv.begin(), mv.end());
    const Matrix g = gs.dense();
    for (Index i = 0; i < ms.cols(); ++i)
      for (Index j = i + s; j < ms.cols(); ++j) EXPECT_EQ(g.block(i * d, j * d, d, d).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Properties, ToeplitzUnderBlockwiseWeights) {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    std::vector<Index> mv;
    for (Index k = 0, q = testing::uniform_int(rng, 1, 3); k < q; ++k) mv.push_back(testing::uniform_int(rng, 1, 4));
    const Index n = testing::uniform_int(rng, 4, 10);
    const MosaicHankelStructure ms(mv, {n});
    const Vector w = testing::blockwise_weights(rng, ms);
    const Index d = testing::uniform_int(rng, 1, ms.rows());
    const GammaSystem gs = build(Structure(ms), WeightSpec::diagonal(w), random_matrix(rng, d, ms.rows()), false);
    EXPECT_TRUE(gs.is_toeplitz());
    for (Index i = 0; i < n; ++i)
      for (Index j = i; j < n; ++j) EXPECT_EQ(gs.block(i, j), gs.block(0, j - i)) << i << "," << j;
  }
}

TEST(Properties, ElementwiseWeightsAreNotToeplitz) {
  Rng rng(9);
  const MosaicHankelStructure ms({2, 2}, {6});
  Vector w(ms.num_params());
  for (Index i = 0; i < w.size(); ++i) w(i) = testing::uniform(rng, 0.5, 2.0);
  const GammaSystem gs = build(Structure(ms), WeightSpec::diagonal(w), random_matrix(rng, 1, 4), false);
  EXPECT_FALSE(gs.is_toeplitz());
}

TEST(Properties, LayeredAdditivity) {
  Rng rng(10);
  for (int t = 0; t < 10; ++t) {
    const std::vector<Index> mv{testing::uniform_int(rng, 1, 3), testing::uniform_int(rng, 1, 3)};
    const Index n = testing::uniform_int(rng, 2, 7);
    const MosaicHankelStructure ms(mv, {n});
    Vector w(ms.num_params());
    for (Index i = 0; i < w.size(); ++i) w(i) = testing::uniform(rng, 0.5, 2.0);
    const Index d = testing::uniform_int(rng, 1, 2);
    const Matrix r = random_matrix(rng, d, ms.rows());
    const Matrix total = build(Structure(ms), WeightSpec::diagonal(w), r, false).dense();
    Matrix sum = Matrix::Zero(total.rows(), total.cols());
    Index row = 0;
    for (std::size_t k = 0; k < mv.size(); ++k) {
      const Index po = ms.param_offset(static_cast<Index>(k), 0);
      const Index len = mv[k] + n - 1;
      sum += build(Structure(HankelStructure(mv[k], n)), WeightSpec::diagonal(w.segment(po, len)),
                   r.middleCols(row, mv[k]), false)
                 .dense();
      row += mv[k];
    }
    EXPECT_LT(rel_err(total, sum), 1e-12);
  }
}

TEST(Properties, FullWeightsProviderMatchesReference) {
  Rng rng(11);
  const MosaicHankelStructure ms({2, 1}, {4, 3});
  const Matrix wm = random_spd(rng, ms.num_params());
  const Matrix r = random_matrix(rng, 2, 3);
  const WeightSpec w = WeightSpec::full(wm);
  const Matrix ref = dense_gamma_reference(Structure(ms), w.inverse(), r);
  EXPECT_LT(rel_err(build(Structure(ms), w, r, false).dense(), ref), 1e-12);
}

TEST(Properties, BandedInverseWeightsWidenBand) {
  // Tridiagonal W^{-1}: bandwidth grows by one.
  const Index m = 3;
  const Index n = 8;
  const Index np = m + n - 1;
  Matrix winv = 2.0 * Matrix::Identity(np, np);
  for (Index i = 0; i + 1 < np; ++i) winv(i, i + 1) = winv(i + 1, i) = 0.5;
  const auto vb = make_vblocks(Structure(HankelStructure(m, n)), WeightSpec::from_inverse(winv));
  EXPECT_EQ(vb->bandwidth(), m + 1);
  Rng rng(12);
  const Matrix r = random_matrix(rng, 1, m);
  const GammaSystem gs = GammaSystem::build(*vb, r);
  const Matrix ref = dense_gamma_reference(Structure(HankelStructure(m, n)), winv, r);
  EXPECT_LT(rel_err(gs.dense(), ref), 1e-12);
}

TEST(Toeplitz, SchurMatchesBandedCholesky) {
  Rng rng(13);
  for (int t = 0; t < 20; ++t) {
    const Index m = testing::uniform_int(rng, 2, 5);
    const Index n = testing::uniform_int(rng, 1, 40);
    const Index d = testing::uniform_int(rng, 1, m - 1);
    if (m + n - 1 < n * d) continue;
    const MosaicHankelStructure ms({m}, {n});
    const Vector w = testing::blockwise_weights(rng, ms);
    GammaSystem gs = build(Structure(ms), WeightSpec::diagonal(w), random_matrix(rng, d, m));
    ASSERT_TRUE(gs.is_toeplitz());
    const Matrix dense = gs.dense();
    const Matrix ref = dense.llt().matrixL();
    EXPECT_LT(rel_err(gs.factor_dense(), ref), 1e-10);
    const Matrix direct = block_toeplitz_cholesky(gs.generator(0), n, 1e-13);
    Matrix band = gs.segment_data()[0].band;
    band_cholesky(band, 1e-13);
    // The generator stops at min(bandwidth, n) blocks; deeper band rows are zero.
    ASSERT_LE(direct.rows(), band.rows());
    EXPECT_LT(rel_err(direct, Matrix(band.topRows(direct.rows()))), 1e-10);
    EXPECT_EQ(band.bottomRows(band.rows() - direct.rows()).cwiseAbs().sum(), 0.0);
  }
}

TEST(Toeplitz, EqualSegmentsShareFactor) {
  // Two column blocks of equal width and equal block-wise weights.
  const MosaicHankelStructure ms({3}, {6, 6});
  const GammaSystem gs = build(Structure(ms), WeightSpec::identity(ms.num_params()),
                               (Matrix(1, 3) << 1, -2, 0.5).finished());
  ASSERT_EQ(gs.segment_data().size(), 2u);
  EXPECT_EQ(gs.segment_data()[0].chol, gs.segment_data()[1].chol);
  const Matrix dense = gs.dense();
  EXPECT_LT(rel_err(gs.factor_dense() * gs.factor_dense().transpose(), dense), 1e-13);
}

TEST(Segments, MosaicColumnBlocksAreIndependent) {
  Rng rng(14);
  const MosaicHankelStructure ms({2}, {3, 4, 2});
  const auto vb = make_vblocks(Structure(ms), WeightSpec::identity(ms.num_params()));
  ASSERT_EQ(vb->segments().size(), 3u);
  EXPECT_EQ(vb->segments()[1].first, 3);
  EXPECT_EQ(vb->segments()[1].size, 4);
  EXPECT_EQ(vb->segment_of(3), 1);
  EXPECT_EQ(vb->block(2, 3), Matrix::Zero(2, 2));
}

TEST(DebugCsv, WritesUpperBand) {
  const GammaSystem gs = build(Structure(HankelStructure(2, 3)), WeightSpec::identity(4),
                               (Matrix(1, 2) << 1, -1).finished(), false);
  std::ostringstream os;
  gs.write_band_csv(os);
  EXPECT_EQ(os.str(), "block_row,block_col,g0_0\n0,0,2\n0,1,-1\n1,1,2\n1,2,-1\n2,2,2\n");
}

TEST(MakeVBlocks, RejectsPhi) {
  const Structure s(PhiComposedStructure(Matrix::Identity(2, 2), Structure(HankelStructure(2, 3))));
  EXPECT_THROW(make_vblocks(s, WeightSpec::identity(4)), ContractViolation);
}

TEST(BuildGamma, DimensionMismatch) {
  const auto vb = make_vblocks(Structure(HankelStructure(2, 3)), WeightSpec::identity(4));
  EXPECT_THROW(GammaSystem::build(*vb, Matrix::Ones(1, 3)), DimensionError);
}

}  // namespace
}  // namespace slra
