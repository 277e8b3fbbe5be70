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
/// \file gamma.hpp
///
/// The Gram matrix Gamma(R) = G(R) G(R)^T of the inner least-norm problem.
///
/// Gamma is partitioned into d x d blocks Gamma^{(i,j)} = R V^{(i,j)} R^T,
/// where V^{(i,j)} are the m x m blocks of V = S W^{-1} S^T. The blocks
/// vanish for |i - j| >= bandwidth, so Gamma is block banded. Columns of the
/// structure that share no parameters split Gamma into independent diagonal
/// segments (one per column block of a mosaic Hankel structure).
///
#ifndef SLRA_GAMMA_HPP
#define SLRA_GAMMA_HPP

#include <iosfwd>
#include <memory>
#include <vector>

#include "slra/structure.hpp"
#include "slra/weights.hpp"

namespace slra {

using StridedRef = Eigen::Ref<Matrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
using ConstStridedRef =
    Eigen::Ref<const Matrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;

/// A run of consecutive block rows of Gamma that is decoupled from the rest.
struct Segment {
  Index first;     // first block index
  Index size;      // number of blocks
  bool toeplitz;   // V^{(i,j)} depends only on j - i inside the segment
};

/// Source of the V^{(i,j)} blocks. Implementations never need to form the
/// blocks explicitly; everything goes through right multiplication.
class VBlocks {
 public:
  virtual ~VBlocks() = default;

  /// m: size of each V block (rows of the structure).
  virtual Index block_size() const = 0;
  /// n: number of block rows (columns of the structure).
  virtual Index num_blocks() const = 0;
  /// V^{(i,j)} = 0 whenever |i - j| >= bandwidth().
  virtual Index bandwidth() const = 0;
  virtual const std::vector<Segment>& segments() const = 0;

  /// out += alpha * X * V^{(i,j)} for X with block_size() columns. Both
  /// blocks must lie in the same segment and |i - j| < bandwidth().
  virtual void accumulate(Index i, Index j, const ConstStridedRef& x, double alpha,
                          StridedRef out) const = 0;

  /// Dense V^{(i,j)} (zero outside the band or across segments).
  Matrix block(Index i, Index j) const;
  /// Segment index of block i.
  Index segment_of(Index i) const;
  bool all_toeplitz() const;
};

/// V blocks for a structure that is not Phi-composed. Hankel and mosaic
/// kinds use index arithmetic; general structures precompute the band.
std::unique_ptr<VBlocks> make_vblocks(const Structure& s, const WeightSpec& w);

/// Assembled and (optionally) factored Gamma(R).
///
/// Storage: each segment keeps the lower band of its part of Gamma in the
/// LAPACK "packed lower band" layout: with N = size*d scalar rows and
/// p = bandwidth*d - 1 subdiagonals, entry Gamma(r, c), c <= r <= c + p, lives
/// at band(r - c, c). The Cholesky factor L (Gamma = L L^T) overwrites a
/// copy of the band in the same layout, so each column of L below the
/// diagonal is contiguous.
class GammaSystem {
 public:
  GammaSystem() = default;

  static GammaSystem build(const VBlocks& vb, const Matrix& r);

  Index block_size() const { return d_; }
  Index num_blocks() const { return n_; }
  Index bandwidth() const { return s_; }
  bool is_toeplitz() const;
  bool factored() const { return factored_; }

  /// Gamma^{(i,j)} (d x d).
  Matrix block(Index i, Index j) const;
  /// Gamma_k for a Toeplitz segment (the generator), k = 0 .. bandwidth-1.
  const std::vector<Matrix>& generator(Index segment) const;
  Matrix dense() const;
  /// Dense Cholesky factor L with Gamma = L L^T.
  Matrix factor_dense() const;

  /// Banded Cholesky; block-Toeplitz segments use a generalized Schur
  /// algorithm and segments with equal generators share one factorization.
  /// Throws SingularGamma when a pivot drops below 1e-13 * max diag(Gamma).
  void factor();

  /// u with Gamma u = v.
  Vector solve(const Eigen::Ref<const Vector>& v) const;
  /// g with L g = v, so that ||g||^2 = v^T Gamma^{-1} v.
  Vector half_solve(const Eigen::Ref<const Vector>& v) const;
  /// v with L^T v = g (the second half of solve()).
  Vector half_solve_transpose(const Eigen::Ref<const Vector>& g) const;
  /// Gamma * v using the band.
  Vector multiply(const Eigen::Ref<const Vector>& v) const;

  /// CSV dump: block_row,block_col,then d*d entries row-major, for the
  /// upper block band (block_col >= block_row).
  void write_band_csv(std::ostream& os) const;

  struct SegmentData {
    Segment seg;
    Matrix band;                  // (bandwidth*d) x (size*d)
    Matrix chol;                  // same layout, factor L
    std::vector<Matrix> gen;      // Toeplitz generator, empty otherwise
  };
  const std::vector<SegmentData>& segment_data() const { return segs_; }

 private:
  Index d_ = 0;
  Index n_ = 0;
  Index s_ = 0;
  bool factored_ = false;
  std::vector<SegmentData> segs_;
};

/// In-place banded Cholesky of a packed lower band (see GammaSystem).
/// `tol` is the absolute pivot threshold.
void band_cholesky(Matrix& band, double tol);

/// Cholesky factor, in packed lower band layout, of the symmetric block
/// Toeplitz matrix with first block row [gen[0] gen[1] ... 0 ...] and n block
/// rows, computed in O(d^3 * gen.size() * n) by the generalized Schur
/// algorithm.
Matrix block_toeplitz_cholesky(const std::vector<Matrix>& gen, Index n, double tol);

}  // namespace slra

#endif  // SLRA_GAMMA_HPP
