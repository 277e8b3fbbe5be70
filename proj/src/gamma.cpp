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

#include "slra/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>

#include <Eigen/Cholesky>

#include "slra/errors.hpp"

namespace slra {

// ---------------------------------------------------------------------------
// VBlocks

Matrix VBlocks::block(Index i, Index j) const {
  const Index m = block_size();
  Matrix out = Matrix::Zero(m, m);
  if (segment_of(i) != segment_of(j) || std::abs(i - j) >= bandwidth()) return out;
  const Matrix eye = Matrix::Identity(m, m);
  accumulate(i, j, eye, 1.0, out);
  return out;
}

Index VBlocks::segment_of(Index i) const {
  const auto& segs = segments();
  auto it = std::upper_bound(segs.begin(), segs.end(), i,
                             [](Index v, const Segment& s) { return v < s.first; });
  return static_cast<Index>(it - segs.begin()) - 1;
}

bool VBlocks::all_toeplitz() const {
  const auto& segs = segments();
  return std::all_of(segs.begin(), segs.end(), [](const Segment& s) { return s.toeplitz; });
}

namespace {

// Mosaic (and scalar) Hankel with diagonal weights. For i <= j, t = j - i:
//   V^{(i,j)} = diag(gamma window starting at i) (Lambda_m^T)^t
// layer by layer, so right multiplication is a scaled column shift.
class MosaicDiagonalVBlocks final : public VBlocks {
 public:
  MosaicDiagonalVBlocks(MosaicHankelStructure ms, Vector gamma)
      : ms_(std::move(ms)), gamma_(std::move(gamma)) {
    bandwidth_ = *std::max_element(ms_.m_vec().begin(), ms_.m_vec().end());
    for (Index l = 0; l < ms_.num_col_blocks(); ++l) {
      bool toeplitz = true;
      for (Index k = 0; k < ms_.num_row_blocks() && toeplitz; ++k) {
        const Index off = ms_.param_offset(k, l);
        const Index len = ms_.block_rows(k) + ms_.block_cols(l) - 1;
        for (Index t = 1; t < len; ++t)
          if (gamma_(off + t) != gamma_(off)) {
            toeplitz = false;
            break;
          }
      }
      segments_.push_back({ms_.col_offset(l), ms_.block_cols(l), toeplitz});
    }
  }

  Index block_size() const override { return ms_.rows(); }
  Index num_blocks() const override { return ms_.cols(); }
  Index bandwidth() const override { return bandwidth_; }
  const std::vector<Segment>& segments() const override { return segments_; }

  void accumulate(Index i, Index j, const ConstStridedRef& x, double alpha,
                  StridedRef out) const override {
    const Index l = ms_.col_block_of(i);
    const Index li = i - ms_.col_offset(l);
    const Index lj = j - ms_.col_offset(l);
    for (Index k = 0; k < ms_.num_row_blocks(); ++k) {
      const Index mk = ms_.block_rows(k);
      const Index ro = ms_.row_offset(k);
      const Index off = ms_.param_offset(k, l);
      if (li <= lj) {
        const Index t = lj - li;
        for (Index a = 0; a + t < mk; ++a) {
          const double g = gamma_(off + li + a + t);
          if (g != 0.0) out.col(ro + a) += (alpha * g) * x.col(ro + a + t);
        }
      } else {
        const Index t = li - lj;
        for (Index a = 0; a + t < mk; ++a) {
          const double g = gamma_(off + lj + a + t);
          if (g != 0.0) out.col(ro + a + t) += (alpha * g) * x.col(ro + a);
        }
      }
    }
  }

 private:
  MosaicHankelStructure ms_;
  Vector gamma_;
  Index bandwidth_ = 0;
  std::vector<Segment> segments_;
};

// Partition columns 0..n-1 into contiguous segments given that columns
// lo..hi are coupled for every (lo, hi) in `links`.
std::vector<Segment> contiguous_segments(Index n, const std::vector<std::pair<Index, Index>>& links) {
  std::vector<Index> reach(static_cast<std::size_t>(n));
  std::iota(reach.begin(), reach.end(), Index{0});
  for (const auto& [lo, hi] : links)
    reach[static_cast<std::size_t>(lo)] = std::max(reach[static_cast<std::size_t>(lo)], hi);
  std::vector<Segment> segs;
  Index start = 0;
  Index far = 0;
  for (Index c = 0; c < n; ++c) {
    far = std::max(far, reach[static_cast<std::size_t>(c)]);
    if (far == c) {
      segs.push_back({start, c - start + 1, false});
      start = c + 1;
      far = c + 1;
    }
  }
  return segs;
}

// Mosaic (and scalar) Hankel with a dense W^{-1}: V^{(i,j)} is the submatrix
// of W^{-1} picked by the parameter indices of columns i and j.
class MosaicDenseVBlocks final : public VBlocks {
 public:
  MosaicDenseVBlocks(MosaicHankelStructure ms, Matrix w_inv)
      : ms_(std::move(ms)), w_inv_(std::move(w_inv)) {
    const Index n = ms_.cols();
    const Index m = ms_.rows();
    index_.resize(m, n);
    for (Index l = 0; l < ms_.num_col_blocks(); ++l)
      for (Index jj = 0; jj < ms_.block_cols(l); ++jj)
        for (Index k = 0; k < ms_.num_row_blocks(); ++k)
          for (Index a = 0; a < ms_.block_rows(k); ++a)
            index_(ms_.row_offset(k) + a, ms_.col_offset(l) + jj) = ms_.param_offset(k, l) + jj + a;

    // Column range [lo, hi] in which each parameter appears.
    const Index np = ms_.num_params();
    std::vector<Index> lo(static_cast<std::size_t>(np)), hi(static_cast<std::size_t>(np));
    for (Index l = 0; l < ms_.num_col_blocks(); ++l)
      for (Index k = 0; k < ms_.num_row_blocks(); ++k) {
        const Index len = ms_.block_rows(k) + ms_.block_cols(l) - 1;
        for (Index t = 0; t < len; ++t) {
          const auto u = static_cast<std::size_t>(ms_.param_offset(k, l) + t);
          lo[u] = ms_.col_offset(l) + std::max<Index>(0, t - ms_.block_rows(k) + 1);
          hi[u] = ms_.col_offset(l) + std::min(ms_.block_cols(l) - 1, t);
        }
      }
    Index dist = 0;
    std::vector<std::pair<Index, Index>> links;
    for (Index v = 0; v < np; ++v)
      for (Index u = 0; u < np; ++u) {
        if (w_inv_(u, v) == 0.0) continue;
        const auto su = static_cast<std::size_t>(u);
        const auto sv = static_cast<std::size_t>(v);
        dist = std::max({dist, hi[sv] - lo[su], hi[su] - lo[sv]});
        links.emplace_back(std::min(lo[su], lo[sv]), std::max(hi[su], hi[sv]));
      }
    bandwidth_ = std::min(dist + 1, n);
    segments_ = contiguous_segments(n, links);
  }

  Index block_size() const override { return ms_.rows(); }
  Index num_blocks() const override { return ms_.cols(); }
  Index bandwidth() const override { return bandwidth_; }
  const std::vector<Segment>& segments() const override { return segments_; }

  void accumulate(Index i, Index j, const ConstStridedRef& x, double alpha,
                  StridedRef out) const override {
    const Index m = ms_.rows();
    Matrix sub(m, m);
    for (Index b = 0; b < m; ++b)
      for (Index a = 0; a < m; ++a) sub(a, b) = w_inv_(index_(a, i), index_(b, j));
    out.noalias() += alpha * (x * sub);
  }

 private:
  MosaicHankelStructure ms_;
  Matrix w_inv_;
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> index_;
  Index bandwidth_ = 0;
  std::vector<Segment> segments_;
};

// General affine structure: V^{(i,j)} = S_i W^{-1} S_j^T with S_i the rows
// of the vectorized basis belonging to column i. Blocks inside the band are
// precomputed.
class GeneralVBlocks final : public VBlocks {
 public:
  GeneralVBlocks(const GeneralAffineStructure& g, const WeightSpec& w) : m_(g.rows()), n_(g.cols()) {
    const bool diag = w.is_diagonal();
    const Matrix w_inv = diag ? Matrix() : w.inverse();
    const Vector& gamma = w.gamma();

    std::map<std::pair<Index, Index>, Matrix> blocks;
    Index dist = 0;
    std::vector<std::pair<Index, Index>> links;
    for (Index i = 0; i < n_; ++i) {
      const auto& ci = g.column_entries(i);
      for (Index j = i; j < n_; ++j) {
        const auto& cj = g.column_entries(j);
        Matrix v = Matrix::Zero(m_, m_);
        bool nonzero = false;
        for (const auto& e : ci)
          for (const auto& f : cj) {
            const double c = diag ? (e.param == f.param ? gamma(e.param) : 0.0)
                                  : w_inv(e.param, f.param);
            if (c == 0.0) continue;
            v(e.row, f.row) += e.value * f.value * c;
            nonzero = true;
          }
        if (nonzero && !v.isZero(0.0)) {
          dist = std::max(dist, j - i);
          links.emplace_back(i, j);
          blocks.emplace(std::make_pair(i, j), std::move(v));
        }
      }
    }
    bandwidth_ = dist + 1;
    segments_ = contiguous_segments(n_, links);

    band_.assign(static_cast<std::size_t>(n_ * bandwidth_), Matrix());
    for (auto& [key, v] : blocks)
      band_[static_cast<std::size_t>(key.first * bandwidth_ + key.second - key.first)] = std::move(v);
    for (auto& v : band_)
      if (v.size() == 0) v = Matrix::Zero(m_, m_);

    for (Segment& seg : segments_) {
      seg.toeplitz = true;
      for (Index t = 0; t < bandwidth_ && seg.toeplitz; ++t)
        for (Index i = seg.first + 1; i + t < seg.first + seg.size; ++i)
          if (stored(i, t) != stored(seg.first, t)) {
            seg.toeplitz = false;
            break;
          }
    }
  }

  Index block_size() const override { return m_; }
  Index num_blocks() const override { return n_; }
  Index bandwidth() const override { return bandwidth_; }
  const std::vector<Segment>& segments() const override { return segments_; }

  void accumulate(Index i, Index j, const ConstStridedRef& x, double alpha,
                  StridedRef out) const override {
    if (i <= j)
      out.noalias() += alpha * (x * stored(i, j - i));
    else
      out.noalias() += alpha * (x * stored(j, i - j).transpose());
  }

 private:
  const Matrix& stored(Index i, Index t) const {
    return band_[static_cast<std::size_t>(i * bandwidth_ + t)];
  }

  Index m_;
  Index n_;
  Index bandwidth_ = 1;
  std::vector<Segment> segments_;
  std::vector<Matrix> band_;
};

}  // namespace

std::unique_ptr<VBlocks> make_vblocks(const Structure& s, const WeightSpec& w) {
  if (w.size() != s.num_params()) throw DimensionError("weights and structure sizes differ");
  switch (s.kind()) {
    case StructureKind::hankel: {
      const auto& h = s.as<HankelStructure>();
      MosaicHankelStructure ms({h.rows()}, {h.cols()});
      if (w.is_diagonal()) return std::make_unique<MosaicDiagonalVBlocks>(std::move(ms), w.gamma());
      return std::make_unique<MosaicDenseVBlocks>(std::move(ms), w.inverse());
    }
    case StructureKind::mosaic: {
      const auto& ms = s.as<MosaicHankelStructure>();
      if (w.is_diagonal()) return std::make_unique<MosaicDiagonalVBlocks>(ms, w.gamma());
      return std::make_unique<MosaicDenseVBlocks>(ms, w.inverse());
    }
    case StructureKind::general:
      return std::make_unique<GeneralVBlocks>(s.as<GeneralAffineStructure>(), w);
    case StructureKind::phi:
      throw ContractViolation("Phi-composed structures are evaluated through their inner structure");
  }
  throw Error("unreachable structure kind");
}

// ---------------------------------------------------------------------------
// Band kernels

void band_cholesky(Matrix& band, double tol) {
  const Index n = band.cols();
  const Index p = band.rows() - 1;
  for (Index j = 0; j < n; ++j) {
    double ajj = band(0, j);
    if (!(ajj > tol))
      throw SingularGamma("Gamma is singular: pivot " + std::to_string(ajj) + " at row " +
                          std::to_string(j));
    ajj = std::sqrt(ajj);
    band(0, j) = ajj;
    const Index kn = std::min(p, n - 1 - j);
    if (kn == 0) continue;
    band.col(j).segment(1, kn) /= ajj;
    for (Index c = 1; c <= kn; ++c) {
      const double lc = band(c, j);
      if (lc == 0.0) continue;
      band.col(j + c).segment(0, kn - c + 1) -= lc * band.col(j).segment(c, kn - c + 1);
    }
  }
}

namespace {

void band_forward(const Matrix& chol, Eigen::Ref<Vector> x) {
  const Index n = chol.cols();
  const Index p = chol.rows() - 1;
  for (Index j = 0; j < n; ++j) {
    x(j) /= chol(0, j);
    const Index kn = std::min(p, n - 1 - j);
    if (kn > 0) x.segment(j + 1, kn) -= x(j) * chol.col(j).segment(1, kn);
  }
}

void band_backward(const Matrix& chol, Eigen::Ref<Vector> x) {
  const Index n = chol.cols();
  const Index p = chol.rows() - 1;
  for (Index j = n - 1; j >= 0; --j) {
    const Index kn = std::min(p, n - 1 - j);
    if (kn > 0) x(j) -= chol.col(j).segment(1, kn).dot(x.segment(j + 1, kn));
    x(j) /= chol(0, j);
  }
}

}  // namespace

Matrix block_toeplitz_cholesky(const std::vector<Matrix>& gen, Index n, double tol) {
  const Index d = gen.front().rows();
  const Index s = static_cast<Index>(gen.size());
  const Index w = std::min(s, n);
  const Index width = w * d;
  Matrix band = Matrix::Zero(s * d, n * d);

  Eigen::LLT<Matrix> llt(gen[0]);
  if (llt.info() != Eigen::Success) throw SingularGamma("Gamma is singular: leading block");
  const Matrix u0 = llt.matrixU();
  if (!(u0.diagonal().cwiseAbs2().minCoeff() > tol))
    throw SingularGamma("Gamma is singular: leading block pivot below tolerance");

  // Generator of the displacement Gamma - Z Gamma Z^T = P^T P - Q^T Q.
  Matrix top(d, width);
  for (Index k = 0; k < w; ++k) top.middleCols(k * d, d) = gen[static_cast<std::size_t>(k)];
  Matrix pos = u0.transpose().triangularView<Eigen::Lower>().solve(top);
  pos.leftCols(d) = u0;
  Matrix neg = pos;
  neg.leftCols(d).setZero();

  auto store_row_block = [&](Index k) {
    const Index limit = n * d;
    for (Index a = 0; a < d; ++a) {
      const Index c = k * d + a;
      for (Index t = 0; a + t < width && c + t < limit; ++t) band(t, c) = pos(a, a + t);
    }
  };
  store_row_block(0);

  for (Index k = 1; k < n; ++k) {
    // The positive generator moves with the window; the negative one moves
    // one block to the left relative to it.
    for (Index c = 0; c + d < width; ++c) neg.col(c) = neg.col(c + d);
    neg.rightCols(d).setZero();

    for (Index c = 0; c < d; ++c) {
      for (Index r = 0; r < d; ++r) {
        const double b = neg(r, c);
        if (b == 0.0) continue;
        const double a = pos(c, c);
        const double rho = b / a;
        if (!(std::abs(rho) < 1.0))
          throw SingularGamma("Gamma is singular: hyperbolic rotation breakdown at block " +
                              std::to_string(k));
        const double sq = std::sqrt((1.0 - rho) * (1.0 + rho));
        const Index len = width - c;
        pos.row(c).tail(len) = (pos.row(c).tail(len) - rho * neg.row(r).tail(len)) / sq;
        neg.row(r).tail(len) = sq * neg.row(r).tail(len) - rho * pos.row(c).tail(len);
      }
      if (!(pos(c, c) * pos(c, c) > tol))
        throw SingularGamma("Gamma is singular: pivot below tolerance at block " +
                            std::to_string(k));
    }
    store_row_block(k);
  }
  return band;
}

// ---------------------------------------------------------------------------
// GammaSystem

namespace {

void put_block(Matrix& band, Index li, Index lj, const Matrix& g) {
  // Gamma(lj*d + b, li*d + a) = g(a, b) for j >= i; keep the lower part.
  const Index d = g.rows();
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) {
      const Index r = lj * d + b;
      const Index c = li * d + a;
      if (r >= c) band(r - c, c) = g(a, b);
    }
}

double band_entry(const Matrix& band, Index r, Index c) {
  if (r < c) std::swap(r, c);
  if (r - c >= band.rows()) return 0.0;
  return band(r - c, c);
}

}  // namespace

GammaSystem GammaSystem::build(const VBlocks& vb, const Matrix& r) {
  if (r.cols() != vb.block_size())
    throw DimensionError("R must have as many columns as the structure has rows");
  GammaSystem gs;
  gs.d_ = r.rows();
  gs.n_ = vb.num_blocks();
  gs.s_ = vb.bandwidth();
  const Index d = gs.d_;
  const Index m = vb.block_size();

  Matrix rv(d, m);
  for (const Segment& seg : vb.segments()) {
    SegmentData sd;
    sd.seg = seg;
    sd.band = Matrix::Zero(gs.s_ * d, seg.size * d);
    if (seg.toeplitz) {
      const Index len = std::min(gs.s_, seg.size);
      for (Index k = 0; k < len; ++k) {
        rv.setZero();
        vb.accumulate(seg.first, seg.first + k, r, 1.0, rv);
        Matrix g = rv * r.transpose();
        if (k == 0) g = 0.5 * (g + g.transpose()).eval();
        sd.gen.push_back(std::move(g));
      }
      for (Index i = 0; i < seg.size; ++i)
        for (Index k = 0; k < len && i + k < seg.size; ++k)
          put_block(sd.band, i, i + k, sd.gen[static_cast<std::size_t>(k)]);
    } else {
      for (Index i = 0; i < seg.size; ++i)
        for (Index j = i; j < std::min(seg.size, i + gs.s_); ++j) {
          rv.setZero();
          vb.accumulate(seg.first + i, seg.first + j, r, 1.0, rv);
          put_block(sd.band, i, j, rv * r.transpose());
        }
    }
    gs.segs_.push_back(std::move(sd));
  }
  return gs;
}

bool GammaSystem::is_toeplitz() const {
  return !segs_.empty() &&
         std::all_of(segs_.begin(), segs_.end(), [](const SegmentData& s) { return s.seg.toeplitz; });
}

Matrix GammaSystem::block(Index i, Index j) const {
  Matrix out = Matrix::Zero(d_, d_);
  for (const SegmentData& sd : segs_) {
    const Index li = i - sd.seg.first;
    const Index lj = j - sd.seg.first;
    if (li < 0 || li >= sd.seg.size) continue;
    if (lj < 0 || lj >= sd.seg.size) return out;
    for (Index a = 0; a < d_; ++a)
      for (Index b = 0; b < d_; ++b) out(a, b) = band_entry(sd.band, li * d_ + a, lj * d_ + b);
    return out;
  }
  return out;
}

const std::vector<Matrix>& GammaSystem::generator(Index segment) const {
  const SegmentData& sd = segs_.at(static_cast<std::size_t>(segment));
  if (!sd.seg.toeplitz) throw ContractViolation("segment is not block-Toeplitz");
  return sd.gen;
}

Matrix GammaSystem::dense() const {
  Matrix out = Matrix::Zero(n_ * d_, n_ * d_);
  for (const SegmentData& sd : segs_) {
    const Index base = sd.seg.first * d_;
    const Index len = sd.seg.size * d_;
    for (Index c = 0; c < len; ++c)
      for (Index t = 0; t < sd.band.rows() && c + t < len; ++t) {
        out(base + c + t, base + c) = sd.band(t, c);
        out(base + c, base + c + t) = sd.band(t, c);
      }
  }
  return out;
}

Matrix GammaSystem::factor_dense() const {
  if (!factored_) throw ContractViolation("Gamma has not been factored");
  Matrix out = Matrix::Zero(n_ * d_, n_ * d_);
  for (const SegmentData& sd : segs_) {
    const Index base = sd.seg.first * d_;
    const Index len = sd.seg.size * d_;
    for (Index c = 0; c < len; ++c)
      for (Index t = 0; t < sd.chol.rows() && c + t < len; ++t)
        out(base + c + t, base + c) = sd.chol(t, c);
  }
  return out;
}

void GammaSystem::factor() {
  if (factored_) return;
  std::vector<std::size_t> order(segs_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return segs_[a].seg.size > segs_[b].seg.size;
  });

  std::vector<std::size_t> done;
  for (std::size_t idx : order) {
    SegmentData& sd = segs_[idx];
    const double max_diag = sd.band.row(0).cwiseAbs().maxCoeff();
    const double tol = 1e-13 * max_diag;
    if (!(max_diag > 0.0)) throw SingularGamma("Gamma is singular: zero diagonal");
    if (sd.seg.toeplitz) {
      // A leading principal submatrix has the leading part of the factor.
      const SegmentData* reuse = nullptr;
      for (std::size_t o : done)
        if (segs_[o].seg.toeplitz && segs_[o].gen == sd.gen) {
          reuse = &segs_[o];
          break;
        }
      if (reuse != nullptr) {
        const Index len = sd.seg.size * d_;
        sd.chol = reuse->chol.leftCols(len);
        for (Index c = 0; c < len; ++c)
          for (Index t = std::max<Index>(0, len - c); t < sd.chol.rows(); ++t) sd.chol(t, c) = 0.0;
      } else {
        sd.chol = block_toeplitz_cholesky(sd.gen, sd.seg.size, tol);
      }
    } else {
      sd.chol = sd.band;
      band_cholesky(sd.chol, tol);
    }
    done.push_back(idx);
  }
  factored_ = true;
}

Vector GammaSystem::half_solve(const Eigen::Ref<const Vector>& v) const {
  if (!factored_) throw ContractViolation("Gamma has not been factored");
  if (v.size() != n_ * d_) throw DimensionError("half_solve: length mismatch");
  Vector x = v;
  for (const SegmentData& sd : segs_)
    band_forward(sd.chol, x.segment(sd.seg.first * d_, sd.seg.size * d_));
  return x;
}

Vector GammaSystem::half_solve_transpose(const Eigen::Ref<const Vector>& g) const {
  if (!factored_) throw ContractViolation("Gamma has not been factored");
  if (g.size() != n_ * d_) throw DimensionError("half_solve_transpose: length mismatch");
  Vector x = g;
  for (const SegmentData& sd : segs_)
    band_backward(sd.chol, x.segment(sd.seg.first * d_, sd.seg.size * d_));
  return x;
}

Vector GammaSystem::solve(const Eigen::Ref<const Vector>& v) const {
  return half_solve_transpose(half_solve(v));
}

Vector GammaSystem::multiply(const Eigen::Ref<const Vector>& v) const {
  if (v.size() != n_ * d_) throw DimensionError("multiply: length mismatch");
  Vector out = Vector::Zero(v.size());
  for (const SegmentData& sd : segs_) {
    const Index base = sd.seg.first * d_;
    const Index len = sd.seg.size * d_;
    for (Index c = 0; c < len; ++c) {
      out(base + c) += sd.band(0, c) * v(base + c);
      for (Index t = 1; t < sd.band.rows() && c + t < len; ++t) {
        const double a = sd.band(t, c);
        out(base + c + t) += a * v(base + c);
        out(base + c) += a * v(base + c + t);
      }
    }
  }
  return out;
}

void GammaSystem::write_band_csv(std::ostream& os) const {
  os << "block_row,block_col";
  for (Index a = 0; a < d_; ++a)
    for (Index b = 0; b < d_; ++b) os << ",g" << a << '_' << b;
  os << '\n';
  const auto old_precision = os.precision(17);
  for (const SegmentData& sd : segs_)
    for (Index i = sd.seg.first; i < sd.seg.first + sd.seg.size; ++i)
      for (Index j = i; j < std::min(sd.seg.first + sd.seg.size, i + s_); ++j) {
        const Matrix g = block(i, j);
        os << i << ',' << j;
        for (Index a = 0; a < d_; ++a)
          for (Index b = 0; b < d_; ++b) os << ',' << g(a, b);
        os << '\n';
      }
  os.precision(old_precision);
}

}  // namespace slra
