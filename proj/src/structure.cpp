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

#include "slra/structure.hpp"

#include <algorithm>
#include <string>

#include <Eigen/QR>

#include "slra/errors.hpp"

namespace slra {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(Index v, const char* what) {
  if (v <= 0) throw InputError(std::string(what) + " must be positive");
}

}  // namespace

// ---------------------------------------------------------------------------
// GeneralAffineStructure

GeneralAffineStructure::GeneralAffineStructure(Index m, Index n, Matrix s0,
                                               std::vector<std::vector<Entry>> basis)
    : m_(m), n_(n), s0_(std::move(s0)), basis_(std::move(basis)) {
  require_positive(m, "row count");
  require_positive(n, "column count");
  if (s0_.rows() != m || s0_.cols() != n) throw DimensionError("S0 must be m x n");
  columns_.resize(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    for (const Entry& e : basis_[k]) {
      if (e.row < 0 || e.row >= m || e.col < 0 || e.col >= n)
        throw DimensionError("basis entry outside the m x n range");
      columns_[static_cast<std::size_t>(e.col)].push_back({e.row, static_cast<Index>(k), e.value});
    }
  }
}

GeneralAffineStructure::GeneralAffineStructure(Index m, Index n,
                                               std::vector<std::vector<Entry>> basis)
    : GeneralAffineStructure(m, n, Matrix::Zero(m, n), std::move(basis)) {}

// ---------------------------------------------------------------------------
// HankelStructure

HankelStructure::HankelStructure(Index m, Index n) : m_(m), n_(n) {
  require_positive(m, "Hankel row count");
  require_positive(n, "Hankel column count");
}

// ---------------------------------------------------------------------------
// MosaicHankelStructure

MosaicHankelStructure::MosaicHankelStructure(std::vector<Index> m_vec, std::vector<Index> n_vec)
    : m_vec_(std::move(m_vec)), n_vec_(std::move(n_vec)) {
  if (m_vec_.empty() || n_vec_.empty()) throw InputError("mosaic needs q, N >= 1");
  for (Index v : m_vec_) require_positive(v, "mosaic m_k");
  for (Index v : n_vec_) require_positive(v, "mosaic n_l");

  row_offset_.assign(1, 0);
  for (Index v : m_vec_) row_offset_.push_back(row_offset_.back() + v);
  col_offset_.assign(1, 0);
  for (Index v : n_vec_) col_offset_.push_back(col_offset_.back() + v);

  param_offset_.assign(1, 0);
  for (Index nl : n_vec_)
    for (Index mk : m_vec_) param_offset_.push_back(param_offset_.back() + mk + nl - 1);

  col_block_.resize(static_cast<std::size_t>(cols()));
  for (std::size_t l = 0; l < n_vec_.size(); ++l)
    for (Index j = col_offset_[l]; j < col_offset_[l + 1]; ++j)
      col_block_[static_cast<std::size_t>(j)] = static_cast<Index>(l);
}

Index MosaicHankelStructure::col_block_of(Index j) const {
  return col_block_[static_cast<std::size_t>(j)];
}

// ---------------------------------------------------------------------------
// PhiComposedStructure / Structure

PhiComposedStructure::PhiComposedStructure(Matrix phi, Structure inner)
    : phi_(std::move(phi)), inner_(std::make_shared<const Structure>(std::move(inner))) {
  if (phi_.cols() != inner_->rows())
    throw DimensionError("Phi must have as many columns as the inner structure has rows");
  if (phi_.rows() > phi_.cols()) throw DimensionError("Phi must have full row rank (m <= m')");
  if (Eigen::ColPivHouseholderQR<Matrix>(phi_).rank() < phi_.rows())
    throw InputError("Phi must have full row rank");
}

Index PhiComposedStructure::cols() const { return inner_->cols(); }
Index PhiComposedStructure::num_params() const { return inner_->num_params(); }

Index Structure::rows() const {
  return std::visit([](const auto& s) { return s.rows(); }, impl_);
}
Index Structure::cols() const {
  return std::visit([](const auto& s) { return s.cols(); }, impl_);
}
Index Structure::num_params() const {
  return std::visit([](const auto& s) { return s.num_params(); }, impl_);
}

// ---------------------------------------------------------------------------
// Free functions

Matrix shift_matrix(Index m) {
  Matrix lambda = Matrix::Zero(m, m);
  for (Index i = 0; i + 1 < m; ++i) lambda(i, i + 1) = 1.0;
  return lambda;
}

Matrix vec_map(const GeneralAffineStructure& s) {
  Matrix out = Matrix::Zero(s.rows() * s.cols(), s.num_params());
  for (Index k = 0; k < s.num_params(); ++k)
    for (const Entry& e : s.basis(k)) out(e.col * s.rows() + e.row, k) += e.value;
  return out;
}

GeneralAffineStructure hankel_as_general(const HankelStructure& h) {
  std::vector<std::vector<Entry>> basis(static_cast<std::size_t>(h.num_params()));
  for (Index j = 0; j < h.cols(); ++j)
    for (Index i = 0; i < h.rows(); ++i)
      basis[static_cast<std::size_t>(i + j)].push_back({i, j, 1.0});
  return GeneralAffineStructure(h.rows(), h.cols(), std::move(basis));
}

GeneralAffineStructure to_general(const Structure& s) {
  return std::visit(
      Overloaded{
          [](const GeneralAffineStructure& g) { return g; },
          [](const HankelStructure& h) { return hankel_as_general(h); },
          [](const MosaicHankelStructure& ms) {
            std::vector<std::vector<Entry>> basis(static_cast<std::size_t>(ms.num_params()));
            for (Index l = 0; l < ms.num_col_blocks(); ++l)
              for (Index k = 0; k < ms.num_row_blocks(); ++k) {
                const Index off = ms.param_offset(k, l);
                for (Index j = 0; j < ms.block_cols(l); ++j)
                  for (Index i = 0; i < ms.block_rows(k); ++i)
                    basis[static_cast<std::size_t>(off + i + j)].push_back(
                        {ms.row_offset(k) + i, ms.col_offset(l) + j, 1.0});
              }
            return GeneralAffineStructure(ms.rows(), ms.cols(), std::move(basis));
          },
          [](const PhiComposedStructure& ps) {
            const GeneralAffineStructure inner = to_general(ps.inner());
            const Matrix& phi = ps.phi();
            std::vector<std::vector<Entry>> basis(static_cast<std::size_t>(inner.num_params()));
            for (Index k = 0; k < inner.num_params(); ++k) {
              // Phi * S_k: column e.col gains phi(:, e.row) * value.
              for (const Entry& e : inner.basis(k))
                for (Index r = 0; r < phi.rows(); ++r)
                  if (phi(r, e.row) != 0.0)
                    basis[static_cast<std::size_t>(k)].push_back({r, e.col, phi(r, e.row) * e.value});
            }
            return GeneralAffineStructure(phi.rows(), inner.cols(), phi * inner.offset(),
                                          std::move(basis));
          }},
      s.variant());
}

std::vector<std::vector<HankelStructure>> mosaic_as_blocks(const MosaicHankelStructure& ms) {
  std::vector<std::vector<HankelStructure>> grid;
  for (Index k = 0; k < ms.num_row_blocks(); ++k) {
    std::vector<HankelStructure> row;
    for (Index l = 0; l < ms.num_col_blocks(); ++l)
      row.emplace_back(ms.block_rows(k), ms.block_cols(l));
    grid.push_back(std::move(row));
  }
  return grid;
}

Permutation stride_permutation(Index k, Index l) {
  require_positive(k, "permutation k");
  require_positive(l, "permutation l");
  // (Pi x)[j*k + a] = x[a*l + j]
  Permutation perm(k * l);
  for (Index a = 0; a < k; ++a)
    for (Index j = 0; j < l; ++j) perm.indices()(a * l + j) = j * k + a;
  return perm;
}

std::pair<Permutation, Permutation> block_hankel_permutations(Index m1, Index n1, Index q,
                                                              Index N) {
  return {stride_permutation(m1, q), stride_permutation(n1, N)};
}

Matrix block_hankel(Index m1, Index n1, const std::vector<Matrix>& slices) {
  if (static_cast<Index>(slices.size()) != m1 + n1 - 1)
    throw DimensionError("block Hankel needs m1 + n1 - 1 slices");
  const Index q = slices.front().rows();
  const Index N = slices.front().cols();
  Matrix out(m1 * q, n1 * N);
  for (Index i = 0; i < m1; ++i)
    for (Index j = 0; j < n1; ++j) {
      const Matrix& c = slices[static_cast<std::size_t>(i + j)];
      if (c.rows() != q || c.cols() != N) throw DimensionError("inconsistent slice sizes");
      out.block(i * q, j * N, q, N) = c;
    }
  return out;
}

Vector unfold_block_hankel(const std::vector<Matrix>& slices) {
  const Index len = static_cast<Index>(slices.size());
  const Index q = slices.front().rows();
  const Index N = slices.front().cols();
  Vector p(len * q * N);
  Index pos = 0;
  for (Index l = 0; l < N; ++l)
    for (Index k = 0; k < q; ++k)
      for (Index i = 0; i < len; ++i) p(pos++) = slices[static_cast<std::size_t>(i)](k, l);
  return p;
}

Matrix evaluate(const Structure& s, const Eigen::Ref<const Vector>& p) {
  if (p.size() != s.num_params())
    throw DimensionError("parameter vector has length " + std::to_string(p.size()) +
                         ", structure expects " + std::to_string(s.num_params()));
  return std::visit(
      Overloaded{
          [&](const GeneralAffineStructure& g) -> Matrix {
            Matrix out = g.offset();
            for (Index k = 0; k < g.num_params(); ++k)
              for (const Entry& e : g.basis(k)) out(e.row, e.col) += p(k) * e.value;
            return out;
          },
          [&](const HankelStructure& h) -> Matrix {
            Matrix out(h.rows(), h.cols());
            for (Index j = 0; j < h.cols(); ++j)
              for (Index i = 0; i < h.rows(); ++i) out(i, j) = p(i + j);
            return out;
          },
          [&](const MosaicHankelStructure& ms) -> Matrix {
            Matrix out(ms.rows(), ms.cols());
            for (Index l = 0; l < ms.num_col_blocks(); ++l)
              for (Index k = 0; k < ms.num_row_blocks(); ++k) {
                const Index off = ms.param_offset(k, l);
                for (Index j = 0; j < ms.block_cols(l); ++j)
                  for (Index i = 0; i < ms.block_rows(k); ++i)
                    out(ms.row_offset(k) + i, ms.col_offset(l) + j) = p(off + i + j);
              }
            return out;
          },
          [&](const PhiComposedStructure& ps) -> Matrix {
            return ps.phi() * evaluate(ps.inner(), p);
          }},
      s.variant());
}

Vector adjoint(const Structure& s, const Eigen::Ref<const Matrix>& z) {
  if (z.rows() != s.rows() || z.cols() != s.cols())
    throw DimensionError("adjoint argument must be m x n");
  return std::visit(
      Overloaded{
          [&](const GeneralAffineStructure& g) -> Vector {
            Vector out = Vector::Zero(g.num_params());
            for (Index k = 0; k < g.num_params(); ++k)
              for (const Entry& e : g.basis(k)) out(k) += e.value * z(e.row, e.col);
            return out;
          },
          [&](const HankelStructure& h) -> Vector {
            Vector out = Vector::Zero(h.num_params());
            for (Index j = 0; j < h.cols(); ++j)
              for (Index i = 0; i < h.rows(); ++i) out(i + j) += z(i, j);
            return out;
          },
          [&](const MosaicHankelStructure& ms) -> Vector {
            Vector out = Vector::Zero(ms.num_params());
            for (Index l = 0; l < ms.num_col_blocks(); ++l)
              for (Index k = 0; k < ms.num_row_blocks(); ++k) {
                const Index off = ms.param_offset(k, l);
                for (Index j = 0; j < ms.block_cols(l); ++j)
                  for (Index i = 0; i < ms.block_rows(k); ++i)
                    out(off + i + j) += z(ms.row_offset(k) + i, ms.col_offset(l) + j);
              }
            return out;
          },
          [&](const PhiComposedStructure& ps) -> Vector {
            return adjoint(ps.inner(), ps.phi().transpose() * z);
          }},
      s.variant());
}

std::pair<Structure, Permutation> transposed(const Structure& s) {
  const Index np = s.num_params();
  Permutation identity(np);
  identity.setIdentity();
  switch (s.kind()) {
    case StructureKind::hankel: {
      const auto& h = s.as<HankelStructure>();
      return {Structure(HankelStructure(h.cols(), h.rows())), identity};
    }
    case StructureKind::mosaic: {
      const auto& ms = s.as<MosaicHankelStructure>();
      MosaicHankelStructure t(ms.n_vec(), ms.m_vec());
      Permutation perm(np);
      for (Index l = 0; l < ms.num_col_blocks(); ++l)
        for (Index k = 0; k < ms.num_row_blocks(); ++k) {
          const Index len = ms.block_rows(k) + ms.block_cols(l) - 1;
          for (Index i = 0; i < len; ++i)
            perm.indices()(ms.param_offset(k, l) + i) = t.param_offset(l, k) + i;
        }
      return {Structure(std::move(t)), perm};
    }
    case StructureKind::general:
    case StructureKind::phi: {
      const GeneralAffineStructure g = to_general(s);
      std::vector<std::vector<Entry>> basis(static_cast<std::size_t>(g.num_params()));
      for (Index k = 0; k < g.num_params(); ++k)
        for (const Entry& e : g.basis(k))
          basis[static_cast<std::size_t>(k)].push_back({e.col, e.row, e.value});
      return {Structure(GeneralAffineStructure(g.cols(), g.rows(), g.offset().transpose(),
                                               std::move(basis))),
              identity};
    }
  }
  throw Error("unreachable structure kind");
}

}  // namespace slra
