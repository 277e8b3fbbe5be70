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
/// \file structure.hpp
///
/// Affine matrix structures p -> S(p) = S0 + sum_k p_k S_k.
///
/// Four kinds are supported: a general structure with sparse basis matrices,
/// the scalar Hankel structure, the mosaic Hankel structure (a grid of Hankel
/// blocks with independent parameters) and a structure composed on the left
/// with a dense full-row-rank matrix Phi. Hankel and mosaic kinds never
/// materialize their basis; they work through index formulas.
///
#ifndef SLRA_STRUCTURE_HPP
#define SLRA_STRUCTURE_HPP

#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace slra {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Permutation = Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, Index>;

/// One nonzero entry of a basis matrix S_k (0-based row and column).
struct Entry {
  Index row;
  Index col;
  double value;
};

class GeneralAffineStructure {
 public:
  GeneralAffineStructure(Index m, Index n, Matrix s0,
                         std::vector<std::vector<Entry>> basis);
  /// Zero offset.
  GeneralAffineStructure(Index m, Index n, std::vector<std::vector<Entry>> basis);

  Index rows() const { return m_; }
  Index cols() const { return n_; }
  Index num_params() const { return static_cast<Index>(basis_.size()); }
  const Matrix& offset() const { return s0_; }
  const std::vector<Entry>& basis(Index k) const { return basis_[static_cast<std::size_t>(k)]; }

  /// Entries of S(.) grouped by column: for column j, the list of
  /// (row, parameter, coefficient) triples.
  struct ColumnEntry {
    Index row;
    Index param;
    double value;
  };
  const std::vector<ColumnEntry>& column_entries(Index j) const {
    return columns_[static_cast<std::size_t>(j)];
  }

 private:
  Index m_;
  Index n_;
  Matrix s0_;
  std::vector<std::vector<Entry>> basis_;
  std::vector<std::vector<ColumnEntry>> columns_;
};

/// m x n Hankel matrix H[i][j] = p[i + j] (0-based), m + n - 1 parameters.
class HankelStructure {
 public:
  HankelStructure(Index m, Index n);

  Index rows() const { return m_; }
  Index cols() const { return n_; }
  Index num_params() const { return m_ + n_ - 1; }

 private:
  Index m_;
  Index n_;
};

/// q x N grid of Hankel blocks; block (k, l) is H_{m_k, n_l}(p^{(k,l)}).
/// Parameter blocks are stored column-block-major:
/// (1,1), (2,1), ..., (q,1), (1,2), ..., (q,N).
class MosaicHankelStructure {
 public:
  MosaicHankelStructure(std::vector<Index> m_vec, std::vector<Index> n_vec);

  Index rows() const { return row_offset_.back(); }
  Index cols() const { return col_offset_.back(); }
  Index num_params() const { return param_offset_.back(); }

  Index num_row_blocks() const { return static_cast<Index>(m_vec_.size()); }
  Index num_col_blocks() const { return static_cast<Index>(n_vec_.size()); }
  const std::vector<Index>& m_vec() const { return m_vec_; }
  const std::vector<Index>& n_vec() const { return n_vec_; }

  Index block_rows(Index k) const { return m_vec_[static_cast<std::size_t>(k)]; }
  Index block_cols(Index l) const { return n_vec_[static_cast<std::size_t>(l)]; }
  Index row_offset(Index k) const { return row_offset_[static_cast<std::size_t>(k)]; }
  Index col_offset(Index l) const { return col_offset_[static_cast<std::size_t>(l)]; }
  /// Offset of p^{(k,l)} inside p.
  Index param_offset(Index k, Index l) const {
    return param_offset_[static_cast<std::size_t>(l * num_row_blocks() + k)];
  }
  /// Column block containing global column j.
  Index col_block_of(Index j) const;

 private:
  std::vector<Index> m_vec_;
  std::vector<Index> n_vec_;
  std::vector<Index> row_offset_;
  std::vector<Index> col_offset_;
  std::vector<Index> param_offset_;
  std::vector<Index> col_block_;
};

class Structure;

/// S(p) = Phi * S'(p) with Phi dense and of full row rank.
class PhiComposedStructure {
 public:
  PhiComposedStructure(Matrix phi, Structure inner);

  Index rows() const { return phi_.rows(); }
  Index cols() const;
  Index num_params() const;
  const Matrix& phi() const { return phi_; }
  const Structure& inner() const { return *inner_; }

 private:
  Matrix phi_;
  std::shared_ptr<const Structure> inner_;
};

enum class StructureKind { general, hankel, mosaic, phi };

/// Immutable value type holding one of the structure kinds.
class Structure {
 public:
  using Variant = std::variant<GeneralAffineStructure, HankelStructure,
                               MosaicHankelStructure, PhiComposedStructure>;

  Structure(GeneralAffineStructure s) : impl_(std::move(s)) {}
  Structure(HankelStructure s) : impl_(std::move(s)) {}
  Structure(MosaicHankelStructure s) : impl_(std::move(s)) {}
  Structure(PhiComposedStructure s) : impl_(std::move(s)) {}

  StructureKind kind() const { return static_cast<StructureKind>(impl_.index()); }
  Index rows() const;
  Index cols() const;
  Index num_params() const;

  const Variant& variant() const { return impl_; }
  template <class T>
  const T& as() const { return std::get<T>(impl_); }

 private:
  Variant impl_;
};

/// Lambda_m: ones on the first superdiagonal.
Matrix shift_matrix(Index m);

/// [vec S_1 ... vec S_np], mn x np, column-major vectorization.
Matrix vec_map(const GeneralAffineStructure& s);

GeneralAffineStructure hankel_as_general(const HankelStructure& h);

/// Materializes any structure as a general affine structure.
GeneralAffineStructure to_general(const Structure& s);

/// q x N grid (indexed [k][l]) of the Hankel blocks of a mosaic structure.
std::vector<std::vector<HankelStructure>> mosaic_as_blocks(const MosaicHankelStructure& ms);

/// Pi^{(k,l)} = [I_k (x) e_1, ..., I_k (x) e_l]^T, a kl x kl permutation.
Permutation stride_permutation(Index k, Index l);

/// Row and column permutations taking the block-Hankel matrix H_{m1,n1}(C)
/// to the mosaic Hankel matrix with q copies of m1 and N copies of n1.
std::pair<Permutation, Permutation> block_hankel_permutations(Index m1, Index n1, Index q, Index N);

/// Block-Hankel matrix built from the slices C_{i,:,:} (each q x N),
/// i = 0 .. m1 + n1 - 2.
Matrix block_hankel(Index m1, Index n1, const std::vector<Matrix>& slices);

/// Parameter vector of the equivalent mosaic structure: p^{(k,l)}_i = C_{i,k,l}.
Vector unfold_block_hankel(const std::vector<Matrix>& slices);

/// S(p). Throws DimensionError if p has the wrong length.
Matrix evaluate(const Structure& s, const Eigen::Ref<const Vector>& p);

/// Adjoint of the linear part: returns S^T vec(Z) (length np) for an
/// m x n matrix Z.
Vector adjoint(const Structure& s, const Eigen::Ref<const Matrix>& z);

/// Transposed structure S'(p') = S(p)^T with p' = perm * p; `perm` is the
/// identity for all kinds except mosaic, where the block order changes.
/// Phi-composed structures are materialized as general ones.
std::pair<Structure, Permutation> transposed(const Structure& s);

}  // namespace slra

#endif  // SLRA_STRUCTURE_HPP
