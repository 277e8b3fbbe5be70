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
/// \file weights.hpp
///
/// Weighted 2-norms ||v||_W^2 = v^T W v on the parameter space. W is either
/// a dense symmetric positive definite matrix or a diagonal with entries in
/// (0, +inf]; an infinite weight marks a parameter that must keep its value.
///
#ifndef SLRA_WEIGHTS_HPP
#define SLRA_WEIGHTS_HPP

#include <vector>

#include "slra/structure.hpp"

namespace slra {

class WeightSpec {
 public:
  enum class Kind { diagonal, full };

  /// W = I.
  static WeightSpec identity(Index np);
  /// W = diag(w); entries must be positive, +inf allowed.
  static WeightSpec diagonal(const Vector& w);
  /// Dense symmetric positive definite W.
  static WeightSpec full(const Matrix& w);
  /// Dense W given through its inverse (typically banded).
  static WeightSpec from_inverse(const Matrix& w_inv);

  Kind kind() const { return kind_; }
  bool is_diagonal() const { return kind_ == Kind::diagonal; }
  Index size() const { return size_; }

  /// Diagonal weights; +inf for fixed parameters. Diagonal kind only.
  const Vector& weights() const { return w_; }
  /// gamma_i = 1 / w_i (0 for fixed parameters). Diagonal kind only.
  const Vector& gamma() const { return gamma_; }
  /// Indices with infinite weight.
  std::vector<Index> fixed_indices() const;

  /// Dense W^{-1} (any kind).
  Matrix inverse() const;
  /// Dense W (diagonal kind: fixed entries are +inf).
  Matrix dense() const;
  /// Upper-triangular right Cholesky factor sqrt(W) of W = sqrt(W)^T sqrt(W).
  /// Full kind only.
  const Matrix& sqrt_factor() const { return sqrt_w_; }

  /// v^T W v; +inf if v is nonzero at a fixed index.
  double norm_sq(const Eigen::Ref<const Vector>& v) const;
  /// sqrt(W)^{-1} v.
  Vector apply_sqrt_inv(const Eigen::Ref<const Vector>& v) const;
  /// sqrt(W)^{-T} v.
  Vector apply_sqrt_inv_transpose(const Eigen::Ref<const Vector>& v) const;
  /// p - sqrt(W)^{-1} dp.
  Vector reparametrize(const Eigen::Ref<const Vector>& p, const Eigen::Ref<const Vector>& dp) const;

  /// Same norm on a permuted parameter vector p' = perm * p.
  WeightSpec permuted(const Permutation& perm) const;

 private:
  WeightSpec() = default;

  Kind kind_ = Kind::diagonal;
  Index size_ = 0;
  Vector w_;
  Vector gamma_;
  Vector inv_sqrt_;  // gamma^{1/2}
  Matrix w_full_;
  Matrix w_inv_;
  Matrix sqrt_w_;
};

/// Gramian S^T S of the basis matrices, so that
/// ||S(a) - S(b)||_F^2 = ||a - b||_W^2. Returned as a diagonal weight when
/// the Gramian is diagonal. Throws InputError when S is not injective.
WeightSpec frobenius_weight(const GeneralAffineStructure& s);

}  // namespace slra

#endif  // SLRA_WEIGHTS_HPP
