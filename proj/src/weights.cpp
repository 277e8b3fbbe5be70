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

#include "slra/weights.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "slra/errors.hpp"

namespace slra {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Upper Cholesky factor U with W = U^T U; pivots below 1e-12 * max diag fail.
Matrix checked_right_cholesky(const Matrix& w) {
  const double scale = w.diagonal().cwiseAbs().maxCoeff();
  Eigen::LLT<Matrix> llt(w);
  if (llt.info() != Eigen::Success) throw InputError("weight matrix is not positive definite");
  const Matrix l = llt.matrixL();
  const double min_pivot = l.diagonal().cwiseAbs2().minCoeff();
  if (!(min_pivot > 1e-12 * scale))
    throw InputError("weight matrix is numerically singular (Cholesky pivot below tolerance)");
  return l.transpose();
}

}  // namespace

WeightSpec WeightSpec::identity(Index np) { return diagonal(Vector::Ones(np)); }

WeightSpec WeightSpec::diagonal(const Vector& w) {
  WeightSpec ws;
  ws.kind_ = Kind::diagonal;
  ws.size_ = w.size();
  ws.w_ = w;
  ws.gamma_.resize(w.size());
  ws.inv_sqrt_.resize(w.size());
  for (Index i = 0; i < w.size(); ++i) {
    if (std::isnan(w(i)) || !(w(i) > 0.0))
      throw InputError("diagonal weights must lie in (0, +inf]");
    if (std::isinf(w(i))) {
      ws.gamma_(i) = 0.0;
      ws.inv_sqrt_(i) = 0.0;
    } else {
      ws.gamma_(i) = 1.0 / w(i);
      ws.inv_sqrt_(i) = 1.0 / std::sqrt(w(i));
    }
  }
  return ws;
}

WeightSpec WeightSpec::full(const Matrix& w) {
  if (w.rows() != w.cols()) throw DimensionError("weight matrix must be square");
  if (!w.allFinite()) throw InputError("weight matrix has non-finite entries");
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff()))
    throw InputError("weight matrix must be symmetric");
  WeightSpec ws;
  ws.kind_ = Kind::full;
  ws.size_ = w.rows();
  ws.w_full_ = 0.5 * (w + w.transpose());
  ws.sqrt_w_ = checked_right_cholesky(ws.w_full_);
  const Matrix u_inv = ws.sqrt_w_.triangularView<Eigen::Upper>().solve(
      Matrix::Identity(ws.size_, ws.size_));
  ws.w_inv_ = u_inv * u_inv.transpose();
  return ws;
}

WeightSpec WeightSpec::from_inverse(const Matrix& w_inv) {
  if (w_inv.rows() != w_inv.cols()) throw DimensionError("inverse weight matrix must be square");
  // W^{-1} must be SPD as well; its Cholesky doubles as the check.
  checked_right_cholesky(w_inv);
  const Matrix sym = 0.5 * (w_inv + w_inv.transpose());
  WeightSpec ws = full(Eigen::LLT<Matrix>(sym).solve(Matrix::Identity(sym.rows(), sym.cols())));
  // Keep the exact sparsity pattern of the given inverse.
  ws.w_inv_ = sym;
  return ws;
}

std::vector<Index> WeightSpec::fixed_indices() const {
  std::vector<Index> out;
  if (kind_ == Kind::diagonal)
    for (Index i = 0; i < size_; ++i)
      if (std::isinf(w_(i))) out.push_back(i);
  return out;
}

Matrix WeightSpec::inverse() const {
  if (kind_ == Kind::diagonal) return gamma_.asDiagonal();
  return w_inv_;
}

Matrix WeightSpec::dense() const {
  if (kind_ == Kind::diagonal) {
    Matrix out = Matrix::Zero(size_, size_);
    out.diagonal() = w_;
    return out;
  }
  return w_full_;
}

double WeightSpec::norm_sq(const Eigen::Ref<const Vector>& v) const {
  if (v.size() != size_) throw DimensionError("norm_sq: length mismatch");
  if (kind_ == Kind::full) return v.dot(w_full_ * v);
  double acc = 0.0;
  for (Index i = 0; i < size_; ++i) {
    if (std::isinf(w_(i))) {
      if (v(i) != 0.0) return kInf;
    } else {
      acc += w_(i) * v(i) * v(i);
    }
  }
  return acc;
}

Vector WeightSpec::apply_sqrt_inv(const Eigen::Ref<const Vector>& v) const {
  if (v.size() != size_) throw DimensionError("apply_sqrt_inv: length mismatch");
  if (kind_ == Kind::diagonal) return inv_sqrt_.cwiseProduct(v);
  return sqrt_w_.triangularView<Eigen::Upper>().solve(v);
}

Vector WeightSpec::apply_sqrt_inv_transpose(const Eigen::Ref<const Vector>& v) const {
  if (v.size() != size_) throw DimensionError("apply_sqrt_inv_transpose: length mismatch");
  if (kind_ == Kind::diagonal) return inv_sqrt_.cwiseProduct(v);
  return sqrt_w_.transpose().triangularView<Eigen::Lower>().solve(v);
}

Vector WeightSpec::reparametrize(const Eigen::Ref<const Vector>& p,
                                 const Eigen::Ref<const Vector>& dp) const {
  if (p.size() != size_ || dp.size() != size_)
    throw DimensionError("reparametrize: length mismatch");
  return p - apply_sqrt_inv(dp);
}

WeightSpec WeightSpec::permuted(const Permutation& perm) const {
  if (kind_ == Kind::diagonal) return diagonal(perm * w_);
  WeightSpec ws;
  ws.kind_ = Kind::full;
  ws.size_ = size_;
  ws.w_full_ = perm * w_full_ * perm.transpose();
  ws.w_inv_ = perm * w_inv_ * perm.transpose();
  ws.sqrt_w_ = checked_right_cholesky(ws.w_full_);
  return ws;
}

WeightSpec frobenius_weight(const GeneralAffineStructure& s) {
  const Matrix smat = vec_map(s);
  const Matrix gram = smat.transpose() * smat;
  Eigen::ColPivHouseholderQR<Matrix> qr(smat);
  if (qr.rank() < s.num_params())
    throw InputError("structure is not injective: basis matrices are linearly dependent");
  const Matrix off = gram - Matrix(gram.diagonal().asDiagonal());
  if (off.cwiseAbs().maxCoeff() == 0.0) return WeightSpec::diagonal(gram.diagonal());
  return WeightSpec::full(gram);
}

}  // namespace slra
