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

#include "slra/varpro.hpp"

#include <algorithm>
#include <string>

#include "slra/errors.hpp"

namespace slra {

Matrix Evaluation::y_matrix(Index d) const {
  return Eigen::Map<const Matrix>(y.data(), d, y.size() / d);
}

Evaluator::Evaluator(Structure s, WeightSpec w, Vector p)
    : s_(std::move(s)), w_(std::move(w)), p_(std::move(p)) {
  if (p_.size() != s_.num_params())
    throw DimensionError("p has " + std::to_string(p_.size()) + " entries, the structure needs " +
                         std::to_string(s_.num_params()));
  if (w_.size() != s_.num_params()) throw DimensionError("weights and structure sizes differ");

  const Structure* cur = &s_;
  while (cur->kind() == StructureKind::phi) {
    const auto& ps = cur->as<PhiComposedStructure>();
    phi_ = phi_.size() == 0 ? ps.phi() : Matrix(phi_ * ps.phi());
    cur = &ps.inner();
  }
  inner_ = std::make_shared<const Structure>(*cur);
  vblocks_ = make_vblocks(*inner_, w_);
  sp_ = slra::evaluate(*inner_, p_);
}

void Evaluator::check_necessary_condition(Index d) const {
  if (num_params() < cols() * d)
    throw NecessaryConditionError(
        "necessary condition np >= n*d violated: np = " + std::to_string(num_params()) +
        ", n*d = " + std::to_string(cols() * d) + "; Gamma(R) is singular for every R");
}

Matrix Evaluator::inner_kernel(const Matrix& r) const {
  if (r.cols() != rows())
    throw DimensionError("R must have " + std::to_string(rows()) + " columns, got " +
                         std::to_string(r.cols()));
  if (r.rows() < 1) throw DimensionError("R must have at least one row");
  return phi_.size() == 0 ? r : Matrix(r * phi_);
}

GammaSystem Evaluator::gamma(const Matrix& r, bool factor) const {
  GammaSystem gs = GammaSystem::build(*vblocks_, inner_kernel(r));
  if (factor) gs.factor();
  return gs;
}

namespace {

// T(l, :) = sum_k y_k^T R V^{(k,l)} over the band (n x m).
Matrix weighted_sum(const VBlocks& vb, const Matrix& ymat, const Matrix& r) {
  const Index n = vb.num_blocks();
  const Index s = vb.bandwidth();
  const Matrix u = ymat.transpose() * r;
  Matrix t = Matrix::Zero(n, r.cols());
  for (const Segment& seg : vb.segments()) {
    const Index end = seg.first + seg.size;
    for (Index l = seg.first; l < end; ++l) {
      const Index lo = std::max(seg.first, l - s + 1);
      const Index hi = std::min(end, l + s);
      for (Index k = lo; k < hi; ++k) vb.accumulate(k, l, u.row(k), 1.0, t.row(l));
    }
  }
  return t;
}

}  // namespace

Evaluation Evaluator::evaluate(const Matrix& r, const EvalRequest& req) const {
  const Matrix ri = inner_kernel(r);
  const Index d = ri.rows();
  const Index n = cols();
  const Index mi = ri.cols();
  check_necessary_condition(d);

  Evaluation ev;
  const Matrix rs = ri * sp_;
  ev.r = Eigen::Map<const Vector>(rs.data(), rs.size());

  GammaSystem gs = GammaSystem::build(*vblocks_, ri);
  gs.factor();
  ev.g = gs.half_solve(ev.r);
  ev.f = ev.g.squaredNorm();
  ev.y = gs.half_solve_transpose(ev.g);
  const Matrix ymat = ev.y_matrix(d);

  if (req.correction) ev.dp_star = w_.apply_sqrt_inv_transpose(adjoint(*inner_, ri.transpose() * ymat));

  Matrix t;
  const bool need_t = req.gradient || req.jacobian || req.pseudo_jacobian;
  if (need_t) t = weighted_sum(*vblocks_, ymat, ri);

  auto outer_gradient = [&](const Matrix& gi) -> Matrix {
    return phi_.size() == 0 ? gi : Matrix(gi * phi_.transpose());
  };

  if (req.gradient) ev.grad = outer_gradient(2.0 * ymat * sp_.transpose() - 2.0 * ymat * t);

  if (req.fast_gradient) {
    if (!vblocks_->all_toeplitz())
      throw ContractViolation("fast gradient requires block-wise weights (block-Toeplitz Gamma)");
    const Index s = vblocks_->bandwidth();
    Matrix acc = Matrix::Zero(d, mi);
    Matrix rv(d, mi);
    Matrix rvt(d, mi);
    for (const Segment& seg : vblocks_->segments()) {
      const auto yseg = ymat.middleCols(seg.first, seg.size);
      const Index len = std::min(s, seg.size);
      for (Index k = 0; k < len; ++k) {
        const Matrix nk = yseg.middleCols(k, seg.size - k) * yseg.leftCols(seg.size - k).transpose();
        rv.setZero();
        vblocks_->accumulate(seg.first, seg.first + k, ri, 1.0, rv);
        acc.noalias() += nk * rv;
        if (k > 0) {
          rvt.setZero();
          vblocks_->accumulate(seg.first + k, seg.first, ri, 1.0, rvt);
          acc.noalias() += nk.transpose() * rvt;
        }
      }
    }
    ev.grad = outer_gradient(2.0 * ymat * sp_.transpose() - 2.0 * acc);
  }

  if (req.jacobian || req.pseudo_jacobian) {
    // Z2[i] block k = sum_l Y(i, l) R V^{(k,l)}.
    const Index s = vblocks_->bandwidth();
    std::vector<Matrix> z2(static_cast<std::size_t>(d), Matrix::Zero(n * d, mi));
    Matrix rv(d, mi);
    for (const Segment& seg : vblocks_->segments()) {
      const Index end = seg.first + seg.size;
      for (Index k = seg.first; k < end; ++k)
        for (Index l = std::max(seg.first, k - s + 1); l < std::min(end, k + s); ++l) {
          rv.setZero();
          vblocks_->accumulate(k, l, ri, 1.0, rv);
          for (Index i = 0; i < d; ++i)
            z2[static_cast<std::size_t>(i)].middleRows(k * d, d) += ymat(i, l) * rv;
        }
    }

    auto build_z = [&](Index i, Index j, double c) {
      Vector z = -c * z2[static_cast<std::size_t>(i)].col(j);
      for (Index l = 0; l < n; ++l) z(l * d + i) += sp_(j, l) - c * t(l, j);
      return z;
    };

    Matrix jac_inner;
    Matrix pjac_inner;
    if (req.jacobian) jac_inner.resize(num_params(), d * mi);
    if (req.pseudo_jacobian) pjac_inner.resize(n * d, d * mi);
    Matrix ej = Matrix::Zero(mi, n);
    for (Index j = 0; j < mi; ++j)
      for (Index i = 0; i < d; ++i) {
        const Index col = j * d + i;
        if (req.pseudo_jacobian) pjac_inner.col(col) = gs.half_solve(build_z(i, j, 0.5));
        if (req.jacobian) {
          const Vector u = gs.solve(build_z(i, j, 1.0));
          const Eigen::Map<const Matrix> umat(u.data(), d, n);
          ej.row(j) = ymat.row(i);
          jac_inner.col(col) =
              w_.apply_sqrt_inv_transpose(adjoint(*inner_, ri.transpose() * umat + ej));
          ej.row(j).setZero();
        }
      }

    // Chain rule through R' = R Phi: J = J' (Phi^T (x) I_d).
    auto outer_columns = [&](const Matrix& ji) -> Matrix {
      if (phi_.size() == 0) return ji;
      const Index mo = phi_.rows();
      Matrix out = Matrix::Zero(ji.rows(), d * mo);
      for (Index j = 0; j < mo; ++j)
        for (Index jp = 0; jp < mi; ++jp) {
          const double c = phi_(j, jp);
          if (c == 0.0) continue;
          out.middleCols(j * d, d) += c * ji.middleCols(jp * d, d);
        }
      return out;
    };
    if (req.jacobian) ev.jac = outer_columns(jac_inner);
    if (req.pseudo_jacobian) ev.pseudo_jac = outer_columns(pjac_inner);
  }
  return ev;
}

Vector Evaluator::residual(const Matrix& r) const {
  const Matrix rs = inner_kernel(r) * sp_;
  return Eigen::Map<const Vector>(rs.data(), rs.size());
}

double Evaluator::cost(const Matrix& r) const { return evaluate(r).f; }

double Evaluator::cost_via_solve(const Matrix& r) const {
  const Evaluation ev = evaluate(r);
  return ev.y.dot(ev.r);
}

Vector Evaluator::correction(const Matrix& r) const {
  return *evaluate(r, {.correction = true}).dp_star;
}

Matrix Evaluator::gradient(const Matrix& r) const { return *evaluate(r, {.gradient = true}).grad; }

Matrix Evaluator::fast_gradient(const Matrix& r) const {
  return *evaluate(r, {.fast_gradient = true}).grad;
}

Matrix Evaluator::jacobian_dp(const Matrix& r) const { return *evaluate(r, {.jacobian = true}).jac; }

Matrix Evaluator::pseudo_jacobian(const Matrix& r) const {
  return *evaluate(r, {.pseudo_jacobian = true}).pseudo_jac;
}

Vector Evaluator::approximation(const Matrix& r) const {
  return w_.reparametrize(p_, correction(r));
}

double cost(const Structure& s, const WeightSpec& w, const Vector& p, const Matrix& r) {
  return Evaluator(s, w, p).cost(r);
}

Vector correction(const Structure& s, const WeightSpec& w, const Vector& p, const Matrix& r) {
  return Evaluator(s, w, p).correction(r);
}

Matrix gradient(const Structure& s, const WeightSpec& w, const Vector& p, const Matrix& r) {
  return Evaluator(s, w, p).gradient(r);
}

Matrix fast_gradient(const Structure& s, const WeightSpec& w, const Vector& p, const Matrix& r) {
  return Evaluator(s, w, p).fast_gradient(r);
}

Matrix jacobian_dp(const Structure& s, const WeightSpec& w, const Vector& p, const Matrix& r) {
  return Evaluator(s, w, p).jacobian_dp(r);
}

Matrix pseudo_jacobian(const Structure& s, const WeightSpec& w, const Vector& p, const Matrix& r) {
  return Evaluator(s, w, p).pseudo_jacobian(r);
}

}  // namespace slra
