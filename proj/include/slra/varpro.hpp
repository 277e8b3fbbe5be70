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
/// \file varpro.hpp
///
/// Variable projection: for a kernel R (d x m, full row rank) the inner
/// problem
///
///     min ||dp||_2^2  subject to  R S(p - sqrt(W)^{-1} dp) = 0
///
/// has the closed-form solution dp* = G^T Gamma^{-1} r with
/// r = vec(R S(p)), G = (I_n (x) R) S sqrt(W)^{-1} and Gamma = G G^T.
/// The projected cost is f(R) = r^T Gamma^{-1} r = ||dp*||^2.
///
/// Jacobian columns are ordered like vec(R): column j*d + i holds the
/// derivative with respect to R(i, j).
///
#ifndef SLRA_VARPRO_HPP
#define SLRA_VARPRO_HPP

#include <memory>
#include <optional>

#include "slra/gamma.hpp"
#include "slra/structure.hpp"
#include "slra/weights.hpp"

namespace slra {

struct EvalRequest {
  bool correction = false;
  bool gradient = false;
  /// Use the block-Toeplitz gradient formula (requires block-wise weights).
  bool fast_gradient = false;
  bool jacobian = false;
  bool pseudo_jacobian = false;
};

struct Evaluation {
  double f = 0.0;
  /// vec(R S(p)), d*n.
  Vector r;
  /// Gamma^{-1} r.
  Vector y;
  /// L^{-1} r with Gamma = L L^T; ||g||^2 = f.
  Vector g;
  std::optional<Vector> dp_star;
  std::optional<Matrix> grad;
  std::optional<Matrix> jac;         // np x dm
  std::optional<Matrix> pseudo_jac;  // nd x dm

  /// Y with vec(Y) = y (d x n).
  Matrix y_matrix(Index d) const;
};

/// Evaluates the projected cost and its derivatives for fixed data
/// (structure, weights, p). Phi-composed structures are evaluated through
/// their inner structure at R * Phi.
class Evaluator {
 public:
  Evaluator(Structure s, WeightSpec w, Vector p);

  const Structure& structure() const { return s_; }
  const WeightSpec& weights() const { return w_; }
  const Vector& data() const { return p_; }
  Index rows() const { return s_.rows(); }
  Index cols() const { return s_.cols(); }
  Index num_params() const { return s_.num_params(); }
  /// True when every segment of Gamma is block-Toeplitz.
  bool block_toeplitz() const { return vblocks_->all_toeplitz(); }

  /// Throws NecessaryConditionError unless np >= n*d.
  void check_necessary_condition(Index d) const;

  Evaluation evaluate(const Matrix& r, const EvalRequest& req = {}) const;

  /// Assembled Gamma(R) for the (inner) structure; factored if `factor`.
  GammaSystem gamma(const Matrix& r, bool factor = true) const;

  Vector residual(const Matrix& r) const;
  double cost(const Matrix& r) const;
  /// r^T Gamma^{-1} r through the full solve instead of the half solve.
  double cost_via_solve(const Matrix& r) const;
  Vector correction(const Matrix& r) const;
  Matrix gradient(const Matrix& r) const;
  Matrix fast_gradient(const Matrix& r) const;
  Matrix jacobian_dp(const Matrix& r) const;
  Matrix pseudo_jacobian(const Matrix& r) const;

  /// p - sqrt(W)^{-1} dp*(R).
  Vector approximation(const Matrix& r) const;

 private:
  Matrix inner_kernel(const Matrix& r) const;

  Structure s_;
  WeightSpec w_;
  Vector p_;
  Matrix phi_;  // product of all Phi factors; empty when none
  std::shared_ptr<const Structure> inner_;
  std::shared_ptr<const VBlocks> vblocks_;
  Matrix sp_;  // inner S(p)
};

/// One-shot wrappers.
double cost(const Structure& s, const WeightSpec& w, const Vector& p, const Matrix& r);
Vector correction(const Structure& s, const WeightSpec& w, const Vector& p, const Matrix& r);
Matrix gradient(const Structure& s, const WeightSpec& w, const Vector& p, const Matrix& r);
Matrix fast_gradient(const Structure& s, const WeightSpec& w, const Vector& p, const Matrix& r);
Matrix jacobian_dp(const Structure& s, const WeightSpec& w, const Vector& p, const Matrix& r);
Matrix pseudo_jacobian(const Structure& s, const WeightSpec& w, const Vector& p, const Matrix& r);

}  // namespace slra

#endif  // SLRA_VARPRO_HPP
