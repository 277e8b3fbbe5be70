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

#include "slra/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "slra/errors.hpp"

namespace slra {

void SolverOptions::validate() const {
  if (max_iter < 0) throw InputError("max_iter must be non-negative");
  if (!(grad_tol > 0.0)) throw InputError("grad_tol must be positive");
  if (!(step_tol > 0.0)) throw InputError("step_tol must be positive");
  if (!(lm_lambda0 > 0.0)) throw InputError("lm_lambda0 must be positive");
  if (!(lm_up > 1.0)) throw InputError("lm_up must exceed 1");
  if (!(lm_down > 0.0 && lm_down < 1.0)) throw InputError("lm_down must lie in (0, 1)");
  if (multistart < 1) throw InputError("multistart must be at least 1");
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::grad_tol: return "grad_tol";
    case StopReason::step_tol: return "step_tol";
    case StopReason::max_iter: return "max_iter";
    case StopReason::zero_cost: return "zero_cost";
  }
  return "unknown";
}

Permutation kernel_permutation(const Matrix& r0) {
  const Index d = r0.rows();
  const Index m = r0.cols();
  Eigen::ColPivHouseholderQR<Matrix> qr(r0);
  const auto& piv = qr.colsPermutation().indices();
  std::vector<Index> head(piv.data() + d, piv.data() + m);
  std::sort(head.begin(), head.end());
  std::vector<Index> tail(piv.data(), piv.data() + d);
  std::sort(tail.begin(), tail.end());
  Permutation perm(m);
  Index c = 0;
  for (Index k : head) perm.indices()(c++) = k;
  for (Index k : tail) perm.indices()(c++) = k;
  return perm;
}

Initialization initialize(const Structure& s, const Vector& p, Index d) {
  const Index m = s.rows();
  if (d < 1 || d >= m)
    throw InputError("rank reduction d must satisfy 1 <= d < m (d = " + std::to_string(d) +
                     ", m = " + std::to_string(m) + ")");
  const Matrix sp = evaluate(s, p);
  Eigen::BDCSVD<Matrix> svd(sp, Eigen::ComputeFullU);
  Initialization init;
  init.r0 = svd.matrixU().rightCols(d).transpose();
  init.perm = kernel_permutation(init.r0);
  return init;
}

namespace {

Matrix orthonormal_rows(const Matrix& r) {
  Eigen::HouseholderQR<Matrix> qr(r.transpose());
  return Matrix(qr.householderQ() * Matrix::Identity(r.cols(), r.rows())).transpose();
}

// Orthonormal basis (m x (m - d)) of the null space of the d x m matrix r.
Matrix null_basis(const Matrix& r) {
  Eigen::HouseholderQR<Matrix> qr(r.transpose());
  const Matrix q = qr.householderQ();
  return q.rightCols(r.cols() - r.rows());
}

// Maps the free variables x to R and the columns of dR-Jacobians to x.
class KernelMap {
 public:
  KernelMap(Parametrization kind, const Matrix& r0) : kind_(kind), d_(r0.rows()), m_(r0.cols()) {
    if (kind_ == Parametrization::stls_xi) {
      perm_ = kernel_permutation(r0);
      const Matrix rp = r0 * perm_;
      const Matrix b = rp.rightCols(d_);
      Eigen::ColPivHouseholderQR<Matrix> qr(b);
      if (qr.rank() < d_) throw SingularGamma("initial kernel has a singular d x d block");
      x0_ = -qr.solve(rp.leftCols(m_ - d_));
    } else {
      x0_ = orthonormal_rows(r0);
    }
  }

  Vector x0() const { return Eigen::Map<const Vector>(x0_.data(), x0_.size()); }

  Matrix kernel(const Vector& x) const {
    if (kind_ == Parametrization::full_r) return Eigen::Map<const Matrix>(x.data(), d_, m_);
    Matrix rb(d_, m_);
    rb.leftCols(m_ - d_) = Eigen::Map<const Matrix>(x.data(), d_, m_ - d_);
    rb.rightCols(d_) = -Matrix::Identity(d_, d_);
    return rb * perm_.transpose();
  }

  /// Columns of a Jacobian with respect to vec(R), restricted to the step
  /// variables at x. For full_r the step is dR = B N^T with N spanning the
  /// null space of R, which drops the invariant directions dR = M R.
  Matrix restrict(const Matrix& jr, const Vector& x) const {
    Matrix out(jr.rows(), d_ * (m_ - d_));
    if (kind_ == Parametrization::full_r) {
      const Matrix nb = null_basis(kernel(x));
      out.setZero();
      for (Index c = 0; c < m_ - d_; ++c)
        for (Index j = 0; j < m_; ++j)
          if (nb(j, c) != 0.0) out.middleCols(c * d_, d_) += nb(j, c) * jr.middleCols(j * d_, d_);
      return out;
    }
    for (Index c = 0; c < m_ - d_; ++c)
      out.middleCols(c * d_, d_) = jr.middleCols(perm_.indices()(c) * d_, d_);
    return out;
  }

  /// Moves x by the step variables delta.
  Vector step(const Vector& x, const Vector& delta) const {
    if (kind_ == Parametrization::stls_xi) return x + delta;
    const Matrix b = Eigen::Map<const Matrix>(delta.data(), d_, m_ - d_);
    const Matrix r = kernel(x) + b * null_basis(kernel(x)).transpose();
    return Eigen::Map<const Vector>(r.data(), r.size());
  }

  /// Canonical representative after an accepted step.
  Vector normalize(const Vector& x) const {
    if (kind_ == Parametrization::stls_xi) return x;
    const Matrix q = orthonormal_rows(kernel(x));
    return Eigen::Map<const Vector>(q.data(), q.size());
  }

 private:
  Parametrization kind_;
  Index d_;
  Index m_;
  Permutation perm_;
  Matrix x0_;
};

}  // namespace

SolveResult minimize(const Evaluator& ev, const Matrix& r0, const SolverOptions& opts) {
  opts.validate();
  const KernelMap map(opts.parametrization, r0);
  const bool use_pjac = opts.hessian_source == HessianSource::pseudo_jacobian;
  EvalRequest full_req;
  full_req.correction = !use_pjac;
  full_req.jacobian = !use_pjac;
  full_req.pseudo_jacobian = use_pjac;

  Vector x = map.x0();
  Evaluation cur = ev.evaluate(map.kernel(x), full_req);
  auto residual = [&](const Evaluation& e) -> const Vector& { return use_pjac ? e.g : *e.dp_star; };
  auto jacobian = [&](const Evaluation& e) { return map.restrict(use_pjac ? *e.pseudo_jac : *e.jac, x); };

  Matrix j = jacobian(cur);
  Vector b = j.transpose() * residual(cur);
  const double g0 = 2.0 * b.cwiseAbs().maxCoeff();
  const double f_floor = 1e-28 * std::max(1.0, ev.data().squaredNorm());

  SolveResult res;
  double lambda = opts.lm_lambda0;
  res.trace.push_back({0, cur.f, g0, lambda, 0.0});
  res.reason = StopReason::max_iter;

  int iter = 0;
  bool stop = false;
  while (!stop) {
    const double gnorm = 2.0 * b.cwiseAbs().maxCoeff();
    if (cur.f <= f_floor) {
      res.reason = StopReason::zero_cost;
      break;
    }
    if (gnorm <= opts.grad_tol * g0 || gnorm == 0.0) {
      res.reason = StopReason::grad_tol;
      break;
    }
    if (iter >= opts.max_iter) {
      res.reason = StopReason::max_iter;
      break;
    }
    ++iter;

    const Matrix a = j.transpose() * j;
    const double dmax = std::max(a.diagonal().maxCoeff(), std::numeric_limits<double>::min());
    const Vector dscale = a.diagonal().cwiseMax(1e-12 * dmax);
    bool accepted = false;
    double step_norm = 0.0;
    for (int attempt = 0; attempt < 64 && !accepted; ++attempt) {
      Matrix lhs = a;
      lhs.diagonal() += lambda * dscale;
      const Vector delta = lhs.ldlt().solve(-b);
      step_norm = delta.norm();
      const bool tiny = step_norm <= opts.step_tol * (x.norm() + opts.step_tol);
      if (delta.allFinite()) {
        const Vector xt = map.normalize(map.step(x, delta));
        double ft = std::numeric_limits<double>::infinity();
        try {
          ft = ev.evaluate(map.kernel(xt)).f;
        } catch (const SingularGamma&) {
        }
        if (ft < cur.f) {
          x = xt;
          cur = ev.evaluate(map.kernel(x), full_req);
          j = jacobian(cur);
          b = j.transpose() * residual(cur);
          lambda = std::max(lambda * opts.lm_down, 1e-15);
          accepted = true;
        }
      }
      if (tiny) {
        res.reason = StopReason::step_tol;
        stop = true;
        break;
      }
      if (!accepted) lambda *= opts.lm_up;
    }
    if (!accepted && !stop) {
      res.reason = StopReason::step_tol;
      stop = true;
    }
    if (accepted) res.trace.push_back({iter, cur.f, 2.0 * b.cwiseAbs().maxCoeff(), lambda, step_norm});
  }

  res.iterations = iter;
  res.r_opt = map.kernel(x);
  const Evaluation fin = ev.evaluate(res.r_opt, {.correction = true});
  res.f_opt = fin.f;
  res.p_hat = ev.weights().reparametrize(ev.data(), *fin.dp_star);
  return res;
}

namespace {

void certify(const Structure& s, Index rank, SolveResult& res) {
  const Matrix sh = evaluate(s, res.p_hat);
  Eigen::BDCSVD<Matrix> svd(sh);
  const Vector sv = svd.singularValues();
  res.rank_ratio = (sv(0) > 0.0 && rank < sv.size()) ? sv(rank) / sv(0) : 0.0;
  res.rank_certified = res.rank_ratio <= 1e-6;
}

}  // namespace

SolveResult solve(const Structure& s, const WeightSpec& w, const Vector& p, Index rank,
                  const SolverOptions& opts, const std::optional<Matrix>& r0) {
  opts.validate();
  const Index m = s.rows();
  const Index n = s.cols();
  if (rank < 0 || rank >= std::min(m, n))
    throw InputError("rank must satisfy 0 <= r < min(m, n) = " + std::to_string(std::min(m, n)));
  if (p.size() != s.num_params()) throw DimensionError("p has the wrong length");

  const bool flip = m > n;
  std::optional<Structure> st;
  std::optional<WeightSpec> wt;
  Vector pt = p;
  Permutation perm(s.num_params());
  perm.setIdentity();
  if (flip) {
    if (r0) throw InputError("an initial kernel is not supported when m > n (the problem is transposed)");
    auto [ts, tp] = transposed(s);
    st.emplace(std::move(ts));
    perm = tp;
    wt.emplace(w.permuted(perm));
    pt = perm * p;
  } else {
    st.emplace(s);
    wt.emplace(w);
  }

  const Index mi = st->rows();
  const Index d = mi - rank;
  const Evaluator ev(*st, *wt, pt);
  ev.check_necessary_condition(d);

  std::vector<Matrix> starts;
  if (r0) {
    if (r0->rows() != d || r0->cols() != mi)
      throw DimensionError("initial R must be " + std::to_string(d) + " x " + std::to_string(mi));
    starts.push_back(*r0);
  } else {
    starts.push_back(initialize(*st, pt, d).r0);
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  for (int k = 1; k < opts.multistart; ++k) {
    Matrix rr(d, mi);
    for (Index c = 0; c < rr.size(); ++c) rr.data()[c] = normal(rng);
    starts.push_back(rr);
  }

  std::optional<SolveResult> best;
  std::string first_error;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    try {
      SolveResult cand = minimize(ev, starts[k], opts);
      if (!best || cand.f_opt < best->f_opt) best = std::move(cand);
    } catch (const SingularGamma& e) {
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (!best)
    throw SingularGamma(first_error +
                        " (at the initial kernel; try another initial R or column permutation)");

  SolveResult res = std::move(*best);
  if (flip) {
    res.p_hat = perm.transpose() * res.p_hat;
    res.transposed = true;
    const Matrix sh = evaluate(s, res.p_hat);
    Eigen::BDCSVD<Matrix> svd(sh, Eigen::ComputeFullU);
    res.r_opt = svd.matrixU().rightCols(m - rank).transpose();
  }
  certify(s, rank, res);
  return res;
}

ReducedHankel reduce_hankel_rank(Index m, Index np, Index rank) {
  const Index n = np - m + 1;
  if (m < 1 || n < 1) throw InputError("invalid Hankel dimensions");
  if (rank < 0 || rank >= std::min(m, n))
    throw InputError("rank must satisfy 0 <= r < min(m, np - m + 1)");
  return {rank + 1, np - rank, rank, 1};
}

}  // namespace slra
