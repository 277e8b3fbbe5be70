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

#include "slra/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

#include <Eigen/Eigenvalues>

#include "slra/errors.hpp"
#include "slra/varpro.hpp"
#include "slra/weights.hpp"

namespace slra {

GeneratingFunction::GeneratingFunction(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw InputError("generating function needs at least one block");
  for (const Matrix& b : blocks_)
    if (b.rows() != blocks_.front().rows() || b.cols() != b.rows())
      throw DimensionError("generating function blocks must be square and of equal size");
}

GeneratingFunction GeneratingFunction::from_gamma(const GammaSystem& gs, Index segment) {
  return GeneratingFunction(gs.generator(segment));
}

ComplexMatrix GeneratingFunction::operator()(Complex z) const {
  ComplexMatrix f = blocks_[0].cast<Complex>();
  Complex zk = 1.0;
  for (std::size_t k = 1; k < blocks_.size(); ++k) {
    zk *= z;
    f += zk * blocks_[k].cast<Complex>() + (1.0 / zk) * blocks_[k].transpose().cast<Complex>();
  }
  return f;
}

GfBounds gf_bounds(const GeneratingFunction& gf, int samples) {
  if (samples < 64) throw InputError("gf_bounds needs at least 64 samples");
  GfBounds out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
               0.0, 0.0};
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es;
  for (int k = 0; k < samples; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / samples;
    es.compute(gf(std::polar(1.0, theta)), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    if (ev(0) < out.a_f) {
      out.a_f = ev(0);
      out.z_min_angle = theta;
    }
    if (ev(ev.size() - 1) > out.b_f) {
      out.b_f = ev(ev.size() - 1);
      out.z_max_angle = theta;
    }
  }
  return out;
}

Matrix kernel_from_roots(const std::vector<Complex>& roots) {
  std::vector<Complex> c{1.0};
  for (const Complex& z : roots) {
    std::vector<Complex> next(c.size() + 1, 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j + 1] += c[j];
      next[j] -= z * c[j];
    }
    c = std::move(next);
  }
  Matrix out(1, static_cast<Index>(c.size()));
  double scale = 0.0;
  for (const Complex& v : c) scale = std::max(scale, std::abs(v));
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (std::abs(c[j].imag()) > 1e-10 * scale)
      throw InputError("roots must be closed under complex conjugation");
    out(0, static_cast<Index>(j)) = c[j].real();
  }
  return out;
}

namespace {

// Largest eigenvalue of a symmetric operator by Lanczos with full
// reorthogonalization.
// Last component of the unit eigenvector of the symmetric tridiagonal
// (diag, sub) for its largest eigenvalue theta, by inverse iteration with a
// shift just above theta (T - shift I is negative definite, so no pivoting).
double last_eigvec_component(const Vector& diag, const Vector& sub, double theta) {
  const Index k = diag.size();
  const double shift = theta + 1e-10 * std::max(std::abs(theta), 1e-300) + 1e-300;
  Vector x = Vector::Ones(k);
  Vector dpiv(k);
  for (int it = 0; it < 3; ++it) {
    // LDL^T of T - shift I, then solve in place.
    dpiv(0) = diag(0) - shift;
    for (Index i = 1; i < k; ++i) dpiv(i) = diag(i) - shift - sub(i - 1) * sub(i - 1) / dpiv(i - 1);
    for (Index i = 1; i < k; ++i) x(i) -= sub(i - 1) / dpiv(i - 1) * x(i - 1);
    x.array() /= dpiv.array();
    for (Index i = k - 2; i >= 0; --i) x(i) -= sub(i) / dpiv(i) * x(i + 1);
    x.normalize();
  }
  return std::abs(x(k - 1));
}

double lanczos_max(const std::function<Vector(const Vector&)>& op, Index n, double tol,
                   int max_iter, int& steps) {
  const Index kmax = std::min<Index>(n, max_iter);
  Matrix q(n, kmax);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = unif(rng);
  q.col(0) = v.normalized();

  std::vector<double> alpha;
  std::vector<double> beta;
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  for (Index k = 0; k < kmax; ++k) {
    Vector w = op(q.col(k));
    alpha.push_back(q.col(k).dot(w));
    for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(k + 1) * (q.leftCols(k + 1).transpose() * w);
    const double b = w.norm();
    steps = static_cast<int>(k + 1);

    // Convergence is tested on a schedule to keep the tridiagonal work O(k^2).
    const bool last = k + 1 == kmax;
    if (k < 32 || (k + 1) % 8 == 0 || last || b == 0.0) {
      const Vector diag = Eigen::Map<const Vector>(alpha.data(), k + 1);
      const Vector sub = beta.empty() ? Vector() : Vector(Eigen::Map<const Vector>(beta.data(), k));
      es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
      const double theta = es.eigenvalues()(k);
      if (k + 1 == n || b <= 1e-14 * std::abs(theta)) return theta;
      const double resid = b * last_eigvec_component(diag, sub, theta);
      if (resid <= tol * std::abs(theta)) return theta;
    }
    beta.push_back(b);
    if (k + 1 < kmax) q.col(k + 1) = w / b;
  }
  throw Error("Lanczos iteration did not converge in " + std::to_string(kmax) + " steps");
}

}  // namespace

ExtremeEigen extreme_eigenvalues(const GammaSystem& gs, double tol, int max_iter) {
  if (!gs.factored()) throw ContractViolation("extreme_eigenvalues needs a factored Gamma");
  const Index n = gs.num_blocks() * gs.block_size();
  int s1 = 0;
  int s2 = 0;
  const double lmax = lanczos_max([&](const Vector& x) { return gs.multiply(x); }, n, tol, max_iter, s1);
  const double inv_max = lanczos_max([&](const Vector& x) { return gs.solve(x); }, n, tol, max_iter, s2);
  return {1.0 / inv_max, lmax, s1 + s2};
}

std::vector<KappaRow> kappa_growth(const Matrix& kernel, const std::vector<Index>& n_list,
                                   double tol) {
  if (kernel.rows() != 1) throw DimensionError("kappa_growth expects a one-row kernel");
  const Index m = kernel.cols();
  std::vector<KappaRow> out;
  for (Index n : n_list) {
    const Structure s{HankelStructure(m, n)};
    const auto vb = make_vblocks(s, WeightSpec::identity(s.num_params()));
    GammaSystem gs = GammaSystem::build(*vb, kernel);
    gs.factor();
    const ExtremeEigen ee = extreme_eigenvalues(gs, tol);
    out.push_back({n, ee.kappa(), ee.lambda_min, ee.lambda_max});
  }
  return out;
}

double loglog_slope(std::vector<double> x, std::vector<double> y, int discard) {
  if (x.size() != y.size()) throw DimensionError("loglog_slope: x and y differ in length");
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  const std::size_t skip = static_cast<std::size_t>(std::max(discard, 0));
  if (idx.size() < skip + 2) throw InputError("loglog_slope needs at least two points after discarding");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(idx.size() - skip);
  for (std::size_t k = skip; k < idx.size(); ++k) {
    const double lx = std::log(x[idx[k]]);
    const double ly = std::log(y[idx[k]]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

std::string to_string(WeightVariant v) {
  return v == WeightVariant::element_wise ? "element_wise" : "block_wise";
}

std::string to_string(BenchOperation op) {
  switch (op) {
    case BenchOperation::cost: return "cost";
    case BenchOperation::gradient: return "gradient";
    case BenchOperation::pseudo_jacobian: return "pseudo_jacobian";
  }
  return "unknown";
}

WeightVariant parse_weight_variant(const std::string& s) {
  if (s == "element_wise") return WeightVariant::element_wise;
  if (s == "block_wise") return WeightVariant::block_wise;
  throw InputError("unknown weight variant '" + s + "'");
}

BenchOperation parse_bench_operation(const std::string& s) {
  if (s == "cost") return BenchOperation::cost;
  if (s == "gradient") return BenchOperation::gradient;
  if (s == "pseudo_jacobian") return BenchOperation::pseudo_jacobian;
  throw InputError("unknown bench operation '" + s + "'");
}

std::vector<BenchRecord> bench_scaling(const BenchPlan& plan,
                                       const std::function<void(const BenchRecord&)>& progress) {
  if (plan.reps < 1) throw InputError("bench needs at least one repetition");
  std::mt19937_64 rng(plan.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.5, 2.0);
  std::vector<BenchRecord> out;
  for (const BenchInstance& inst : plan.instances) {
    const MosaicHankelStructure ms(inst.m_vec, inst.n_vec);
    const Index np = ms.num_params();
    Vector p(np);
    for (Index i = 0; i < np; ++i) p(i) = normal(rng);
    Vector w(np);
    if (inst.variant == WeightVariant::element_wise) {
      for (Index i = 0; i < np; ++i) w(i) = unif(rng);
    } else {
      for (Index l = 0; l < ms.num_col_blocks(); ++l)
        for (Index k = 0; k < ms.num_row_blocks(); ++k) {
          const double wk = unif(rng);
          const Index len = ms.block_rows(k) + ms.block_cols(l) - 1;
          w.segment(ms.param_offset(k, l), len).setConstant(wk);
        }
    }
    Matrix r(inst.d, ms.rows());
    for (Index i = 0; i < r.size(); ++i) r.data()[i] = normal(rng);
    const Evaluator ev(Structure(ms), WeightSpec::diagonal(w), p);

    for (BenchOperation op : plan.operations) {
      EvalRequest req;
      if (op == BenchOperation::gradient) {
        if (inst.variant == WeightVariant::block_wise)
          req.fast_gradient = true;
        else
          req.gradient = true;
      }
      if (op == BenchOperation::pseudo_jacobian) req.pseudo_jacobian = true;
      std::vector<double> times;
      // Untimed warm-up so the first repetition does not pay for cold caches.
      double sink = ev.evaluate(r, req).f;
      for (int rep = 0; rep < plan.reps; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        const Evaluation e = ev.evaluate(r, req);
        const auto t1 = std::chrono::steady_clock::now();
        sink += e.f;
        times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      }
      std::nth_element(times.begin(), times.begin() + static_cast<long>(times.size() / 2), times.end());
      const double median = times[times.size() / 2];
      if (!std::isfinite(sink)) throw Error("benchmark produced a non-finite cost");
      BenchRecord rec{inst.variant, op, ms.rows(), ms.cols(), inst.d, median, plan.reps};
      out.push_back(rec);
      if (progress) progress(rec);
    }
  }
  return out;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << "variant,operation,m,n,d,time_ms,reps\n";
  const auto old = os.precision(6);
  for (const BenchRecord& r : records)
    os << to_string(r.variant) << ',' << to_string(r.operation) << ',' << r.m << ',' << r.n << ','
       << r.d << ',' << r.time_ms << ',' << r.reps << '\n';
  os.precision(old);
}

std::vector<BenchInstance> ex1_family(WeightVariant variant, int k_max) {
  std::vector<BenchInstance> out;
  for (int k = 0; k <= k_max; ++k)
    out.push_back({{20, 22}, {250 + 250 * k, 255 + 250 * k}, 1, variant});
  return out;
}

}  // namespace slra
