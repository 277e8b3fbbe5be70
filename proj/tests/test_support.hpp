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

// Random instances and brute-force reference computations shared by the
// unit tests and the acceptance binary. Nothing here calls the banded code.

#ifndef SLRA_TESTS_TEST_SUPPORT_HPP
#define SLRA_TESTS_TEST_SUPPORT_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slra/structure.hpp"
#include "slra/weights.hpp"

namespace slra::testing {

using Rng = std::mt19937_64;

inline double normal(Rng& rng) { return std::normal_distribution<double>()(rng); }
inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}
inline Index uniform_int(Rng& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline Matrix random_matrix(Rng& rng, Index r, Index c) {
  Matrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

inline Vector random_vector(Rng& rng, Index n) { return random_matrix(rng, n, 1); }

inline Matrix random_spd(Rng& rng, Index n, double shift = 1.0) {
  const Matrix a = random_matrix(rng, n, n);
  return a * a.transpose() / static_cast<double>(n) + shift * Matrix::Identity(n, n);
}

inline double rel_err(const Matrix& a, const Matrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Columns vec(S(e_k)) - vec(S(0)) from evaluate() on unit vectors.
inline Matrix brute_vec_map(const Structure& s) {
  const Index np = s.num_params();
  const Matrix s0 = evaluate(s, Vector::Zero(np));
  Matrix out(s.rows() * s.cols(), np);
  for (Index k = 0; k < np; ++k) {
    const Matrix sk = evaluate(s, Vector::Unit(np, k)) - s0;
    out.col(k) = Eigen::Map<const Vector>(sk.data(), sk.size());
  }
  return out;
}

/// Hankel matrix filled from its definition H[i][j] = p[i + j].
inline Matrix hankel_by_definition(Index m, Index n, const Vector& p) {
  Matrix h(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) h(i, j) = p(i + j);
  return h;
}

/// (I_n (x) R) S W^{-1} S^T (I_n (x) R^T) with everything dense.
inline Matrix dense_gamma_reference(const Structure& s, const Matrix& winv, const Matrix& r) {
  const Matrix smat = brute_vec_map(s);
  const Index n = s.cols();
  const Index m = s.rows();
  const Index d = r.rows();
  Matrix irs = Matrix::Zero(n * d, n * m);
  for (Index j = 0; j < n; ++j) irs.block(j * d, j * m, d, m) = r;
  const Matrix g = irs * smat;
  return g * winv * g.transpose();
}

/// Central differences with step 1e-6 * (1 + |x|).
inline Matrix fd_gradient(const std::function<double(const Matrix&)>& f, const Matrix& x) {
  Matrix g(x.rows(), x.cols());
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i) {
      const double h = 1e-6 * (1.0 + std::abs(x(i, j)));
      Matrix a = x;
      Matrix b = x;
      a(i, j) += h;
      b(i, j) -= h;
      g(i, j) = (f(a) - f(b)) / (2.0 * h);
    }
  return g;
}

/// Columnwise central-difference Jacobian of a vector function of x
/// (columns ordered like vec(x)).
inline Matrix fd_jacobian(const std::function<Vector(const Matrix&)>& f, const Matrix& x) {
  const Vector f0 = f(x);
  Matrix jac(f0.size(), x.size());
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i) {
      const double h = 1e-6 * (1.0 + std::abs(x(i, j)));
      Matrix a = x;
      Matrix b = x;
      a(i, j) += h;
      b(i, j) -= h;
      jac.col(j * x.rows() + i) = (f(a) - f(b)) / (2.0 * h);
    }
  return jac;
}

/// Random general affine structure with dense random basis matrices.
/// With d > 0 (d < m, np >= n*d), parameter j*d + i also touches entry
/// (i, j), so G(R) has generically full row rank.
inline GeneralAffineStructure random_general(Rng& rng, Index m, Index n, Index np, Index d = 0) {
  std::vector<std::vector<Entry>> basis(static_cast<std::size_t>(np));
  for (Index k = 0; k < np; ++k) {
    auto& b = basis[static_cast<std::size_t>(k)];
    if (k < n * d) b.push_back({k % d, k / d, 1.0 + std::abs(normal(rng))});
    const Index nnz = uniform_int(rng, 1, std::max<Index>(1, m * n / 2));
    for (Index e = 0; e < nnz; ++e) b.push_back({uniform_int(rng, 0, m - 1), uniform_int(rng, 0, n - 1), normal(rng)});
  }
  return GeneralAffineStructure(m, n, random_matrix(rng, m, n), std::move(basis));
}

/// Mosaic parameter weights that are constant on every block (k, l).
inline Vector blockwise_weights(Rng& rng, const MosaicHankelStructure& ms) {
  Vector w(ms.num_params());
  for (Index l = 0; l < ms.num_col_blocks(); ++l)
    for (Index k = 0; k < ms.num_row_blocks(); ++k)
      w.segment(ms.param_offset(k, l), ms.block_rows(k) + ms.block_cols(l) - 1)
          .setConstant(uniform(rng, 0.5, 2.0));
  return w;
}

enum class WeightKind { identity, diagonal, spd, fixed };

inline WeightSpec random_weights(Rng& rng, WeightKind kind, Index np, Index max_fixed) {
  switch (kind) {
    case WeightKind::identity:
      return WeightSpec::identity(np);
    case WeightKind::diagonal: {
      Vector w(np);
      for (Index i = 0; i < np; ++i) w(i) = uniform(rng, 0.2, 5.0);
      return WeightSpec::diagonal(w);
    }
    case WeightKind::spd:
      return WeightSpec::full(random_spd(rng, np));
    case WeightKind::fixed: {
      Vector w(np);
      for (Index i = 0; i < np; ++i) w(i) = uniform(rng, 0.2, 5.0);
      const Index nfix = uniform_int(rng, 1, std::max<Index>(1, max_fixed));
      for (Index t = 0; t < nfix; ++t) w(uniform_int(rng, 0, np - 1)) = std::numeric_limits<double>::infinity();
      return WeightSpec::diagonal(w);
    }
  }
  return WeightSpec::identity(np);
}

inline std::string to_string(WeightKind k) {
  switch (k) {
    case WeightKind::identity: return "identity";
    case WeightKind::diagonal: return "diagonal";
    case WeightKind::spd: return "spd";
    case WeightKind::fixed: return "fixed";
  }
  return "?";
}

/// A random problem instance (structure, weights, data, kernel).
struct Instance {
  Structure s;
  WeightSpec w;
  Vector p;
  Matrix r;
  std::string label;
};

/// Instances for the oracle-equivalence checks: general / Hankel / mosaic,
/// m <= 6, n <= 10, d <= 2, all weight kinds. Satisfies np >= n*d with a
/// margin so that G(R) generically has full row rank.
inline Instance random_instance(Rng& rng, int family, WeightKind wk) {
  for (;;) {
    const Index d = uniform_int(rng, 1, 2);
    if (family == 0) {
      const Index m = uniform_int(rng, d + 1, 6);
      const Index n = uniform_int(rng, 1, 10);
      const Index np = uniform_int(rng, n * d + 1, std::max(n * d + 1, std::min<Index>(m * n, n * d + 8)));
      if (np > m * n) continue;
      Structure s(random_general(rng, m, n, np, d));
      const Index max_fixed = (np - n * d) / 2;
      if (wk == WeightKind::fixed && max_fixed < 1) continue;
      WeightSpec w = random_weights(rng, wk, np, max_fixed);
      return {std::move(s), std::move(w), random_vector(rng, np), random_matrix(rng, d, m), "general"};
    }
    if (family == 1) {
      const Index m = uniform_int(rng, d + 1, 6);
      const Index n = uniform_int(rng, 1, 10);
      const Index np = m + n - 1;
      if (np < n * d + 1) continue;
      const Index max_fixed = (np - n * d) / 2;
      if (wk == WeightKind::fixed && max_fixed < 1) continue;
      Structure s{HankelStructure(m, n)};
      WeightSpec w = random_weights(rng, wk, np, max_fixed);
      return {std::move(s), std::move(w), random_vector(rng, np), random_matrix(rng, d, m), "hankel"};
    }
    const Index q = uniform_int(rng, 1, 3);
    const Index nb = uniform_int(rng, 1, 3);
    std::vector<Index> mv;
    std::vector<Index> nv;
    Index m = 0;
    Index n = 0;
    for (Index k = 0; k < q; ++k) {
      mv.push_back(uniform_int(rng, 1, 3));
      m += mv.back();
    }
    for (Index l = 0; l < nb; ++l) {
      nv.push_back(uniform_int(rng, 1, 5));
      n += nv.back();
    }
    if (m > 6 || n > 10 || m <= d) continue;
    const MosaicHankelStructure ms(mv, nv);
    const Index np = ms.num_params();
    if (np < n * d + 1) continue;
    const Index max_fixed = (np - n * d) / 2;
    if (wk == WeightKind::fixed && max_fixed < 1) continue;
    WeightSpec w = random_weights(rng, wk, np, max_fixed);
    return {Structure(ms), std::move(w), random_vector(rng, np), random_matrix(rng, d, m), "mosaic"};
  }
}

}  // namespace slra::testing

#endif  // SLRA_TESTS_TEST_SUPPORT_HPP
