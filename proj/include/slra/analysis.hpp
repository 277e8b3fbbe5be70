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
/// \file analysis.hpp
///
/// Conditioning of block-Toeplitz Gamma through its generating function
/// F(z) = sum_k Gamma_k z^k, condition number growth studies and timing
/// benchmarks of the evaluation routines.
///
#ifndef SLRA_ANALYSIS_HPP
#define SLRA_ANALYSIS_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "slra/gamma.hpp"
#include "slra/structure.hpp"

namespace slra {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

class GeneratingFunction {
 public:
  /// blocks[k] = Gamma_k for k = 0 .. s-1; Gamma_{-k} = Gamma_k^T.
  explicit GeneratingFunction(std::vector<Matrix> blocks);
  /// From the first Toeplitz segment of an assembled Gamma.
  static GeneratingFunction from_gamma(const GammaSystem& gs, Index segment = 0);

  Index block_size() const { return blocks_.front().rows(); }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  ComplexMatrix operator()(Complex z) const;

 private:
  std::vector<Matrix> blocks_;
};

struct GfBounds {
  double a_f;  // min over samples of lambda_min(F(z)); an upper bound on the true minimum
  double b_f;  // max over samples of lambda_max(F(z)); a lower bound on the true maximum
  double z_min_angle;
  double z_max_angle;
};

/// Samples z = exp(2 pi i k / samples), k = 0 .. samples-1.
GfBounds gf_bounds(const GeneratingFunction& gf, int samples = 512);

/// Coefficient row [c_0 ... c_L] of prod_k (z - root_k); the roots must be
/// closed under conjugation.
Matrix kernel_from_roots(const std::vector<Complex>& roots);

struct ExtremeEigen {
  double lambda_min;
  double lambda_max;
  int iterations;  // total Lanczos steps
  double kappa() const { return lambda_max / lambda_min; }
};

/// Extreme eigenvalues of a factored Gamma by Lanczos with full
/// reorthogonalization: lambda_max on Gamma, lambda_min as 1 / lambda_max of
/// Gamma^{-1}. Throws Error if either run does not reach `tol` relative.
ExtremeEigen extreme_eigenvalues(const GammaSystem& gs, double tol = 1e-6, int max_iter = 1000);

struct KappaRow {
  Index n;
  double kappa;
  double lambda_min;
  double lambda_max;
};

/// kappa_2 of Gamma for H_{m,n}, W = I, R = kernel (1 x m), n in n_list.
std::vector<KappaRow> kappa_growth(const Matrix& kernel, const std::vector<Index>& n_list,
                                   double tol = 1e-6);

/// Least-squares slope of log y against log x after dropping the
/// `discard` points with the smallest x.
double loglog_slope(std::vector<double> x, std::vector<double> y, int discard = 2);

enum class WeightVariant { element_wise, block_wise };
enum class BenchOperation { cost, gradient, pseudo_jacobian };

std::string to_string(WeightVariant v);
std::string to_string(BenchOperation op);
WeightVariant parse_weight_variant(const std::string& s);
BenchOperation parse_bench_operation(const std::string& s);

struct BenchInstance {
  std::vector<Index> m_vec;
  std::vector<Index> n_vec;
  Index d = 1;
  WeightVariant variant = WeightVariant::block_wise;
};

struct BenchPlan {
  std::vector<BenchInstance> instances;
  std::vector<BenchOperation> operations{BenchOperation::cost, BenchOperation::gradient,
                                         BenchOperation::pseudo_jacobian};
  int reps = 5;
  std::uint64_t seed = 0;
};

struct BenchRecord {
  WeightVariant variant;
  BenchOperation operation;
  Index m;  // total rows
  Index n;  // total columns
  Index d;
  double time_ms;  // median
  int reps;
};

/// Times each operation on random data (Gaussian p and R, weights drawn
/// uniformly from [0.5, 2] per parameter or per block). Block-wise
/// instances use the block-Toeplitz gradient.
std::vector<BenchRecord> bench_scaling(const BenchPlan& plan,
                                       const std::function<void(const BenchRecord&)>& progress = {});

/// CSV with header variant,operation,m,n,d,time_ms,reps.
void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& records);

/// m = [20, 22], n = [250, 255] + 250 k for k = 0 .. k_max.
std::vector<BenchInstance> ex1_family(WeightVariant variant, int k_max = 10);

}  // namespace slra

#endif  // SLRA_ANALYSIS_HPP
