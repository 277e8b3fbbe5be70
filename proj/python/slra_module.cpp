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

// Python bindings for the slra core library.

#include <optional>
#include <tuple>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "slra/analysis.hpp"
#include "slra/errors.hpp"
#include "slra/optimizer.hpp"
#include "slra/oracle.hpp"
#include "slra/problem_io.hpp"
#include "slra/varpro.hpp"

namespace py = pybind11;
using namespace slra;

namespace {

// Basis given as one list of (row, col, value) triples per parameter.
using Triples = std::vector<std::vector<std::tuple<Index, Index, double>>>;

GeneralAffineStructure make_general(Index m, Index n, const Triples& basis,
                                    const std::optional<Matrix>& s0) {
  std::vector<std::vector<Entry>> b;
  b.reserve(basis.size());
  for (const auto& bk : basis) {
    std::vector<Entry> e;
    for (const auto& [i, j, v] : bk) e.push_back({i, j, v});
    b.push_back(std::move(e));
  }
  return s0 ? GeneralAffineStructure(m, n, *s0, std::move(b)) : GeneralAffineStructure(m, n, std::move(b));
}

std::string kind_name(StructureKind k) {
  switch (k) {
    case StructureKind::general: return "general";
    case StructureKind::hankel: return "hankel";
    case StructureKind::mosaic: return "mosaic";
    case StructureKind::phi: return "phi";
  }
  return "unknown";
}

}  // namespace

PYBIND11_MODULE(_slra, m) {
  m.doc() = "Structured low-rank approximation by variable projection";

  auto base = py::register_exception<Error>(m, "SlraError", PyExc_RuntimeError);
  auto input = py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<NecessaryConditionError>(m, "NecessaryConditionError", input.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<SingularGamma>(m, "SingularGamma", base.ptr());
  py::register_exception<ContractViolation>(m, "ContractViolation", base.ptr());
  py::register_exception<OracleError>(m, "OracleError", base.ptr());

  py::class_<Structure>(m, "Structure")
      .def_property_readonly("kind", [](const Structure& s) { return kind_name(s.kind()); })
      .def_property_readonly("rows", &Structure::rows)
      .def_property_readonly("cols", &Structure::cols)
      .def_property_readonly("num_params", &Structure::num_params)
      .def("evaluate", [](const Structure& s, const Vector& p) { return evaluate(s, p); }, py::arg("p"),
           "S(p) as a dense matrix.")
      .def("adjoint", [](const Structure& s, const Matrix& z) { return adjoint(s, z); }, py::arg("z"))
      .def("__repr__", [](const Structure& s) {
        return "<Structure " + kind_name(s.kind()) + " " + std::to_string(s.rows()) + "x" +
               std::to_string(s.cols()) + " np=" + std::to_string(s.num_params()) + ">";
      });

  m.def("hankel", [](Index rows, Index cols) { return Structure(HankelStructure(rows, cols)); }, py::arg("m"),
        py::arg("n"));
  m.def("mosaic",
        [](std::vector<Index> m_vec, std::vector<Index> n_vec) {
          return Structure(MosaicHankelStructure(std::move(m_vec), std::move(n_vec)));
        },
        py::arg("m_vec"), py::arg("n_vec"));
  m.def("general",
        [](Index rows, Index cols, const Triples& basis, const std::optional<Matrix>& s0) {
          return Structure(make_general(rows, cols, basis, s0));
        },
        py::arg("m"), py::arg("n"), py::arg("basis"), py::arg("s0") = std::nullopt,
        "Affine structure S0 + sum_k p_k S_k; basis[k] lists (row, col, value) of S_k.");
  m.def("phi", [](const Matrix& phi, const Structure& inner) { return Structure(PhiComposedStructure(phi, inner)); },
        py::arg("phi"), py::arg("inner"));

  py::class_<WeightSpec>(m, "Weights")
      .def_static("identity", &WeightSpec::identity, py::arg("np"))
      .def_static("diagonal", &WeightSpec::diagonal, py::arg("w"), "Diagonal weights; inf marks fixed values.")
      .def_static("full", &WeightSpec::full, py::arg("w"))
      .def_static("from_inverse", &WeightSpec::from_inverse, py::arg("w_inv"))
      .def_property_readonly("is_diagonal", &WeightSpec::is_diagonal)
      .def_property_readonly("size", &WeightSpec::size)
      .def_property_readonly("fixed_indices", &WeightSpec::fixed_indices)
      .def("inverse", &WeightSpec::inverse)
      .def("norm_sq", [](const WeightSpec& w, const Vector& v) { return w.norm_sq(v); }, py::arg("v"));

  py::class_<Evaluator>(m, "Evaluator")
      .def(py::init<Structure, WeightSpec, Vector>(), py::arg("structure"), py::arg("weights"), py::arg("p"))
      .def_property_readonly("block_toeplitz", &Evaluator::block_toeplitz)
      .def("cost", &Evaluator::cost, py::arg("R"))
      .def("residual", &Evaluator::residual, py::arg("R"))
      .def("correction", &Evaluator::correction, py::arg("R"))
      .def("approximation", &Evaluator::approximation, py::arg("R"))
      .def("gradient", &Evaluator::gradient, py::arg("R"))
      .def("fast_gradient", &Evaluator::fast_gradient, py::arg("R"))
      .def("jacobian", &Evaluator::jacobian_dp, py::arg("R"))
      .def("pseudo_jacobian", &Evaluator::pseudo_jacobian, py::arg("R"))
      .def("gamma", [](const Evaluator& ev, const Matrix& r) { return ev.gamma(r, false).dense(); }, py::arg("R"),
           "Dense Gamma(R).");

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_property(
          "parametrization",
          [](const SolverOptions& o) { return o.parametrization == Parametrization::full_r ? "full_r" : "stls_xi"; },
          [](SolverOptions& o, const std::string& v) {
            if (v == "stls_xi") o.parametrization = Parametrization::stls_xi;
            else if (v == "full_r") o.parametrization = Parametrization::full_r;
            else throw InputError("parametrization must be stls_xi or full_r");
          })
      .def_property(
          "hessian_source",
          [](const SolverOptions& o) {
            return o.hessian_source == HessianSource::jacobian_dp ? "jacobian_dp" : "pseudo_jacobian";
          },
          [](SolverOptions& o, const std::string& v) {
            if (v == "pseudo_jacobian") o.hessian_source = HessianSource::pseudo_jacobian;
            else if (v == "jacobian_dp") o.hessian_source = HessianSource::jacobian_dp;
            else throw InputError("hessian_source must be pseudo_jacobian or jacobian_dp");
          })
      .def_readwrite("max_iter", &SolverOptions::max_iter)
      .def_readwrite("grad_tol", &SolverOptions::grad_tol)
      .def_readwrite("step_tol", &SolverOptions::step_tol)
      .def_readwrite("lm_lambda0", &SolverOptions::lm_lambda0)
      .def_readwrite("lm_up", &SolverOptions::lm_up)
      .def_readwrite("lm_down", &SolverOptions::lm_down)
      .def_readwrite("multistart", &SolverOptions::multistart)
      .def_readwrite("seed", &SolverOptions::seed);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("R_opt", &SolveResult::r_opt)
      .def_readonly("p_hat", &SolveResult::p_hat)
      .def_readonly("f_opt", &SolveResult::f_opt)
      .def_readonly("iterations", &SolveResult::iterations)
      .def_readonly("rank_ratio", &SolveResult::rank_ratio)
      .def_readonly("rank_certified", &SolveResult::rank_certified)
      .def_readonly("transposed", &SolveResult::transposed)
      .def_property_readonly("convergence_reason", [](const SolveResult& r) { return to_string(r.reason); })
      .def_property_readonly("trace", [](const SolveResult& r) {
        py::list out;
        for (const TraceEntry& t : r.trace) {
          py::dict d;
          d["iter"] = t.iter;
          d["f"] = t.f;
          d["grad_norm"] = t.grad_norm;
          d["lambda"] = t.lambda;
          d["step_norm"] = t.step_norm;
          out.append(d);
        }
        return out;
      });

  m.def("solve",
        [](const Structure& s, const WeightSpec& w, const Vector& p, Index rank, const SolverOptions& opts,
           const std::optional<Matrix>& r0) {
          py::gil_scoped_release release;
          return solve(s, w, p, rank, opts, r0);
        },
        py::arg("structure"), py::arg("weights"), py::arg("p"), py::arg("rank"),
        py::arg("options") = SolverOptions{}, py::arg("R0") = std::nullopt);

  m.def("dense_cost",
        [](const Structure& s, const WeightSpec& w, const Vector& p, const Matrix& r) {
          const DenseCost c = dense_cost(make_dense_problem(s, w, p, r));
          return py::make_tuple(c.f, c.dp_star, c.rank_g);
        },
        py::arg("structure"), py::arg("weights"), py::arg("p"), py::arg("R"),
        "Dense reference cost: returns (f, dp_star, rank of G).");

  m.def("kernel_from_roots", &kernel_from_roots, py::arg("roots"));
  m.def("gf_bounds",
        [](const Matrix& kernel, int samples) {
          const Structure s{HankelStructure(kernel.cols(), kernel.cols())};
          const auto vb = make_vblocks(s, WeightSpec::identity(s.num_params()));
          const GfBounds b = gf_bounds(GeneratingFunction::from_gamma(GammaSystem::build(*vb, kernel)), samples);
          return py::make_tuple(b.a_f, b.b_f);
        },
        py::arg("R"), py::arg("samples") = 512, "(a_F, b_F) for scalar Hankel with W = I.");
  m.def("kappa_growth",
        [](const Matrix& kernel, const std::vector<Index>& n_list, double tol) {
          py::list out;
          for (const KappaRow& r : kappa_growth(kernel, n_list, tol)) out.append(py::make_tuple(r.n, r.kappa));
          return out;
        },
        py::arg("R"), py::arg("n_list"), py::arg("tol") = 1e-6, "List of (n, kappa_2(Gamma)).");
  m.def("loglog_slope", &loglog_slope, py::arg("x"), py::arg("y"), py::arg("discard") = 2);
}
