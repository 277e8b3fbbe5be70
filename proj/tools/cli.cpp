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

#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "slra/analysis.hpp"
#include "slra/errors.hpp"
#include "slra/optimizer.hpp"
#include "slra/problem_io.hpp"
#include "slra/varpro.hpp"

namespace slra::cli {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void write_matrix(std::ostream& os, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << fmt(m(i, j));
    os << '\n';
  }
}

// Writes to `path`, or to stdout when it is empty or "-".
template <class F>
void with_output(const std::string& path, F&& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  body(out);
}

struct SolverFlags {
  std::string parametrization;
  int max_iter = 0;
  double grad_tol = 0;
  double step_tol = 0;
  double lm_lambda0 = 0;
  double lm_up = 0;
  double lm_down = 0;
  std::string hessian_source;
  int multistart = 1;
  std::uint64_t seed = 0;
  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App* app) {
    opts["parametrization"] = app->add_option("--parametrization", parametrization, "stls_xi or full_r")
                                  ->check(CLI::IsMember({"stls_xi", "full_r"}));
    opts["max_iter"] = app->add_option("--max-iter", max_iter, "iteration limit (default 100)");
    opts["grad_tol"] = app->add_option("--grad-tol", grad_tol, "relative gradient tolerance (default 1e-8)");
    opts["step_tol"] = app->add_option("--step-tol", step_tol, "relative step tolerance (default 1e-12)");
    opts["lm_lambda0"] = app->add_option("--lm-lambda0", lm_lambda0, "initial damping (default 1e-3)");
    opts["lm_up"] = app->add_option("--lm-up", lm_up, "damping increase factor (default 10)");
    opts["lm_down"] = app->add_option("--lm-down", lm_down, "damping decrease factor (default 0.1)");
    opts["hessian_source"] =
        app->add_option("--hessian-source", hessian_source, "pseudo_jacobian or jacobian_dp")
            ->check(CLI::IsMember({"pseudo_jacobian", "jacobian_dp"}));
    opts["multistart"] = app->add_option("--multistart", multistart, "number of starting kernels");
    opts["seed"] = app->add_option("--seed", seed, "seed for random starting kernels (default 0)");
  }

  bool given(const char* name) const { return opts.at(name)->count() > 0; }

  void apply(SolverOptions& o) const {
    if (given("parametrization"))
      o.parametrization = parametrization == "full_r" ? Parametrization::full_r : Parametrization::stls_xi;
    if (given("hessian_source"))
      o.hessian_source =
          hessian_source == "jacobian_dp" ? HessianSource::jacobian_dp : HessianSource::pseudo_jacobian;
    if (given("max_iter")) o.max_iter = max_iter;
    if (given("grad_tol")) o.grad_tol = grad_tol;
    if (given("step_tol")) o.step_tol = step_tol;
    if (given("lm_lambda0")) o.lm_lambda0 = lm_lambda0;
    if (given("lm_up")) o.lm_up = lm_up;
    if (given("lm_down")) o.lm_down = lm_down;
    if (given("multistart")) o.multistart = multistart;
    if (given("seed")) o.seed = seed;
    o.validate();
  }
};

void dump_gamma(const Evaluator& ev, const Matrix& r, const std::string& path) {
  if (path.empty()) return;
  const GammaSystem gs = ev.gamma(r, false);
  with_output(path, [&](std::ostream& os) { gs.write_band_csv(os); });
}

int cmd_solve(const std::string& file, const std::string& out_path, const std::string& trace_path,
              const std::string& gamma_csv, const SolverFlags& flags) {
  Problem prob = load_problem(file);
  flags.apply(prob.options);
  const SolveResult res = solve(prob.structure, prob.weights, prob.p, prob.rank, prob.options, prob.r0);
  with_output(out_path, [&](std::ostream& os) { os << result_to_json(res) << '\n'; });
  if (!trace_path.empty()) {
    with_output(trace_path, [&](std::ostream& os) {
      os << "iter,f,grad_norm,lambda,step_norm\n";
      for (const TraceEntry& t : res.trace)
        os << t.iter << ',' << fmt(t.f) << ',' << fmt(t.grad_norm) << ',' << fmt(t.lambda) << ','
           << fmt(t.step_norm) << '\n';
    });
  }
  if (!gamma_csv.empty()) {
    const Evaluator ev(prob.structure, prob.weights, prob.p);
    dump_gamma(ev, res.r_opt, gamma_csv);
  }
  std::cerr << "f_opt = " << fmt(res.f_opt) << ", iterations = " << res.iterations
            << ", reason = " << to_string(res.reason) << ", rank ratio = " << fmt(res.rank_ratio)
            << (res.rank_certified ? "" : " (rank certificate failed)") << '\n';
  return res.reason == StopReason::max_iter ? kNotConverged : kOk;
}

int cmd_eval(const std::string& file, const std::string& what, const std::string& r_json,
             const std::string& result_path, const std::string& out_path, const std::string& gamma_csv) {
  const Problem prob = load_problem(file);
  Matrix r;
  if (!r_json.empty())
    r = parse_matrix_text(r_json);
  else if (!result_path.empty())
    r = parse_result(read_text_file(result_path)).r_opt;
  else if (prob.r0)
    r = *prob.r0;
  else
    throw InputError("no kernel given: use --R, --result or an R0 field in the problem file");

  const Evaluator ev(prob.structure, prob.weights, prob.p);
  dump_gamma(ev, r, gamma_csv);
  EvalRequest req;
  if (what == "correction") req.correction = true;
  if (what == "grad") req.gradient = true;
  if (what == "jac") req.jacobian = true;
  if (what == "pjac") req.pseudo_jacobian = true;
  const Evaluation e = ev.evaluate(r, req);
  with_output(out_path, [&](std::ostream& os) {
    if (what == "cost") os << fmt(e.f) << '\n';
    if (what == "correction")
      for (Index i = 0; i < e.dp_star->size(); ++i) os << fmt((*e.dp_star)(i)) << '\n';
    if (what == "grad") write_matrix(os, *e.grad);
    if (what == "jac") write_matrix(os, *e.jac);
    if (what == "pjac") write_matrix(os, *e.pseudo_jac);
  });
  return kOk;
}

int cmd_bench(const std::string& file, const std::string& out_path) {
  const BenchPlan plan = parse_bench_plan(read_text_file(file));
  const auto records = bench_scaling(plan, [](const BenchRecord& r) {
    std::cerr << to_string(r.variant) << ' ' << to_string(r.operation) << " m=" << r.m << " n=" << r.n
              << " d=" << r.d << ": " << r.time_ms << " ms\n";
  });
  with_output(out_path, [&](std::ostream& os) { write_bench_csv(os, records); });

  std::map<std::pair<std::string, std::string>, std::vector<const BenchRecord*>> groups;
  for (const BenchRecord& r : records) groups[{to_string(r.variant), to_string(r.operation)}].push_back(&r);
  for (const auto& [key, recs] : groups) {
    std::set<Index> ns;
    std::set<Index> ms;
    for (const BenchRecord* r : recs) {
      ns.insert(r->n);
      ms.insert(r->m);
    }
    const bool by_n = ns.size() >= ms.size();
    if ((by_n ? ns.size() : ms.size()) < 4) continue;
    std::vector<double> x;
    std::vector<double> y;
    for (const BenchRecord* r : recs) {
      x.push_back(static_cast<double>(by_n ? r->n : r->m));
      y.push_back(r->time_ms);
    }
    std::cerr << "slope," << key.first << ',' << key.second << ',' << (by_n ? "n" : "m") << ','
              << loglog_slope(x, y) << '\n';
  }
  return kOk;
}

int cmd_cond(const std::string& file, const std::string& out_path) {
  const CondSpec spec = parse_cond_spec(read_text_file(file));
  const auto rows = kappa_growth(spec.kernel, spec.n_list, spec.tol);

  const Index m = spec.kernel.cols();
  const Structure s{HankelStructure(m, std::max<Index>(m, 2))};
  const auto vb = make_vblocks(s, WeightSpec::identity(s.num_params()));
  const GfBounds b = gf_bounds(GeneratingFunction::from_gamma(GammaSystem::build(*vb, spec.kernel)), spec.samples);

  with_output(out_path, [&](std::ostream& os) {
    os << "n,kappa,lambda_min,lambda_max\n";
    std::vector<double> x;
    std::vector<double> y;
    for (const KappaRow& r : rows) {
      os << r.n << ',' << fmt(r.kappa) << ',' << fmt(r.lambda_min) << ',' << fmt(r.lambda_max) << '\n';
      x.push_back(static_cast<double>(r.n));
      y.push_back(r.kappa);
    }
    os << "# a_F=" << fmt(b.a_f) << " b_F=" << fmt(b.b_f) << '\n';
    if (rows.size() >= 4) os << "# loglog_slope=" << fmt(loglog_slope(x, y)) << '\n';
  });
  return kOk;
}

int cmd_validate(const std::string& file) {
  const Problem prob = load_problem(file);
  const char* kinds[] = {"general", "hankel", "mosaic", "phi"};
  std::cout << "ok: kind=" << kinds[static_cast<int>(prob.structure.kind())] << " m=" << prob.structure.rows()
            << " n=" << prob.structure.cols() << " np=" << prob.structure.num_params()
            << " rank=" << prob.rank << " weights=" << (prob.weights.is_diagonal() ? "diagonal" : "full")
            << " fixed=" << prob.weights.fixed_indices().size() << '\n';
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Structured low-rank approximation by variable projection"};
  app.require_subcommand(1);

  std::string problem;
  std::string out_path;
  std::string trace_path;
  std::string gamma_csv;
  SolverFlags flags;
  auto* solve_cmd = app.add_subcommand("solve", "solve a problem file and write the result as JSON");
  solve_cmd->add_option("problem", problem, "problem file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("-o,--output", out_path, "result file (default stdout)");
  solve_cmd->add_option("--trace", trace_path, "iteration trace CSV");
  solve_cmd->add_option("--debug-gamma-csv", gamma_csv, "dump the Gamma band at the solution");
  flags.attach(solve_cmd);

  std::string what = "cost";
  std::string r_json;
  std::string result_path;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate cost or derivatives at a kernel R");
  eval_cmd->add_option("problem", problem, "problem file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--what", what, "cost, grad, jac, pjac or correction")
      ->check(CLI::IsMember({"cost", "grad", "jac", "pjac", "correction"}));
  eval_cmd->add_option("--R", r_json, "kernel as a JSON array of rows");
  eval_cmd->add_option("--result", result_path, "take R_opt from a result file")->check(CLI::ExistingFile);
  eval_cmd->add_option("-o,--output", out_path, "output file (default stdout)");
  eval_cmd->add_option("--debug-gamma-csv", gamma_csv, "dump the Gamma band at R");

  auto* bench_cmd = app.add_subcommand("bench", "time cost, gradient and pseudo-Jacobian evaluation");
  bench_cmd->add_option("plan", problem, "benchmark plan file")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("-o,--output", out_path, "CSV file (default stdout)");

  auto* cond_cmd = app.add_subcommand("cond", "condition number growth of Gamma for a scalar Hankel kernel");
  cond_cmd->add_option("spec", problem, "conditioning spec file")->required()->check(CLI::ExistingFile);
  cond_cmd->add_option("-o,--output", out_path, "CSV file (default stdout)");

  auto* validate_cmd = app.add_subcommand("validate", "check a problem file");
  validate_cmd->add_option("problem", problem, "problem file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*solve_cmd) return cmd_solve(problem, out_path, trace_path, gamma_csv, flags);
    if (*eval_cmd) return cmd_eval(problem, what, r_json, result_path, out_path, gamma_csv);
    if (*bench_cmd) return cmd_bench(problem, out_path);
    if (*cond_cmd) return cmd_cond(problem, out_path);
    if (*validate_cmd) return cmd_validate(problem);
  } catch (const SingularGamma& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSingularGamma;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace slra::cli
