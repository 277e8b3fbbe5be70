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

#include "slra/problem_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "slra/errors.hpp"

namespace slra {

namespace {

using json = nlohmann::json;

// An InputError that already carries its field path.
class FieldError : public InputError {
 public:
  using InputError::InputError;
};

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw FieldError(path + ": " + msg);
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw InputError(what + ": " + e.what());
  }
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) fail(path, "unknown field '" + key + "'");
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing field '" + key + "'");
  return *it;
}

std::string sub(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

Index get_index(const json& v, const std::string& path, Index min_value) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  const auto x = v.get<long long>();
  if (x < min_value) fail(path, "expected an integer >= " + std::to_string(min_value));
  return static_cast<Index>(x);
}

double get_double(const json& v, const std::string& path, bool allow_inf) {
  if (v.is_number()) return v.get<double>();
  if (allow_inf && v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "Infinity" || s == "+Infinity" || s == "INF")
      return std::numeric_limits<double>::infinity();
  }
  fail(path, allow_inf ? "expected a number or \"inf\"" : "expected a number");
}

Vector get_vector(const json& v, const std::string& path, bool allow_inf = false) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = get_double(v[i], at(path, i), allow_inf);
  return out;
}

std::vector<Index> get_index_list(const json& v, const std::string& path, Index min_value) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of integers");
  std::vector<Index> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_index(v[i], at(path, i), min_value));
  return out;
}

Matrix get_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t rows = v.size();
  if (!v[0].is_array() || v[0].empty()) fail(at(path, 0), "expected a non-empty row");
  const std::size_t cols = v[0].size();
  Matrix out(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols)
      fail(at(path, i), "expected a row of length " + std::to_string(cols));
    for (std::size_t j = 0; j < cols; ++j)
      out(static_cast<Index>(i), static_cast<Index>(j)) = get_double(v[i][j], at(at(path, i), j), false);
  }
  return out;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Structure parse_structure(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  const json& kind_v = require(v, "kind", path);
  if (!kind_v.is_string()) fail(sub(path, "kind"), "expected a string");
  const std::string kind = kind_v.get<std::string>();
  try {
    if (kind == "hankel") {
      check_keys(v, path, {"kind", "m", "n"});
      return HankelStructure(get_index(require(v, "m", path), sub(path, "m"), 1),
                             get_index(require(v, "n", path), sub(path, "n"), 1));
    }
    if (kind == "mosaic") {
      check_keys(v, path, {"kind", "m_vec", "n_vec"});
      return MosaicHankelStructure(get_index_list(require(v, "m_vec", path), sub(path, "m_vec"), 1),
                                   get_index_list(require(v, "n_vec", path), sub(path, "n_vec"), 1));
    }
    if (kind == "general") {
      check_keys(v, path, {"kind", "m", "n", "np", "S0", "basis"});
      const Index m = get_index(require(v, "m", path), sub(path, "m"), 1);
      const Index n = get_index(require(v, "n", path), sub(path, "n"), 1);
      const json& bv = require(v, "basis", path);
      const std::string bpath = sub(path, "basis");
      if (!bv.is_array()) fail(bpath, "expected an array of coordinate lists");
      std::vector<std::vector<Entry>> basis;
      for (std::size_t k = 0; k < bv.size(); ++k) {
        const std::string kp = at(bpath, k);
        if (!bv[k].is_array()) fail(kp, "expected an array of [row, col, value] triplets");
        std::vector<Entry> entries;
        for (std::size_t e = 0; e < bv[k].size(); ++e) {
          const json& t = bv[k][e];
          const std::string ep = at(kp, e);
          if (!t.is_array() || t.size() != 3) fail(ep, "expected [row, col, value]");
          const Index row = get_index(t[0], at(ep, 0), 0);
          const Index col = get_index(t[1], at(ep, 1), 0);
          if (row >= m) fail(at(ep, 0), "row index out of range");
          if (col >= n) fail(at(ep, 1), "column index out of range");
          entries.push_back({row, col, get_double(t[2], at(ep, 2), false)});
        }
        basis.push_back(std::move(entries));
      }
      if (v.contains("np") &&
          get_index(v["np"], sub(path, "np"), 0) != static_cast<Index>(basis.size()))
        fail(sub(path, "np"), "does not match the number of basis matrices");
      Matrix s0 = Matrix::Zero(m, n);
      if (v.contains("S0")) {
        s0 = get_matrix(v["S0"], sub(path, "S0"));
        if (s0.rows() != m || s0.cols() != n) fail(sub(path, "S0"), "expected an m x n matrix");
      }
      return GeneralAffineStructure(m, n, std::move(s0), std::move(basis));
    }
    if (kind == "phi") {
      check_keys(v, path, {"kind", "phi", "inner"});
      Matrix phi = get_matrix(require(v, "phi", path), sub(path, "phi"));
      Structure inner = parse_structure(require(v, "inner", path), sub(path, "inner"));
      return PhiComposedStructure(std::move(phi), std::move(inner));
    }
  } catch (const FieldError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
  fail(sub(path, "kind"), "unknown structure kind '" + kind + "' (expected hankel, mosaic, general or phi)");
}

template <class F>
WeightSpec build_weights(const std::string& path, F&& make) {
  try {
    return make();
  } catch (const FieldError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

WeightSpec parse_weights(const json& doc, Index np) {
  int given = 0;
  for (const char* k : {"w", "W", "Winv_band"}) given += doc.contains(k) ? 1 : 0;
  if (given > 1) fail("problem", "give at most one of 'w', 'W' and 'Winv_band'");
  if (doc.contains("w")) {
    const Vector w = get_vector(doc["w"], "w", true);
    if (w.size() != np) fail("w", "expected " + std::to_string(np) + " weights");
    return build_weights("w", [&] { return WeightSpec::diagonal(w); });
  }
  if (doc.contains("W")) {
    const Matrix w = get_matrix(doc["W"], "W");
    if (w.rows() != np || w.cols() != np) fail("W", "expected an np x np matrix");
    return build_weights("W", [&] { return WeightSpec::full(w); });
  }
  if (doc.contains("Winv_band")) {
    const json& wb = doc["Winv_band"];
    check_keys(wb, "Winv_band", {"bandwidth", "band"});
    const Index b = get_index(require(wb, "bandwidth", "Winv_band"), "Winv_band.bandwidth", 0);
    const json& band = require(wb, "band", "Winv_band");
    if (!band.is_array() || static_cast<Index>(band.size()) != b + 1)
      fail("Winv_band.band", "expected bandwidth + 1 diagonals");
    Matrix winv = Matrix::Zero(np, np);
    for (Index k = 0; k <= b; ++k) {
      const std::string dp = at("Winv_band.band", static_cast<std::size_t>(k));
      const Vector diag = get_vector(band[static_cast<std::size_t>(k)], dp);
      if (diag.size() < np - k) fail(dp, "expected at least " + std::to_string(np - k) + " entries");
      for (Index i = 0; i + k < np; ++i) {
        winv(i + k, i) = diag(i);
        winv(i, i + k) = diag(i);
      }
    }
    return build_weights("Winv_band", [&] { return WeightSpec::from_inverse(winv); });
  }
  return WeightSpec::identity(np);
}

SolverOptions parse_options(const json& v, const std::string& path) {
  check_keys(v, path,
             {"parametrization", "max_iter", "grad_tol", "step_tol", "lm_lambda0", "lm_up", "lm_down",
              "hessian_source", "multistart", "seed"});
  SolverOptions o;
  if (v.contains("parametrization")) {
    const std::string s = v["parametrization"].is_string() ? v["parametrization"].get<std::string>() : "";
    if (s == "stls_xi")
      o.parametrization = Parametrization::stls_xi;
    else if (s == "full_r")
      o.parametrization = Parametrization::full_r;
    else
      fail(sub(path, "parametrization"), "expected \"stls_xi\" or \"full_r\"");
  }
  if (v.contains("hessian_source")) {
    const std::string s = v["hessian_source"].is_string() ? v["hessian_source"].get<std::string>() : "";
    if (s == "pseudo_jacobian")
      o.hessian_source = HessianSource::pseudo_jacobian;
    else if (s == "jacobian_dp")
      o.hessian_source = HessianSource::jacobian_dp;
    else
      fail(sub(path, "hessian_source"), "expected \"pseudo_jacobian\" or \"jacobian_dp\"");
  }
  if (v.contains("max_iter")) o.max_iter = static_cast<int>(get_index(v["max_iter"], sub(path, "max_iter"), 0));
  if (v.contains("multistart"))
    o.multistart = static_cast<int>(get_index(v["multistart"], sub(path, "multistart"), 1));
  if (v.contains("seed")) o.seed = static_cast<std::uint64_t>(get_index(v["seed"], sub(path, "seed"), 0));
  if (v.contains("grad_tol")) o.grad_tol = get_double(v["grad_tol"], sub(path, "grad_tol"), false);
  if (v.contains("step_tol")) o.step_tol = get_double(v["step_tol"], sub(path, "step_tol"), false);
  if (v.contains("lm_lambda0")) o.lm_lambda0 = get_double(v["lm_lambda0"], sub(path, "lm_lambda0"), false);
  if (v.contains("lm_up")) o.lm_up = get_double(v["lm_up"], sub(path, "lm_up"), false);
  if (v.contains("lm_down")) o.lm_down = get_double(v["lm_down"], sub(path, "lm_down"), false);
  try {
    o.validate();
  } catch (const InputError& e) {
    fail(path, e.what());
  }
  return o;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Problem parse_problem(const std::string& text) {
  const json doc = parse_json(text, "problem file");
  check_keys(doc, "problem", {"structure", "p", "rank", "w", "W", "Winv_band", "R0", "options"});
  Structure s = parse_structure(require(doc, "structure", "problem"), "structure");
  const Index np = s.num_params();
  Vector p = get_vector(require(doc, "p", "problem"), "p");
  if (p.size() != np)
    fail("p", "expected " + std::to_string(np) + " entries for this structure, got " + std::to_string(p.size()));
  WeightSpec w = parse_weights(doc, np);

  const Index rank = get_index(require(doc, "rank", "problem"), "rank", 0);
  const Index m = s.rows();
  const Index n = s.cols();
  if (rank >= std::min(m, n)) fail("rank", "must be smaller than min(m, n) = " + std::to_string(std::min(m, n)));
  const Index mo = std::min(m, n);
  const Index no = std::max(m, n);
  const Index d = mo - rank;
  if (np < no * d)
    throw NecessaryConditionError("rank: necessary condition np >= n*d violated (np = " + std::to_string(np) +
                                  ", n = " + std::to_string(no) + ", d = " + std::to_string(d) +
                                  "); no kernel R makes Gamma(R) invertible");

  std::optional<Matrix> r0;
  if (doc.contains("R0")) {
    if (m > n) fail("R0", "an initial kernel is not supported when m > n");
    r0 = get_matrix(doc["R0"], "R0");
    if (r0->rows() != d || r0->cols() != m)
      fail("R0", "expected a " + std::to_string(d) + " x " + std::to_string(m) + " matrix");
  }
  SolverOptions opts;
  if (doc.contains("options")) opts = parse_options(doc["options"], "options");
  return Problem{std::move(s), std::move(w), std::move(p), rank, std::move(r0), opts};
}

Problem load_problem(const std::string& path) { return parse_problem(read_text_file(path)); }

std::string result_to_json(const SolveResult& res, int indent) {
  json out;
  out["f_opt"] = res.f_opt;
  out["p_hat"] = vector_json(res.p_hat);
  out["R_opt"] = matrix_json(res.r_opt);
  out["iterations"] = res.iterations;
  out["convergence_reason"] = to_string(res.reason);
  out["rank_ratio"] = res.rank_ratio;
  out["rank_certified"] = res.rank_certified;
  out["transposed"] = res.transposed;
  json trace = json::array();
  for (const TraceEntry& t : res.trace)
    trace.push_back({{"iter", t.iter}, {"f", t.f}, {"grad_norm", t.grad_norm}, {"lambda", t.lambda},
                     {"step_norm", t.step_norm}});
  out["trace"] = trace;
  return out.dump(indent);
}

ResultFile parse_result(const std::string& text) {
  const json doc = parse_json(text, "result file");
  if (!doc.is_object()) fail("result", "expected an object");
  ResultFile r;
  r.r_opt = get_matrix(require(doc, "R_opt", "result"), "R_opt");
  r.p_hat = get_vector(require(doc, "p_hat", "result"), "p_hat");
  r.f_opt = get_double(require(doc, "f_opt", "result"), "f_opt", false);
  const json& reason = require(doc, "convergence_reason", "result");
  if (!reason.is_string()) fail("convergence_reason", "expected a string");
  r.convergence_reason = reason.get<std::string>();
  return r;
}

BenchPlan parse_bench_plan(const std::string& text) {
  const json doc = parse_json(text, "bench plan");
  check_keys(doc, "plan", {"instances", "family", "operations", "reps", "seed"});
  BenchPlan plan;
  if (doc.contains("instances")) {
    const json& arr = doc["instances"];
    if (!arr.is_array()) fail("instances", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string ip = at("instances", i);
      check_keys(arr[i], ip, {"m_vec", "n_vec", "d", "variant"});
      BenchInstance inst;
      inst.m_vec = get_index_list(require(arr[i], "m_vec", ip), sub(ip, "m_vec"), 1);
      inst.n_vec = get_index_list(require(arr[i], "n_vec", ip), sub(ip, "n_vec"), 1);
      if (arr[i].contains("d")) inst.d = get_index(arr[i]["d"], sub(ip, "d"), 1);
      if (arr[i].contains("variant")) {
        if (!arr[i]["variant"].is_string()) fail(sub(ip, "variant"), "expected a string");
        inst.variant = parse_weight_variant(arr[i]["variant"].get<std::string>());
      }
      plan.instances.push_back(std::move(inst));
    }
  }
  if (doc.contains("family")) {
    const json& f = doc["family"];
    check_keys(f, "family", {"name", "k_max", "variants"});
    const json& name = require(f, "name", "family");
    if (!name.is_string() || name.get<std::string>() != "ex1") fail("family.name", "only \"ex1\" is known");
    const int k_max = f.contains("k_max") ? static_cast<int>(get_index(f["k_max"], "family.k_max", 0)) : 10;
    std::vector<WeightVariant> variants{WeightVariant::block_wise, WeightVariant::element_wise};
    if (f.contains("variants")) {
      variants.clear();
      if (!f["variants"].is_array()) fail("family.variants", "expected an array");
      for (std::size_t i = 0; i < f["variants"].size(); ++i) {
        if (!f["variants"][i].is_string()) fail(at("family.variants", i), "expected a string");
        variants.push_back(parse_weight_variant(f["variants"][i].get<std::string>()));
      }
    }
    for (WeightVariant v : variants) {
      const auto fam = ex1_family(v, k_max);
      plan.instances.insert(plan.instances.end(), fam.begin(), fam.end());
    }
  }
  if (plan.instances.empty()) fail("plan", "no instances (give 'instances' or 'family')");
  if (doc.contains("operations")) {
    plan.operations.clear();
    const json& ops = doc["operations"];
    if (!ops.is_array()) fail("operations", "expected an array");
    for (std::size_t i = 0; i < ops.size(); ++i) {
      if (!ops[i].is_string()) fail(at("operations", i), "expected a string");
      plan.operations.push_back(parse_bench_operation(ops[i].get<std::string>()));
    }
  }
  if (doc.contains("reps")) plan.reps = static_cast<int>(get_index(doc["reps"], "reps", 1));
  if (doc.contains("seed")) plan.seed = static_cast<std::uint64_t>(get_index(doc["seed"], "seed", 0));
  return plan;
}

CondSpec parse_cond_spec(const std::string& text) {
  const json doc = parse_json(text, "cond spec");
  check_keys(doc, "spec", {"roots", "R", "n_list", "n_min", "n_max", "n_step", "tol", "samples"});
  CondSpec spec;
  if (doc.contains("roots") == doc.contains("R")) fail("spec", "give exactly one of 'roots' and 'R'");
  if (doc.contains("roots")) {
    const json& rv = doc["roots"];
    if (!rv.is_array()) fail("roots", "expected an array of [re, im] pairs");
    std::vector<Complex> roots;
    for (std::size_t i = 0; i < rv.size(); ++i) {
      if (!rv[i].is_array() || rv[i].size() != 2) fail(at("roots", i), "expected [re, im]");
      roots.emplace_back(get_double(rv[i][0], at(at("roots", i), 0), false),
                         get_double(rv[i][1], at(at("roots", i), 1), false));
    }
    spec.kernel = kernel_from_roots(roots);
  } else {
    const Vector c = get_vector(doc["R"], "R");
    if (c.size() < 1) fail("R", "expected at least one coefficient");
    spec.kernel = c.transpose();
  }
  if (doc.contains("n_list")) {
    spec.n_list = get_index_list(doc["n_list"], "n_list", 1);
  } else {
    const Index lo = get_index(require(doc, "n_min", "spec"), "n_min", 1);
    const Index hi = get_index(require(doc, "n_max", "spec"), "n_max", lo);
    const Index step = doc.contains("n_step") ? get_index(doc["n_step"], "n_step", 1) : lo;
    for (Index n = lo; n <= hi; n += step) spec.n_list.push_back(n);
  }
  if (doc.contains("tol")) spec.tol = get_double(doc["tol"], "tol", false);
  if (doc.contains("samples")) spec.samples = static_cast<int>(get_index(doc["samples"], "samples", 64));
  return spec;
}

Matrix parse_matrix_text(const std::string& text) {
  return get_matrix(parse_json(text, "matrix"), "R");
}

}  // namespace slra
