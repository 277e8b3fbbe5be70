# Copyright 2026 The slra Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""End-to-end checks of the slra command line tool.

Usage: cli_test.py SLRA_BINARY DATA_DIR
"""

import csv
import io
import json
import math
import os
import subprocess
import sys
import tempfile
import unittest

BINARY = ""
DATA = ""


def run(*args):
    return subprocess.run([BINARY, *args], capture_output=True, text=True, check=False)


def data(name):
    return os.path.join(DATA, name)


class ExitCodes(unittest.TestCase):
    def test_solve_ok(self):
        res = run("solve", data("running_example.json"))
        self.assertEqual(res.returncode, 0, res.stderr)
        out = json.loads(res.stdout)
        self.assertEqual(out["convergence_reason"], "grad_tol")
        self.assertAlmostEqual(out["f_opt"], 0.14868267025125848, delta=1e-12)
        self.assertTrue(out["rank_certified"])

    def test_input_errors(self):
        res = run("solve", data("nc_violation.json"))
        self.assertEqual(res.returncode, 1)
        self.assertIn("np >= n*d", res.stderr)
        res = run("validate", data("unknown_field.json"))
        self.assertEqual(res.returncode, 1)
        self.assertIn("problem: unknown field 'colour'", res.stderr)

    def test_iteration_limit(self):
        res = run("solve", data("running_example.json"), "--max-iter", "1")
        self.assertEqual(res.returncode, 2)
        self.assertEqual(json.loads(res.stdout)["convergence_reason"], "max_iter")

    def test_singular_gamma(self):
        res = run("eval", data("running_example.json"), "--what", "cost", "--R", "[[0, 0]]")
        self.assertEqual(res.returncode, 3)
        self.assertIn("singular", res.stderr)

    def test_validate(self):
        res = run("validate", data("mosaic_weighted.json"))
        self.assertEqual(res.returncode, 0, res.stderr)
        self.assertIn("fixed=1", res.stdout)


class Eval(unittest.TestCase):
    def test_running_example_values(self):
        res = run("eval", data("running_example.json"), "--what", "cost", "--R", "[[1, -1]]")
        self.assertEqual(res.returncode, 0, res.stderr)
        self.assertAlmostEqual(float(res.stdout), 5.0, delta=1e-12)
        res = run("eval", data("running_example.json"), "--what", "correction", "--R", "[[1, -1]]")
        dp = [float(v) for v in res.stdout.split()]
        for got, want in zip(dp, [-1.5, -0.5, 0.5, 1.5]):
            self.assertAlmostEqual(got, want, delta=1e-12)
        res = run("eval", data("running_example.json"), "--what", "grad", "--R", "[[1, -1]]")
        for got in res.stdout.split():
            self.assertAlmostEqual(float(got), -25.0, delta=1e-10)

    def test_result_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            result = os.path.join(tmp, "result.json")
            res = run("solve", data("mosaic_weighted.json"), "-o", result)
            self.assertEqual(res.returncode, 0, res.stderr)
            with open(result, encoding="utf-8") as fh:
                solved = json.load(fh)
            res = run("eval", data("mosaic_weighted.json"), "--what", "cost", "--result", result)
            self.assertEqual(res.returncode, 0, res.stderr)
            f = float(res.stdout)
            self.assertLessEqual(abs(f - solved["f_opt"]), 1e-12 * max(1.0, solved["f_opt"]))
            # The fixed sample is preserved exactly.
            self.assertEqual(solved["p_hat"][8], 5.0)

    def test_debug_gamma_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "gamma.csv")
            res = run("eval", data("running_example.json"), "--what", "cost", "--R", "[[1, -1]]",
                      "--debug-gamma-csv", path)
            self.assertEqual(res.returncode, 0, res.stderr)
            with open(path, encoding="utf-8") as fh:
                self.assertEqual(fh.read(), "block_row,block_col,g0_0\n0,0,2\n0,1,-1\n1,1,2\n1,2,-1\n2,2,2\n")


class Analysis(unittest.TestCase):
    def test_bench_csv(self):
        res = run("bench", data("bench_small.json"))
        self.assertEqual(res.returncode, 0, res.stderr)
        rows = list(csv.DictReader(io.StringIO(res.stdout)))
        self.assertEqual(len(rows), 4)
        self.assertEqual({r["variant"] for r in rows}, {"block_wise", "element_wise"})
        for r in rows:
            self.assertEqual(r["reps"], "5")
            self.assertGreaterEqual(float(r["time_ms"]), 0.0)

    def test_cond_grows(self):
        res = run("cond", data("cond_pair.json"))
        self.assertEqual(res.returncode, 0, res.stderr)
        lines = [ln for ln in res.stdout.splitlines() if not ln.startswith("#")]
        rows = list(csv.DictReader(io.StringIO("\n".join(lines))))
        kappa = [float(r["kappa"]) for r in rows]
        self.assertEqual(len(kappa), 3)
        # One root pair on the circle: roughly quadratic growth.
        slope = math.log(kappa[2] / kappa[1]) / math.log(2.0)
        self.assertGreater(slope, 1.5)
        self.assertLess(slope, 2.5)


if __name__ == "__main__":
    BINARY, DATA = sys.argv[1], sys.argv[2]
    unittest.main(argv=sys.argv[:1])
