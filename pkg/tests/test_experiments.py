"""
Tests for the experiment drivers behind the CLI
"""
import math
import unittest

from discrimlab.bell import D_THRESHOLD
from discrimlab.config import RunConfig
from discrimlab.experiments import BELL_COLUMNS, DISCRIM_COLUMNS, Report, run, run_sample

HALF_OVERLAP_D = 0.5 * (1 + math.sqrt(0.5))
TSIRELSON = 2 * math.sqrt(2)


def _run(**kwargs):
    kwargs.setdefault("workers", 2)
    return run(RunConfig(**kwargs).validate())


class TestReport(unittest.TestCase):

    def test_passed_counts_failures(self):
        report = Report("x", ["passed"], [{"passed": True}, {"passed": None}, {"passed": False}])
        self.assertEqual(report.failures, 1)
        self.assertFalse(report.passed)

    def test_verdict_overrides_rows(self):
        self.assertTrue(Report("x", ["a"], [{"a": 1}], verdict=True).passed)
        self.assertTrue(Report("x", ["a"]).passed)


class TestDiscrim(unittest.TestCase):

    def test_single_overlap(self):
        report = _run(command="discrim", gamma2=0.5, samples=100_000)
        self.assertEqual(report.columns, DISCRIM_COLUMNS)
        (row,) = report.rows
        self.assertAlmostEqual(row["d_closed"], HALF_OVERLAP_D, places=12)
        self.assertLess(row["equivalence_gap"], 1e-10)
        self.assertAlmostEqual(row["d_op_sampled"], HALF_OVERLAP_D, delta=0.02)
        self.assertTrue(report.passed)

    def test_sweep_boundaries(self):
        report = _run(command="discrim", eta1=0.7, points=3, samples=1000)
        self.assertEqual([row["gamma2"] for row in report.rows], [0.0, 0.5, 1.0])
        self.assertAlmostEqual(report.rows[0]["d_closed"], 1.0, places=12)
        self.assertAlmostEqual(report.rows[2]["d_closed"], 0.49 + 0.09 + (0.21 - 0.09), places=12)
        self.assertTrue(report.passed)

    def test_timings_column(self):
        report = _run(command="discrim", gamma2=0.2, samples=100, timings=True)
        self.assertEqual(report.columns[-1], "runtime")
        self.assertIn("runtime", report.rows[0])

    def test_workers_do_not_change_rows(self):
        one = _run(command="discrim", points=5, samples=1000, workers=1)
        many = _run(command="discrim", points=5, samples=1000, workers=4)
        self.assertEqual(one.rows, many.rows)


class TestOntic(unittest.TestCase):

    def test_saturation_sweep(self):
        report = _run(command="ontic-bound", q=0.5, points=6)
        self.assertEqual(len(report.rows), 6)
        for row in report.rows:
            self.assertLess(abs(row["saturation_gap"]), 1e-12)
        self.assertTrue(report.passed)

    def test_contradiction_check(self):
        report = _run(command="ontic-bound", eta1=0.5, gamma2=0.5, points=5)
        self.assertAlmostEqual(report.rows[0]["q"], HALF_OVERLAP_D, places=12)
        self.assertLess(abs(report.rows[0]["margin"]), 1e-12)
        self.assertTrue(report.passed)

    def test_sharp_search(self):
        report = _run(command="ontic-search", q=0.0, c=0.3, resolution=1000)
        (row,) = report.rows
        self.assertAlmostEqual(row["bound"], 0.4, places=12)
        self.assertAlmostEqual(row["search_max"], 0.4, places=12)
        self.assertTrue(row["passed"])

    def test_free_search(self):
        report = _run(command="ontic-search", q=0.0, sharp=False, resolution=101)
        (row,) = report.rows
        self.assertAlmostEqual(row["capped_max"], 1.0, places=9)
        self.assertEqual(row["witness_value"], 1.0)
        self.assertTrue(report.passed)

    def test_general_search(self):
        report = _run(command="ontic-search", n_states=3, q=0.5, c=0.2, budget=2000)
        (row,) = report.rows
        self.assertGreaterEqual(row["best_d_op"], 0.8 - 1e-12)
        self.assertTrue(row["lower_bound"])


class TestBell(unittest.TestCase):

    def test_verify_maximally_entangled(self):
        report = _run(command="bell-verify", samples=10_000)
        self.assertEqual(report.columns, BELL_COLUMNS)
        (row,) = report.rows
        self.assertEqual(row["label"], "phi_plus")
        self.assertAlmostEqual(row["bound"], TSIRELSON, places=9)
        self.assertAlmostEqual(row["s_max"], TSIRELSON, delta=1e-6)
        self.assertTrue(row["violation"])
        self.assertTrue(row["separation_holds"])
        self.assertTrue(report.passed)

    def test_verify_partially_entangled(self):
        theta = 0.3
        (row,) = _run(command="bell-verify", theta=theta, samples=1000).rows
        self.assertAlmostEqual(row["closed_form"], 2 * math.sqrt(1 + math.sin(2 * theta) ** 2), places=10)
        self.assertTrue(row["passed"])

    def test_theta_sweep_is_monotone(self):
        report = _run(command="bell-sweep", sweep="theta", points=5, samples=1000)
        values = [row["s_max"] for row in report.rows]
        self.assertEqual(values, sorted(values))
        self.assertTrue(report.passed)

    def test_threshold_sweep(self):
        report = _run(command="bell-sweep", sweep="threshold", points=11, samples=1000)
        for row in report.rows:
            if abs(row["label"] - D_THRESHOLD) > 1e-3:
                self.assertEqual(row["violation"], row["label"] > D_THRESHOLD)
        self.assertTrue(report.passed)

    def test_random_sweep(self):
        report = _run(command="bell-sweep", sweep="random", points=3, samples=1000)
        self.assertEqual(len(report.rows), 3)
        for row in report.rows:
            if row["error"] is None:
                self.assertLessEqual(row["s_max"], row["bound"] + 1e-6)

    def test_passed_follows_from_row_columns(self):
        rows = _run(command="bell-sweep", sweep="random", points=4, samples=1000).rows
        rows += _run(command="bell-verify", theta=0.4, samples=1000).rows
        for row in rows:
            if row["s_max"] is None:
                continue
            separation_ok = (row["separation_margin"] is None
                             or row["separation_margin"] >= -row["separation_tolerance"])
            expected = (row["s_max"] <= row["bound"] + row["tolerance"]
                        and row["steering_square_gap"] < row["steering_tolerance"]
                        and separation_ok)
            self.assertEqual(row["passed"], expected)
            self.assertEqual(row["separation_holds"], None if row["separation_margin"] is None else separation_ok)

    def test_seeded_rows_repeat(self):
        a = _run(command="bell-sweep", sweep="random", points=2, samples=500, seed=3)
        b = _run(command="bell-sweep", sweep="random", points=2, samples=500, seed=3)
        self.assertEqual(a.rows, b.rows)


class TestSample(unittest.TestCase):

    def test_frequencies_inside_intervals(self):
        report = run_sample(RunConfig(command="sample", runs=100, samples=1_000_000, workers=4).validate())
        self.assertEqual(len(report.rows), 100)
        flags = [row[key] for row in report.rows for key in ("inside_mix_id", "inside_mix_swap", "inside_pur")]
        self.assertGreaterEqual(sum(flags) / len(flags), 0.99)
        self.assertTrue(report.passed)

    def test_sampled_score_converges(self):
        report = run_sample(RunConfig(command="sample", runs=100, samples=1_000_000, workers=4).validate())
        close = sum(1 for row in report.rows if abs(row["d_op_deviation"]) < 5e-3)
        self.assertGreaterEqual(close, 99)

    def test_deterministic(self):
        cfg = RunConfig(command="sample", runs=5, samples=1000, seed=9).validate()
        self.assertEqual(run_sample(cfg).rows, run_sample(cfg).rows)


if __name__ == '__main__':
    unittest.main()
