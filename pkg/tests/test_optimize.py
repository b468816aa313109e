"""
Tests for the line searches, coordinate ascent and order-stable reductions
"""
import math
import unittest

import numpy as np

from discrimlab.optimize import best_of, coordinate_ascent, golden_section_max, parallel_map, scan_then_refine


class TestGoldenSection(unittest.TestCase):

    def test_interior_maximum(self):
        x, y = golden_section_max(lambda t: -(t - 0.3) ** 2, 0.0, 1.0)
        self.assertAlmostEqual(x, 0.3, places=6)
        self.assertAlmostEqual(y, 0.0, places=10)

    def test_boundary_maximum(self):
        x, y = golden_section_max(lambda t: t, 0.0, 1.0)
        self.assertEqual(x, 1.0)
        self.assertEqual(y, 1.0)

    def test_degenerate_bracket(self):
        x, y = golden_section_max(lambda t: -t * t, 0.5, 0.5)
        self.assertEqual(x, 0.5)
        self.assertEqual(y, -0.25)


class TestScanThenRefine(unittest.TestCase):

    def test_picks_highest_peak(self):
        x, y = scan_then_refine(lambda t: math.sin(5 * t) + 0.1 * t, 0.0, 3.0, points=16)
        self.assertAlmostEqual(x, (math.pi / 2 + math.asin(0.02) + 4 * math.pi) / 5, delta=1e-6)
        self.assertGreater(y, 1.28)


class TestCoordinateAscent(unittest.TestCase):

    def test_separable_quadratic(self):
        result = coordinate_ascent(
            lambda x: -(x[0] - 0.2) ** 2 - (x[1] - 0.7) ** 2,
            (0.9, 0.1),
            [(0.0, 1.0), (0.0, 1.0)],
        )
        self.assertTrue(result.converged)
        np.testing.assert_allclose(result.x, (0.2, 0.7), atol=1e-6)
        self.assertGreater(result.evaluations, 0)

    def test_budget_stops_early(self):
        result = coordinate_ascent(
            lambda x: -float(np.sum((x - 0.5) ** 2)),
            np.zeros(6),
            [(0.0, 1.0)] * 6,
            max_evaluations=20,
        )
        self.assertFalse(result.converged)
        self.assertEqual(result.sweeps, 1)

    def test_never_worse_than_start(self):
        f = lambda x: math.cos(3 * x[0]) * math.sin(2 * x[1])
        start = (0.4, 0.9)
        result = coordinate_ascent(f, start, [(0.0, 3.0), (0.0, 3.0)])
        self.assertGreaterEqual(result.value, f(start))


class TestReductions(unittest.TestCase):

    def test_parallel_map_keeps_order(self):
        items = list(range(40))
        self.assertEqual(parallel_map(lambda i: i * i, items, workers=4), [i * i for i in items])
        self.assertEqual(parallel_map(lambda i: -i, items, workers=1), [-i for i in items])

    def test_best_of_breaks_ties_by_key(self):
        value, key = best_of([(1.0, (2,)), (1.0, (1,)), (0.5, (0,))])
        self.assertEqual((value, key), (1.0, (1,)))

    def test_best_of_tolerance(self):
        value, key = best_of([(1.0, (2,)), (0.95, (1,))], tol=0.1)
        self.assertEqual((value, key), (0.95, (1,)))
        value, key = best_of([(1.0, (2,)), (0.95, (1,))], tol=0.01)
        self.assertEqual((value, key), (1.0, (2,)))

    def test_best_of_order_independent(self):
        candidates = [(0.3, (0.5, 0.1)), (0.7, (0.2, 0.9)), (0.7, (0.2, 0.4)), (0.1, (0.0, 0.0))]
        self.assertEqual(best_of(candidates), best_of(list(reversed(candidates))))


if __name__ == '__main__':
    unittest.main()
