"""
Tests for seeded streams and Bernoulli frequency sampling
"""
import unittest

import numpy as np

from discrimlab.errors import PreconditionError
from discrimlab.sampling import SeededStreams, ci_halfwidth, make_rng, sample_frequencies


class TestSeededStreams(unittest.TestCase):

    def test_same_seed_same_numbers(self):
        a = SeededStreams(42).stream(3).random(5)
        b = SeededStreams(42).stream(3).random(5)
        np.testing.assert_array_equal(a, b)

    def test_streams_are_distinct(self):
        streams = SeededStreams(42)
        self.assertFalse(np.array_equal(streams.stream(0).random(5), streams.stream(1).random(5)))
        self.assertFalse(np.array_equal(SeededStreams(1).stream(0).random(5), SeededStreams(2).stream(0).random(5)))

    def test_stream_independent_of_request_order(self):
        forward = [s.random() for s in SeededStreams(7).streams(4)]
        streams = SeededStreams(7)
        backward = [streams.stream(i).random() for i in reversed(range(4))]
        self.assertEqual(forward, list(reversed(backward)))

    def test_fork_is_deterministic(self):
        self.assertEqual(SeededStreams(9).fork(2).seed, SeededStreams(9).fork(2).seed)
        self.assertNotEqual(SeededStreams(9).fork(2).seed, SeededStreams(9).fork(3).seed)

    def test_large_seed(self):
        make_rng(2 ** 64 - 1).random()

    def test_make_rng_matches_stream(self):
        self.assertEqual(make_rng(5, 2).random(), SeededStreams(5).stream(2).random())


class TestSampleFrequencies(unittest.TestCase):

    def test_certain_outcomes(self):
        zero, one = sample_frequencies([0.0, 1.0], 1000, make_rng(0))
        self.assertEqual(zero.frequency, 0.0)
        self.assertEqual(one.frequency, 1.0)
        self.assertEqual(one.ci_halfwidth, 0.0)
        self.assertTrue(one.inside)

    def test_rounding_above_one_is_clipped(self):
        (freq,) = sample_frequencies([1.0 + 1e-15], 100, make_rng(0))
        self.assertEqual(freq.frequency, 1.0)

    def test_rejects_zero_samples(self):
        with self.assertRaises(PreconditionError):
            sample_frequencies([0.5], 0, make_rng(0))

    def test_halfwidth(self):
        self.assertAlmostEqual(ci_halfwidth(0.5, 100), 0.15, places=15)
        self.assertAlmostEqual(ci_halfwidth(0.5, 100, sigmas=2.0), 0.1, places=15)
        self.assertEqual(ci_halfwidth(0.0, 100), 0.0)

    def test_coverage(self):
        streams = SeededStreams(11)
        inside = [sample_frequencies([0.3], 10_000, streams.stream(i))[0].inside for i in range(300)]
        self.assertGreaterEqual(sum(inside) / len(inside), 0.97)

    def test_deterministic(self):
        a = sample_frequencies([0.2, 0.6], 5000, make_rng(4))
        b = sample_frequencies([0.2, 0.6], 5000, make_rng(4))
        self.assertEqual(a, b)


if __name__ == '__main__':
    unittest.main()
