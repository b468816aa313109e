"""
Tests for the two-copy discriminability game
"""
import unittest

import numpy as np

from discrimlab.errors import InconsistentStatisticsError, InvalidEnsembleError, PreconditionError
from discrimlab.game import (
    GameStats,
    Labeling,
    StatsMode,
    TwoStateEnsemble,
    d_closed_form,
    d_fidelity,
    d_op,
    d_op_labeled,
    equivalence_gap,
    game_stats_exact,
    game_stats_sampled,
    gram_state,
    helstrom_ensemble,
    helstrom_equal_prior,
    prior_state,
    score,
    swap_pass_prob,
)
from discrimlab.qubit import bloch_to_density, determinant, fidelity_qubit
from discrimlab.sampling import make_rng

HALF_OVERLAP_D = 0.5 * (1 + np.sqrt(0.5))


class TestEnsemble(unittest.TestCase):

    def test_priors_must_sum_to_one(self):
        with self.assertRaises(InvalidEnsembleError):
            TwoStateEnsemble(0.6, 0.6, 0.0)

    def test_negative_prior(self):
        with self.assertRaises(InvalidEnsembleError):
            TwoStateEnsemble(-0.1, 1.1, 0.0)

    def test_overlap_above_one(self):
        with self.assertRaises(InvalidEnsembleError):
            TwoStateEnsemble(0.5, 0.5, 1.5)
        with self.assertRaises(InvalidEnsembleError):
            TwoStateEnsemble.from_overlap(0.5, 1.2)

    def test_from_overlap(self):
        ens = TwoStateEnsemble.from_overlap(0.3, 0.25, phase=np.pi / 2)
        self.assertAlmostEqual(ens.eta2, 0.7, places=15)
        self.assertAlmostEqual(ens.overlap_sq, 0.25, places=14)
        self.assertAlmostEqual(ens.eta_min, 0.3, places=15)

    def test_canonical_puts_larger_prior_first(self):
        ens = TwoStateEnsemble(0.3, 0.7, 0.5j).canonical()
        self.assertEqual(ens.eta1, 0.7)
        self.assertEqual(ens.eta2, 0.3)
        self.assertAlmostEqual(ens.gamma12, -0.5j)
        same = TwoStateEnsemble(0.7, 0.3, 0.5)
        self.assertIs(same.canonical(), same)


class TestStates(unittest.TestCase):

    def test_gram_state_orthogonal(self):
        np.testing.assert_allclose(gram_state(TwoStateEnsemble(0.5, 0.5, 0.0)), np.eye(2) / 2, atol=1e-15)

    def test_gram_state_identical(self):
        np.testing.assert_allclose(gram_state(TwoStateEnsemble(0.5, 0.5, 1.0)), [[1, 0], [0, 0]], atol=1e-15)

    def test_gram_state_explicit(self):
        rho = gram_state(TwoStateEnsemble(0.7, 0.3, 0.5))
        np.testing.assert_allclose(rho, [[0.775, 0.3 * 0.5 * np.sqrt(0.75)], [0.3 * 0.5 * np.sqrt(0.75), 0.225]],
                                   atol=1e-15)
        self.assertAlmostEqual(rho[0, 1].real, 0.129904, places=6)

    def test_gram_state_matches_mixture_of_projectors(self):
        rng = make_rng(11)
        for _ in range(100):
            eta1 = rng.uniform(0.01, 0.99)
            gamma = np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
            ens = TwoStateEnsemble(eta1, 1 - eta1, complex(gamma))
            e1 = np.array([1, 0], dtype=complex)
            phi = np.array([gamma, np.sqrt(1 - abs(gamma) ** 2)], dtype=complex)
            expected = eta1 * np.outer(e1, e1.conj()) + (1 - eta1) * np.outer(phi, phi.conj())
            np.testing.assert_allclose(gram_state(ens, canonical=False), expected, atol=1e-14)

    def test_prior_state(self):
        ens = TwoStateEnsemble(0.7, 0.3)
        np.testing.assert_allclose(prior_state(ens), np.diag([0.7, 0.3]))
        np.testing.assert_allclose(prior_state(ens, Labeling.SWAP), np.diag([0.3, 0.7]))
        np.testing.assert_allclose(prior_state(TwoStateEnsemble(0.5, 0.5), Labeling.SWAP), np.eye(2) / 2)

    def test_swap_pass_prob(self):
        up = bloch_to_density((0, 0, 1))
        down = bloch_to_density((0, 0, -1))
        mixed = bloch_to_density((0, 0, 0))
        self.assertAlmostEqual(swap_pass_prob(up, down), 0.5, places=15)
        self.assertAlmostEqual(swap_pass_prob(up, up), 1.0, places=15)
        self.assertAlmostEqual(swap_pass_prob(mixed, mixed), 0.75, places=15)


class TestGameStats(unittest.TestCase):

    def test_orthogonal_equal_priors(self):
        stats = game_stats_exact(TwoStateEnsemble(0.5, 0.5, 0.0))
        self.assertAlmostEqual(stats.p_mix_id, 0.75, places=14)
        self.assertAlmostEqual(stats.p_mix_swap, 0.75, places=14)
        self.assertAlmostEqual(stats.p_pur, 0.75, places=14)
        self.assertIs(stats.mode, StatsMode.EXACT)
        self.assertIsNone(stats.ci_halfwidth)

    def test_identical_states_pure(self):
        self.assertAlmostEqual(game_stats_exact(TwoStateEnsemble(0.5, 0.5, 1.0)).p_pur, 1.0, places=14)

    def test_unequal_priors_orthogonal(self):
        stats = game_stats_exact(TwoStateEnsemble(0.7, 0.3, 0.0))
        self.assertAlmostEqual(stats.p_mix_id, 0.79, places=14)
        self.assertAlmostEqual(stats.p_mix_swap, 0.71, places=14)

    def test_rejects_non_probability(self):
        with self.assertRaises(InconsistentStatisticsError):
            GameStats(1.2, 0.5, 0.5)
        with self.assertRaises(PreconditionError):
            GameStats(0.5, 0.5, 0.5, mode=StatsMode.EMPIRICAL)

    def test_sampled_within_ci(self):
        ens = TwoStateEnsemble.from_overlap(0.5, 0.5)
        exact = game_stats_exact(ens)
        sampled = game_stats_sampled(ens, 1_000_000, make_rng(1))
        self.assertEqual(sampled.n_samples, 1_000_000)
        for name, ci in (("p_mix_id", sampled.ci_mix_id), ("p_mix_swap", sampled.ci_mix_swap),
                         ("p_pur", sampled.ci_pur)):
            # 6 sigma: a 3 sigma miss happens about once in 370 draws
            self.assertLessEqual(abs(getattr(sampled, name) - getattr(exact, name)), 2 * ci)

    def test_sampled_pure_passes_always(self):
        sampled = game_stats_sampled(TwoStateEnsemble(0.5, 0.5, 1.0), 1000, make_rng(5))
        self.assertEqual(sampled.p_pur, 1.0)

    def test_sampled_is_deterministic(self):
        ens = TwoStateEnsemble.from_overlap(0.4, 0.3)
        self.assertEqual(game_stats_sampled(ens, 10_000, make_rng(7)), game_stats_sampled(ens, 10_000, make_rng(7)))

    def test_sampled_accepts_seed(self):
        ens = TwoStateEnsemble.from_overlap(0.4, 0.3)
        self.assertEqual(game_stats_sampled(ens, 10_000, 7), game_stats_sampled(ens, 10_000, make_rng(7)))

    def test_sampled_rejects_zero_samples(self):
        with self.assertRaises(PreconditionError):
            game_stats_sampled(TwoStateEnsemble(0.5, 0.5), 0, make_rng(0))

    def test_to_dict(self):
        data = game_stats_exact(TwoStateEnsemble(0.5, 0.5)).to_dict()
        self.assertEqual(data["mode"], "exact")
        self.assertIsNone(data["n_samples"])


class TestDiscriminability(unittest.TestCase):

    def test_d_op_examples(self):
        self.assertAlmostEqual(d_op(game_stats_exact(TwoStateEnsemble(0.5, 0.5, 0.0)), TwoStateEnsemble(0.5, 0.5, 0.0)),
                               1.0, places=12)
        ens = TwoStateEnsemble(0.5, 0.5, 1.0)
        self.assertAlmostEqual(d_op(game_stats_exact(ens), ens), 0.5, places=12)
        ens = TwoStateEnsemble.from_overlap(0.5, 0.5)
        self.assertAlmostEqual(d_op(game_stats_exact(ens), ens), HALF_OVERLAP_D, places=12)

    def test_tie_goes_to_identity(self):
        ens = TwoStateEnsemble.from_overlap(0.5, 0.3)
        _, label = d_op_labeled(game_stats_exact(ens), ens)
        self.assertIs(label, Labeling.IDENTITY)

    def test_score_rejects_negative_radicand(self):
        with self.assertRaises(InconsistentStatisticsError):
            score(0.5, 1.5, 0.5, 0.5)

    def test_closed_form_examples(self):
        self.assertAlmostEqual(d_closed_form(0.5, 0.5, 0.0), 1.0, places=15)
        self.assertAlmostEqual(d_closed_form(0.5, 0.5, 1.0), 0.5, places=15)
        expected = 0.49 + 0.09 + 0.42 * np.sqrt(0.75) + 0.25 * (0.21 - 0.09)
        self.assertAlmostEqual(d_closed_form(0.7, 0.3, 0.25), expected, places=14)
        self.assertAlmostEqual(d_closed_form(0.7, 0.3, 0.25), 0.97373067, places=8)
        self.assertAlmostEqual(d_fidelity(TwoStateEnsemble.from_overlap(0.7, 0.25)), 0.97373067, places=8)

    def test_closed_form_non_increasing_in_overlap(self):
        grid = np.linspace(0.0, 1.0, 1000)
        for eta1 in (0.05, 0.3, 0.5, 0.7, 0.99):
            values = np.array([d_closed_form(eta1, 1 - eta1, g2) for g2 in grid])
            self.assertTrue(np.all(np.diff(values) <= 1e-12), f"eta1={eta1}")

    def test_purity_term_is_determinant_product(self):
        rng = make_rng(12)
        for _ in range(200):
            ens = TwoStateEnsemble.from_overlap(rng.uniform(0.01, 0.99), rng.uniform(0.0, 1.0),
                                                phase=rng.uniform(0.0, 2 * np.pi))
            p_pur = game_stats_exact(ens).p_pur
            lhs = 2 * np.sqrt(ens.eta1 * ens.eta2 * (1 - p_pur))
            dets = determinant(prior_state(ens)) * determinant(gram_state(ens))
            self.assertAlmostEqual(lhs, 2 * np.sqrt(max(dets, 0.0)), places=10)

    def test_closed_form_identical_states_is_larger_prior(self):
        for eta1 in np.linspace(0, 1, 21):
            self.assertAlmostEqual(d_closed_form(eta1, 1 - eta1, 1.0), max(eta1, 1 - eta1), places=14)

    def test_closed_form_rejects_bad_input(self):
        with self.assertRaises(InvalidEnsembleError):
            d_closed_form(0.5, 0.6, 0.1)
        with self.assertRaises(InvalidEnsembleError):
            d_closed_form(0.5, 0.5, 1.1)

    def test_equal_prior_matches_helstrom(self):
        for gamma_sq in np.linspace(0, 1, 1000):
            self.assertAlmostEqual(d_closed_form(0.5, 0.5, gamma_sq), helstrom_equal_prior(gamma_sq), places=12)
        self.assertAlmostEqual(helstrom_equal_prior(0.5), 0.8535533905932737, places=12)

    def test_helstrom_ensemble(self):
        ens = TwoStateEnsemble.from_overlap(0.5, 0.5)
        self.assertAlmostEqual(helstrom_ensemble(ens), HALF_OVERLAP_D, places=12)

    def test_three_definitions_agree(self):
        rng = make_rng(12)
        for _ in range(2000):
            ens = TwoStateEnsemble.from_overlap(rng.uniform(0.01, 0.99), rng.random(), rng.uniform(0, 2 * np.pi))
            self.assertLess(equivalence_gap(ens), 1e-10)

    def test_listed_order_fidelity_is_smaller(self):
        for gamma_sq in (0.2, 0.5, 0.9):
            ens = TwoStateEnsemble.from_overlap(0.3, gamma_sq)
            rho = gram_state(ens, canonical=False)
            listed = max(fidelity_qubit(rho, prior_state(ens, label)) for label in Labeling)
            expected_gap = min(gamma_sq * 0.4, (1 - gamma_sq) * 0.4 ** 2)
            self.assertAlmostEqual(d_fidelity(ens) - listed, expected_gap, places=12)


if __name__ == '__main__':
    unittest.main()
