"""
Game Module - The two-copy discriminability game

Builds the Gram-type state of a two-state ensemble, evaluates SWAP pass
probabilities (exact or sampled), scores the game and compares the score with
the closed-form discriminability.
"""
from dataclasses import dataclass, asdict
from enum import Enum
from typing import Dict, Optional, Tuple, Union

import numpy as np

from .config import tolerance_config
from .errors import InconsistentStatisticsError, InvalidEnsembleError, PreconditionError
from .qubit import Complex2x2, State, fidelity_qubit, overlap, helstrom_guess
from .sampling import make_rng, sample_frequencies


class Labeling(Enum):
    """The two relabelings p in S2 of the prior outcomes"""
    IDENTITY = "identity"
    SWAP = "swap"


class StatsMode(Enum):
    EXACT = "exact"
    EMPIRICAL = "empirical"


@dataclass(frozen=True)
class TwoStateEnsemble:
    """Two pure states with priors (eta1, eta2) and overlap gamma12 = <psi|phi>"""
    eta1: float
    eta2: float
    gamma12: complex = 0.0

    def __post_init__(self):
        tol = tolerance_config.state
        if self.eta1 < -tol or self.eta2 < -tol:
            raise InvalidEnsembleError(f"Priors must be non-negative, got ({self.eta1}, {self.eta2})")
        if abs(self.eta1 + self.eta2 - 1.0) > tol:
            raise InvalidEnsembleError(f"Priors must sum to 1, got {self.eta1 + self.eta2:.15g}")
        if abs(self.gamma12) > 1.0 + tol:
            raise InvalidEnsembleError(f"|gamma12| must not exceed 1, got {abs(self.gamma12):.15g}")

    @classmethod
    def from_overlap(cls, eta1: float, gamma_sq: float, phase: float = 0.0) -> "TwoStateEnsemble":
        """Ensemble with prior eta1 and |gamma12|^2 = gamma_sq"""
        if not -tolerance_config.state <= gamma_sq <= 1.0 + tolerance_config.state:
            raise InvalidEnsembleError(f"|gamma12|^2 must lie in [0, 1], got {gamma_sq}")
        gamma = np.sqrt(min(max(gamma_sq, 0.0), 1.0)) * np.exp(1j * phase)
        return cls(eta1=eta1, eta2=1.0 - eta1, gamma12=complex(gamma))

    @property
    def eta_min(self) -> float:
        return min(self.eta1, self.eta2)

    @property
    def overlap_sq(self) -> float:
        return min(abs(self.gamma12) ** 2, 1.0)

    def canonical(self) -> "TwoStateEnsemble":
        """Same ensemble listed with the larger prior first (<phi|psi> = gamma12*)"""
        if self.eta1 >= self.eta2:
            return self
        return TwoStateEnsemble(self.eta2, self.eta1, complex(np.conj(self.gamma12)))


@dataclass(frozen=True)
class GameStats:
    """Pass probabilities of the mixed and pure experiments"""
    p_mix_id: float
    p_mix_swap: float
    p_pur: float
    mode: StatsMode = StatsMode.EXACT
    n_samples: Optional[int] = None
    ci_mix_id: Optional[float] = None
    ci_mix_swap: Optional[float] = None
    ci_pur: Optional[float] = None

    def __post_init__(self):
        for name in ("p_mix_id", "p_mix_swap", "p_pur"):
            value = getattr(self, name)
            if not -tolerance_config.state <= value <= 1.0 + tolerance_config.state:
                raise InconsistentStatisticsError(f"{name} = {value} is not a probability")
        if self.mode is StatsMode.EMPIRICAL and (self.n_samples is None or self.n_samples < 1):
            raise PreconditionError("Empirical statistics need n_samples >= 1")

    @property
    def ci_halfwidth(self) -> Optional[float]:
        """Widest of the three half-widths (empirical mode only)"""
        if self.mode is StatsMode.EXACT:
            return None
        return max(self.ci_mix_id, self.ci_mix_swap, self.ci_pur)

    def p_mix(self, labeling: Labeling) -> float:
        return self.p_mix_id if labeling is Labeling.IDENTITY else self.p_mix_swap

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["mode"] = self.mode.value
        return data


def gram_state(ens: TwoStateEnsemble, canonical: bool = True) -> Complex2x2:
    """
    Gram-type state eta1|e1><e1| + eta2|phi><phi| in the basis where |e1> is the
    first state. With canonical=True the larger-prior state is taken as |e1>.
    """
    if canonical:
        ens = ens.canonical()
    g = complex(ens.gamma12)
    g2 = ens.overlap_sq
    root = np.sqrt(max(1.0 - g2, 0.0))
    return np.array([
        [ens.eta1 + ens.eta2 * g2, ens.eta2 * g * root],
        [ens.eta2 * np.conj(g) * root, ens.eta2 * (1.0 - g2)],
    ], dtype=complex)


def prior_state(ens: TwoStateEnsemble, p: Labeling = Labeling.IDENTITY) -> Complex2x2:
    """diag(eta1, eta2), or diag(eta2, eta1) for the swapped labeling"""
    if p is Labeling.IDENTITY:
        return np.diag([ens.eta1, ens.eta2]).astype(complex)
    return np.diag([ens.eta2, ens.eta1]).astype(complex)


def swap_pass_prob(rho: State, sigma: State) -> float:
    """SWAP-test pass probability (1 + Tr(rho sigma)) / 2"""
    return 0.5 * (1.0 + overlap(rho, sigma))


def game_stats_exact(ens: TwoStateEnsemble, canonical: bool = True) -> GameStats:
    """Exact pass probabilities for both labelings and the purity experiment"""
    if canonical:
        ens = ens.canonical()
    rho_t = gram_state(ens, canonical=False)
    return GameStats(
        p_mix_id=swap_pass_prob(rho_t, prior_state(ens, Labeling.IDENTITY)),
        p_mix_swap=swap_pass_prob(rho_t, prior_state(ens, Labeling.SWAP)),
        p_pur=swap_pass_prob(rho_t, rho_t),
        mode=StatsMode.EXACT
    )


def game_stats_sampled(ens: TwoStateEnsemble, n: int, rng: Union[int, np.random.Generator]) -> GameStats:
    """
    Simulate n runs of each experiment. `rng` is a seed or a generator; the
    same seed (or generator state) always gives the same statistics.
    """
    if n < 1:
        raise PreconditionError(f"Number of samples must be at least 1, got {n}")
    if not isinstance(rng, np.random.Generator):
        rng = make_rng(int(rng))
    exact = game_stats_exact(ens)
    mix_id, mix_swap, pur = sample_frequencies(
        [exact.p_mix_id, exact.p_mix_swap, exact.p_pur], n, rng
    )
    return GameStats(
        p_mix_id=mix_id.frequency,
        p_mix_swap=mix_swap.frequency,
        p_pur=pur.frequency,
        mode=StatsMode.EMPIRICAL,
        n_samples=n,
        ci_mix_id=mix_id.ci_halfwidth,
        ci_mix_swap=mix_swap.ci_halfwidth,
        ci_pur=pur.ci_halfwidth
    )


def score(p_mix: float, p_pur: float, eta1: float, eta2: float) -> float:
    """(2 p_mix - 1) + 2 sqrt(eta1 eta2 (1 - p_pur)) for one labeling"""
    radicand = eta1 * eta2 * (1.0 - p_pur)
    if radicand < -tolerance_config.state:
        raise InconsistentStatisticsError(f"Negative radicand {radicand:.6g} in the purity term")
    return (2.0 * p_mix - 1.0) + 2.0 * np.sqrt(max(radicand, 0.0))


def d_op_labeled(stats: GameStats, ens: TwoStateEnsemble) -> Tuple[float, Labeling]:
    """Game score maximized over labelings; ties go to the identity labeling"""
    best_value, best_label = None, None
    for label in (Labeling.IDENTITY, Labeling.SWAP):
        value = score(stats.p_mix(label), stats.p_pur, ens.eta1, ens.eta2)
        if best_value is None or value > best_value:
            best_value, best_label = value, label
    return float(best_value), best_label


def d_op(stats: GameStats, ens: TwoStateEnsemble) -> float:
    """Operational discriminability; unclamped for empirical statistics"""
    return d_op_labeled(stats, ens)[0]


def d_closed_form(eta1: float, eta2: float, gamma_sq: float) -> float:
    """eta1^2 + eta2^2 + 2 eta1 eta2 sqrt(1-|g|^2) + |g|^2 (eta1 eta2 - eta_min^2)"""
    tol = tolerance_config.state
    if eta1 < -tol or eta2 < -tol or abs(eta1 + eta2 - 1.0) > tol:
        raise InvalidEnsembleError(f"Priors must be a probability pair, got ({eta1}, {eta2})")
    if not -tol <= gamma_sq <= 1.0 + tol:
        raise InvalidEnsembleError(f"|gamma12|^2 must lie in [0, 1], got {gamma_sq}")
    g2 = min(max(gamma_sq, 0.0), 1.0)
    eta_min = min(eta1, eta2)
    return (eta1 ** 2 + eta2 ** 2
            + 2.0 * eta1 * eta2 * np.sqrt(1.0 - g2)
            + g2 * (eta1 * eta2 - eta_min ** 2))


def d_fidelity(ens: TwoStateEnsemble, canonical: bool = True) -> float:
    """max_p F(rho_T, eta_p) with the qubit fidelity formula"""
    if canonical:
        ens = ens.canonical()
    rho_t = gram_state(ens, canonical=False)
    return max(fidelity_qubit(rho_t, prior_state(ens, label)) for label in Labeling)


def helstrom_equal_prior(gamma_sq: float) -> float:
    """Minimum-error success for two equiprobable pure states"""
    return 0.5 * (1.0 + np.sqrt(max(1.0 - gamma_sq, 0.0)))


def pure_pair(ens: TwoStateEnsemble) -> Tuple[np.ndarray, np.ndarray]:
    """State vectors |e1> and |phi> = gamma|e1> + sqrt(1-|gamma|^2)|e2>"""
    g = complex(ens.gamma12)
    psi = np.array([1.0, 0.0], dtype=complex)
    phi = np.array([g, np.sqrt(max(1.0 - ens.overlap_sq, 0.0))], dtype=complex)
    return psi, phi


def helstrom_ensemble(ens: TwoStateEnsemble) -> float:
    """Helstrom success probability of the ensemble's two pure states"""
    psi, phi = pure_pair(ens)
    return helstrom_guess(ens.eta1, np.outer(psi, psi.conj()), ens.eta2, np.outer(phi, phi.conj()))


def equivalence_gap(ens: TwoStateEnsemble) -> float:
    """Largest pairwise difference among d_op(exact), closed form and fidelity maximum"""
    values = (
        d_op(game_stats_exact(ens), ens),
        d_closed_form(ens.eta1, ens.eta2, ens.overlap_sq),
        d_fidelity(ens),
    )
    return float(max(values) - min(values))
