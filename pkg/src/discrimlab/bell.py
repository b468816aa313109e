"""
Bell Module - Steering, SWAP-estimable separation and CHSH certification

Alice measures a shared two-qubit state along one of two directions; each of
her outcomes prepares a conditional state on Bob's side. The prior-weighted
difference of those conditional Bloch vectors (the steering vector r_x) fixes
every CHSH correlator, and its norm is recoverable from SWAP statistics alone.
"""
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .config import search_config, tolerance_config
from .errors import (
    DegenerateConditioningError,
    InconsistentStatisticsError,
    PreconditionError,
    UnphysicalStateError,
)
from .game import d_closed_form, StatsMode, swap_pass_prob
from .optimize import best_of, coordinate_ascent, parallel_map
from .qubit import IDENTITY, PAULIS, bloch_to_density, helstrom_guess
from .sampling import SeededStreams, sample_frequencies

Vector3 = Tuple[float, float, float]

# A symmetric CHSH violation needs D above this
D_THRESHOLD = 0.5 * (1.0 + 1.0 / math.sqrt(2.0))

Z_AXIS = (0.0, 0.0, 1.0)
X_AXIS = (1.0, 0.0, 0.0)


def _unit(v: Sequence[float], what: str) -> np.ndarray:
    vec = np.asarray(v, dtype=float).reshape(-1)
    if vec.shape != (3,) or abs(np.linalg.norm(vec) - 1.0) > tolerance_config.state:
        raise PreconditionError(f"{what} must be a unit 3-vector, got {tuple(vec)}")
    return vec


def _normalize(v: Sequence[float]) -> np.ndarray:
    vec = np.asarray(v, dtype=float)
    return vec / np.linalg.norm(vec)


def angles_to_vector(theta: float, phi: float) -> np.ndarray:
    return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])


def vector_to_angles(v: Sequence[float]) -> Tuple[float, float]:
    x, y, z = (float(c) for c in v)
    theta = math.acos(max(-1.0, min(1.0, z)))
    phi = math.atan2(y, x) % (2.0 * math.pi)
    return theta, phi


@dataclass(frozen=True)
class ConditionalPair:
    """Priors and Bloch vectors of Bob's two conditional states for one setting"""
    pi_plus: float
    pi_minus: float
    s_plus: Vector3
    s_minus: Vector3

    def __post_init__(self):
        tol = tolerance_config.state
        if self.pi_plus < -tol or self.pi_minus < -tol or abs(self.pi_plus + self.pi_minus - 1.0) > tol:
            raise PreconditionError(f"Conditional priors must be a probability pair, got ({self.pi_plus}, {self.pi_minus})")
        # Raises UnphysicalStateError for ||s|| > 1 + tol
        bloch_to_density(self.s_plus)
        bloch_to_density(self.s_minus)

    @property
    def states(self):
        return bloch_to_density(self.s_plus), bloch_to_density(self.s_minus)

    def is_pure(self, tol: float = None) -> bool:
        plus, minus = self.states
        return plus.is_pure(tol) and minus.is_pure(tol)


@dataclass(frozen=True)
class ConditionalScenario:
    """Conditional preparations for Alice settings x = 0 and x = 1"""
    settings: Tuple[ConditionalPair, ConditionalPair]

    def pair(self, x: int) -> ConditionalPair:
        if x not in (0, 1):
            raise PreconditionError(f"Setting x must be 0 or 1, got {x}")
        return self.settings[x]

    @classmethod
    def from_table(cls, rows: Sequence[Tuple[float, Vector3, Vector3]]) -> "ConditionalScenario":
        """Build from [(pi_plus, s_plus, s_minus)] for x = 0, 1"""
        if len(rows) != 2:
            raise PreconditionError("A scenario needs exactly two settings")
        return cls(tuple(
            ConditionalPair(pi, 1.0 - pi, tuple(map(float, sp)), tuple(map(float, sm)))
            for pi, sp, sm in rows
        ))


@dataclass(frozen=True)
class BobSettings:
    """Bob's two projective measurements B_y = b_y . sigma"""
    b0: Vector3
    b1: Vector3

    def __post_init__(self):
        _unit(self.b0, "b0")
        _unit(self.b1, "b1")

    @classmethod
    def from_angles(cls, theta0: float, phi0: float, theta1: float, phi1: float) -> "BobSettings":
        return cls(tuple(angles_to_vector(theta0, phi0)), tuple(angles_to_vector(theta1, phi1)))

    @property
    def angles(self) -> Tuple[float, float, float, float]:
        return vector_to_angles(self.b0) + vector_to_angles(self.b1)

    def direction(self, y: int) -> np.ndarray:
        return np.asarray(self.b0 if y == 0 else self.b1, dtype=float)

    @classmethod
    def standard(cls) -> "BobSettings":
        """(x + z)/sqrt2 and (z - x)/sqrt2, optimal for |Phi+> with Alice along z and x"""
        r = 1.0 / math.sqrt(2.0)
        return cls((r, 0.0, r), (-r, 0.0, r))


@dataclass(frozen=True)
class TwoQubitPure:
    """Amplitudes of |00>, |01>, |10>, |11> (Alice first)"""
    amplitudes: Tuple[complex, complex, complex, complex]

    def __post_init__(self):
        vec = np.asarray(self.amplitudes, dtype=complex)
        if vec.shape != (4,):
            raise UnphysicalStateError(f"Two-qubit state needs 4 amplitudes, got {vec.size}")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > tolerance_config.state:
            raise UnphysicalStateError(f"State is not normalized: norm {norm:.15g}")

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.amplitudes, dtype=complex)

    @property
    def matrix(self) -> np.ndarray:
        """M[i, j] = amplitude of |i>_A |j>_B"""
        return self.vector.reshape(2, 2)

    @classmethod
    def from_vector(cls, vec: Sequence[complex]) -> "TwoQubitPure":
        vec = np.asarray(vec, dtype=complex)
        return cls(tuple(complex(a) for a in vec / np.linalg.norm(vec)))

    @classmethod
    def phi_plus(cls) -> "TwoQubitPure":
        r = 1.0 / math.sqrt(2.0)
        return cls((r, 0.0, 0.0, r))

    @classmethod
    def partially_entangled(cls, theta: float) -> "TwoQubitPure":
        """cos(theta)|00> + sin(theta)|11>"""
        return cls((math.cos(theta), 0.0, 0.0, math.sin(theta)))

    @classmethod
    def product(cls, a: Sequence[float], b: Sequence[float]) -> "TwoQubitPure":
        """|a> x |b> for pure Bloch directions a and b"""
        return cls.from_vector(np.kron(_ket(a), _ket(b)))

    @classmethod
    def haar_random(cls, rng: np.random.Generator) -> "TwoQubitPure":
        return cls.from_vector(rng.normal(size=4) + 1j * rng.normal(size=4))


def _ket(direction: Sequence[float]) -> np.ndarray:
    """State vector with Bloch vector `direction` (fixed global phase)"""
    theta, phi = vector_to_angles(_unit(direction, "Bloch direction"))
    return np.array([math.cos(theta / 2.0), np.exp(1j * phi) * math.sin(theta / 2.0)], dtype=complex)


def _projector(direction: Sequence[float], outcome: int) -> np.ndarray:
    n = np.asarray(direction, dtype=float)
    return 0.5 * (IDENTITY + outcome * sum(c * p for c, p in zip(n, PAULIS)))


def reduced_state_bob(psi: TwoQubitPure) -> np.ndarray:
    m = psi.matrix
    return m.T @ m.conj()


def conditional_from_bipartite(psi: TwoQubitPure, alice_dirs: Sequence[Sequence[float]]) -> ConditionalScenario:
    """
    Bob's conditional states for Alice measuring along alice_dirs[x].

    Raises DegenerateConditioningError when an outcome has probability below
    1e-12, since its conditional state is undefined.
    """
    if len(alice_dirs) != 2:
        raise PreconditionError("Alice needs exactly two measurement directions")
    m = psi.matrix
    pairs = []
    for x, direction in enumerate(alice_dirs):
        n = _unit(direction, f"Alice direction {x}")
        priors, blochs = [], []
        for a in (1, -1):
            unnormalized = m.T @ _projector(n, a).T @ m.conj()
            pi = float(np.real(np.trace(unnormalized)))
            if pi < 1e-12:
                raise DegenerateConditioningError(
                    f"Alice outcome {a:+d} at setting {x} has probability {pi:.3g}; conditional state undefined"
                )
            rho = unnormalized / pi
            rho = 0.5 * (rho + rho.conj().T)
            priors.append(pi)
            blochs.append(_clip_bloch(_bloch_of(rho)))
        # Renormalize priors against rounding
        total = priors[0] + priors[1]
        pairs.append(ConditionalPair(priors[0] / total, priors[1] / total, blochs[0], blochs[1]))
    return ConditionalScenario(tuple(pairs))


def _bloch_of(rho: np.ndarray) -> np.ndarray:
    """Bloch vector without the density checks; rho is built from a valid state"""
    return np.array([float(np.real(np.trace(rho @ p))) for p in PAULIS])


def _clip_bloch(s: np.ndarray) -> Vector3:
    norm = float(np.linalg.norm(s))
    if norm > 1.0:
        s = s / norm
    return tuple(float(c) for c in s)


def steering_vector(sc: ConditionalScenario, x: int) -> np.ndarray:
    """r_x = pi_+ s_+ - pi_- s_-"""
    p = sc.pair(x)
    return p.pi_plus * np.asarray(p.s_plus) - p.pi_minus * np.asarray(p.s_minus)


@dataclass(frozen=True)
class SwapSeparationStats:
    """SWAP pass probabilities of (+,+), (-,-) and (+,-) conditional pairs"""
    p_pur_plus: float
    p_pur_minus: float
    p_ov: float
    mode: StatsMode = StatsMode.EXACT
    n_samples: Optional[int] = None
    ci_halfwidth: Optional[float] = None


def swap_separation_stats(sc: ConditionalScenario, x: int) -> SwapSeparationStats:
    plus, minus = sc.pair(x).states
    return SwapSeparationStats(
        p_pur_plus=swap_pass_prob(plus, plus),
        p_pur_minus=swap_pass_prob(minus, minus),
        p_ov=swap_pass_prob(plus, minus)
    )


def swap_separation_stats_sampled(
    sc: ConditionalScenario,
    x: int,
    n: int,
    rng: np.random.Generator
) -> SwapSeparationStats:
    """Same statistics estimated from n simulated SWAP tests each"""
    exact = swap_separation_stats(sc, x)
    pur_plus, pur_minus, ov = sample_frequencies(
        [exact.p_pur_plus, exact.p_pur_minus, exact.p_ov], n, rng
    )
    return SwapSeparationStats(
        p_pur_plus=pur_plus.frequency,
        p_pur_minus=pur_minus.frequency,
        p_ov=ov.frequency,
        mode=StatsMode.EMPIRICAL,
        n_samples=n,
        ci_halfwidth=max(pur_plus.ci_halfwidth, pur_minus.ci_halfwidth, ov.ci_halfwidth)
    )


def _checked_root(squared: float) -> float:
    if squared < -tolerance_config.inconsistency:
        raise InconsistentStatisticsError(f"Squared separation {squared:.3g} is negative beyond tolerance")
    return math.sqrt(max(squared, 0.0))


def separation_weighted(
    sc: ConditionalScenario,
    x: int,
    stats: Optional[SwapSeparationStats] = None
) -> float:
    """
    Prior-weighted separation from SWAP statistics:
    R~^2 = 2[pi+^2 (2p_pur+ - 1) + pi-^2 (2p_pur- - 1) - 2 pi+ pi- (2p_ov - 1)] - (pi+ - pi-)^2
    """
    p = sc.pair(x)
    stats = stats or swap_separation_stats(sc, x)
    squared = (2.0 * (p.pi_plus ** 2 * (2.0 * stats.p_pur_plus - 1.0)
                      + p.pi_minus ** 2 * (2.0 * stats.p_pur_minus - 1.0)
                      - 2.0 * p.pi_plus * p.pi_minus * (2.0 * stats.p_ov - 1.0))
               - (p.pi_plus - p.pi_minus) ** 2)
    return _checked_root(squared)


def separation_symmetric(stats: SwapSeparationStats) -> float:
    """R^2 = p_pur+ + p_pur- - 2 p_ov (equal priors)"""
    return _checked_root(stats.p_pur_plus + stats.p_pur_minus - 2.0 * stats.p_ov)


def correlator(sc: ConditionalScenario, x: int, b: Sequence[float]) -> float:
    """E_xy = r_x . b_y"""
    return float(steering_vector(sc, x) @ _unit(b, "Bob direction"))


def correlator_from_outcomes(sc: ConditionalScenario, x: int, b: Sequence[float]) -> float:
    """sum_a a pi_a Tr(rho_a B) with B = b . sigma"""
    p = sc.pair(x)
    bob = sum(c * s for c, s in zip(_unit(b, "Bob direction"), PAULIS))
    total = 0.0
    for a, pi, state in ((1, p.pi_plus, p.states[0]), (-1, p.pi_minus, p.states[1])):
        total += a * pi * float(np.real(np.trace(state.matrix @ bob)))
    return total


def correlator_from_state(psi: TwoQubitPure, a_dir: Sequence[float], b_dir: Sequence[float]) -> float:
    """sum_{a,b} a b p(a, b) from the joint outcome probabilities"""
    vec = psi.vector
    a_dir = _unit(a_dir, "Alice direction")
    b_dir = _unit(b_dir, "Bob direction")
    total = 0.0
    for a in (1, -1):
        for b in (1, -1):
            joint = np.kron(_projector(a_dir, a), _projector(b_dir, b))
            total += a * b * float(np.real(vec.conj() @ joint @ vec))
    return total


def chsh(sc: ConditionalScenario, settings: BobSettings) -> float:
    """E00 + E01 + E10 - E11"""
    b0, b1 = settings.b0, settings.b1
    return (correlator(sc, 0, b0) + correlator(sc, 0, b1)
            + correlator(sc, 1, b0) - correlator(sc, 1, b1))


def chsh_bound(sc: ConditionalScenario) -> float:
    """2 sqrt(R~0^2 + R~1^2)"""
    r0 = separation_weighted(sc, 0)
    r1 = separation_weighted(sc, 1)
    return 2.0 * math.sqrt(r0 * r0 + r1 * r1)


def chsh_closed_form(sc: ConditionalScenario) -> float:
    """Exact maximum over projective settings: ||r0 + r1|| + ||r0 - r1||"""
    r0, r1 = steering_vector(sc, 0), steering_vector(sc, 1)
    return float(np.linalg.norm(r0 + r1) + np.linalg.norm(r0 - r1))


@dataclass
class ChshOptimum:
    """Result of maximize_chsh"""
    s_max: float
    settings: BobSettings
    bound: float
    closed_form: float
    starts: int
    analytic: bool

    @property
    def tightness_gap(self) -> float:
        return self.bound - self.s_max


def _orthogonal_candidate(r0: np.ndarray, r1: np.ndarray) -> Optional[BobSettings]:
    """
    For r0 perpendicular to r1: b0 + b1 along r0 and b0 - b1 along r1, with
    lengths 2cos(w) and 2sin(w), tan(w) = |r1|/|r0|.
    """
    n0, n1 = float(np.linalg.norm(r0)), float(np.linalg.norm(r1))
    if n0 == 0.0 or n1 == 0.0:
        return None
    if abs(float(r0 @ r1) / (n0 * n1)) >= 1e-8:
        return None
    w = math.atan2(n1, n0)
    u = 2.0 * math.cos(w) * r0 / n0
    v = 2.0 * math.sin(w) * r1 / n1
    return BobSettings(tuple(_normalize((u + v) / 2.0)), tuple(_normalize((u - v) / 2.0)))


def _closed_form_candidate(r0: np.ndarray, r1: np.ndarray) -> BobSettings:
    """b0 along r0 + r1 and b1 along r0 - r1; any direction serves where the sum vanishes"""
    def direction(w: np.ndarray) -> Tuple[float, float, float]:
        norm = float(np.linalg.norm(w))
        return tuple(Z_AXIS) if norm == 0.0 else tuple(float(c) for c in w / norm)
    return BobSettings(direction(r0 + r1), direction(r0 - r1))


def _random_frame(rng: np.random.Generator) -> np.ndarray:
    """Orthogonal 3x3 from the QR factor of a Gaussian matrix"""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    return q * np.sign(np.diag(r))


def maximize_chsh(
    sc: ConditionalScenario,
    tol: float = None,
    starts: int = None,
    seed: int = 0,
    workers: int = 1
) -> ChshOptimum:
    """
    Maximize the CHSH value over Bob's unit settings.

    Each b_y is parametrized by spherical angles in a coordinate frame drawn
    at random for every seeded start; each start runs a coordinate ascent with
    golden-section line searches. Ascent can stall at a pole of its frame,
    where phi has no effect. The closed-form optimum is always a
    candidate, and the perpendicular construction is added when r0 is
    perpendicular to r1. Ties are broken by the smallest setting tuple.
    """
    if tol is None:
        tol = search_config.line_tol
    if tol <= 0:
        raise PreconditionError(f"Tolerance must be positive, got {tol}")
    starts = starts or search_config.starts

    r0 = np.asarray(steering_vector(sc, 0), dtype=float)
    r1 = np.asarray(steering_vector(sc, 1), dtype=float)
    bounds = [(0.0, math.pi), (0.0, 2.0 * math.pi)] * 2
    streams = SeededStreams(seed)

    def candidate(settings: BobSettings):
        return chsh(sc, settings), tuple(float(c) for c in settings.b0 + settings.b1)

    def run_start(i: int):
        rng = streams.stream(i)
        frame = _random_frame(rng)
        u = [float(c) for c in frame @ (r0 + r1)]
        v = [float(c) for c in frame @ (r0 - r1)]

        def objective(angles) -> float:
            t0, p0, t1, p1 = angles
            s0 = math.sin(t0)
            s1 = math.sin(t1)
            b0 = (s0 * math.cos(p0), s0 * math.sin(p0), math.cos(t0))
            b1 = (s1 * math.cos(p1), s1 * math.sin(p1), math.cos(t1))
            # S = (r0 + r1) . b0 + (r0 - r1) . b1
            return sum(a * b for a, b in zip(u, b0)) + sum(a * b for a, b in zip(v, b1))

        x0 = rng.random(4) * np.array([math.pi, 2.0 * math.pi, math.pi, 2.0 * math.pi])
        result = coordinate_ascent(objective, x0, bounds, tol=tol)
        b0 = frame.T @ angles_to_vector(*result.x[:2])
        b1 = frame.T @ angles_to_vector(*result.x[2:])
        return candidate(BobSettings(tuple(_normalize(b0)), tuple(_normalize(b1))))

    candidates = parallel_map(run_start, range(starts), workers)
    candidates.append(candidate(_closed_form_candidate(r0, r1)))

    analytic = _orthogonal_candidate(r0, r1)
    if analytic is not None:
        candidates.append(candidate(analytic))

    s_max, key = best_of(candidates, 1e-12)
    settings = BobSettings(tuple(key[:3]), tuple(key[3:]))
    return ChshOptimum(
        s_max=s_max,
        settings=settings,
        bound=chsh_bound(sc),
        closed_form=chsh_closed_form(sc),
        starts=starts,
        analytic=analytic is not None
    )


def discriminability_bound(d0: float, d1: float) -> float:
    """CHSH ceiling 2 sqrt((2D0 - 1)^2 + (2D1 - 1)^2) from per-setting discriminabilities"""
    tol = tolerance_config.state
    for name, d in (("D0", d0), ("D1", d1)):
        if d < 0.5 - tol:
            raise PreconditionError(f"{name} = {d} is below random guessing (1/2)")
        if d > 1.0 + tol:
            raise PreconditionError(f"{name} = {d} exceeds 1")
    return 2.0 * math.sqrt((2.0 * d0 - 1.0) ** 2 + (2.0 * d1 - 1.0) ** 2)


@dataclass
class SeparationCheck:
    """Separation against discriminability for one setting with pure conditionals"""
    r_tilde: float
    two_d_minus_one: float
    holds: bool
    d: float
    p_guess: float
    gamma_sq: float


def separation_check(sc: ConditionalScenario, x: int) -> SeparationCheck:
    """
    Check R~_x <= 2 D_x - 1 for pure conditional states, with
    |gamma|^2 = (1 + s+ . s-)/2 taken from the Bloch geometry.
    """
    p = sc.pair(x)
    if not p.is_pure(tolerance_config.pure):
        raise PreconditionError(f"Conditional states at setting {x} are mixed; the check needs pure states")
    gamma_sq = min(max(0.5 * (1.0 + float(np.dot(p.s_plus, p.s_minus))), 0.0), 1.0)
    d = d_closed_form(p.pi_plus, p.pi_minus, gamma_sq)
    r_tilde = separation_weighted(sc, x)
    plus, minus = p.states
    p_guess = helstrom_guess(p.pi_plus, plus, p.pi_minus, minus)
    return SeparationCheck(
        r_tilde=r_tilde,
        two_d_minus_one=2.0 * d - 1.0,
        holds=r_tilde <= 2.0 * d - 1.0 + tolerance_config.inconsistency,
        d=d,
        p_guess=p_guess,
        gamma_sq=gamma_sq
    )


def symmetric_scenario(d: float) -> ConditionalScenario:
    """
    Equal-prior pure scenario with D0 = D1 = d and perpendicular steering
    vectors: s = (+-sin a, 0, cos a) at x = 0 and (0, +-sin a, cos a) at x = 1,
    sin a = 2d - 1. Both settings share Bob's marginal (I + cos a Z)/2.
    """
    if not 0.5 - tolerance_config.state <= d <= 1.0 + tolerance_config.state:
        raise PreconditionError(f"D must lie in [1/2, 1], got {d}")
    sin_a = min(max(2.0 * d - 1.0, 0.0), 1.0)
    cos_a = math.sqrt(1.0 - sin_a * sin_a)
    return ConditionalScenario((
        ConditionalPair(0.5, 0.5, (sin_a, 0.0, cos_a), (-sin_a, 0.0, cos_a)),
        ConditionalPair(0.5, 0.5, (0.0, sin_a, cos_a), (0.0, -sin_a, cos_a)),
    ))


def random_scenario(rng: np.random.Generator) -> ConditionalScenario:
    """Haar-random shared state with uniformly random Alice directions"""
    psi = TwoQubitPure.haar_random(rng)
    dirs = []
    for _ in range(2):
        v = rng.normal(size=3)
        dirs.append(v / np.linalg.norm(v))
    return conditional_from_bipartite(psi, dirs)


def standard_scenario(psi: TwoQubitPure) -> ConditionalScenario:
    """Alice along z for x = 0 and along x for x = 1"""
    return conditional_from_bipartite(psi, (Z_AXIS, X_AXIS))
