"""
Ontic Module - Finite preparation-noncontextual ontological models of the game

The two-state model assigns Bernoulli epistemic states to the test preparation
P_T, its complement P_T~, the prior preparation P_eta and its complement
P_eta~. Preparation noncontextuality is the mixture constraint
t + t~ = e + e~. A symmetric response matrix gives the SWAP-like pass
probabilities, and the searches below certify the direct bound numerically.
"""
import time
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import search_config, tolerance_config
from .errors import PreconditionError
from .game import Labeling, TwoStateEnsemble, d_closed_form, d_op_labeled, game_stats_exact, score
from .optimize import best_of, coordinate_ascent, parallel_map
from .sampling import SeededStreams


def _check_unit(name: str, value: float):
    if not -tolerance_config.state <= value <= 1.0 + tolerance_config.state:
        raise PreconditionError(f"{name} must lie in [0, 1], got {value}")


def _check_q(q: float):
    if not 0.0 <= q < 1.0:
        raise PreconditionError(f"q must lie in [0, 1), got {q}")


@dataclass(frozen=True)
class OnticModel2:
    """Weights on ontic state 0 of mu_T, mu_T~, mu_eta and mu_eta~"""
    t: float
    t_tilde: float
    e: float
    e_tilde: float

    def __post_init__(self):
        for name in ("t", "t_tilde", "e", "e_tilde"):
            _check_unit(name, getattr(self, name))

    @property
    def is_pnc_valid(self) -> bool:
        return pnc_residual(self) <= tolerance_config.state

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.t, self.t_tilde, self.e, self.e_tilde)

    def to_dict(self) -> Dict[str, float]:
        return {"t": self.t, "t_tilde": self.t_tilde, "e": self.e, "e_tilde": self.e_tilde}


@dataclass(frozen=True)
class ResponseMatrix:
    """Symmetric pass-probability matrix [[a, b], [b, c]] over ontic pairs"""
    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            _check_unit(name, getattr(self, name))

    @classmethod
    def swap_like(cls, q: float) -> "ResponseMatrix":
        """Deterministic pass on equal ontic states, pass with probability q otherwise"""
        _check_unit("q", q)
        return cls(a=1.0, b=q, c=1.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.b, self.c]])


@dataclass(frozen=True)
class SharpModelConfig:
    """Sharp-test model with confusability c and SWAP-like response q"""
    c_confusability: float
    q: float

    def __post_init__(self):
        _check_unit("c_confusability", self.c_confusability)
        _check_q(self.q)

    def to_model(self) -> OnticModel2:
        """mu_T = (1,0), mu_T~ = (0,1), mu_eta = (c,1-c), mu_eta~ = (1-c,c)"""
        c = self.c_confusability
        return OnticModel2(t=1.0, t_tilde=0.0, e=c, e_tilde=1.0 - c)


def pnc_residual(m: OnticModel2) -> float:
    """|t + t~ - e - e~|"""
    return abs(m.t + m.t_tilde - m.e - m.e_tilde)


def disagreement(t, e):
    """delta = t + e - 2te, the probability that the two ontic draws differ"""
    return t + e - 2.0 * t * e


def relabel_prior(m: OnticModel2) -> OnticModel2:
    """Swapped labeling of the prior preparation: position swap of mu_eta and mu_eta~"""
    return replace(m, e=1.0 - m.e, e_tilde=1.0 - m.e_tilde)


def game_probs(m: OnticModel2, xi: ResponseMatrix) -> Tuple[float, float]:
    """(p_pur, p_mix) for two draws from mu_T, and one from mu_T with one from mu_eta"""
    t, e = m.t, m.e
    p_pur = xi.a * t * t + 2.0 * xi.b * t * (1.0 - t) + xi.c * (1.0 - t) ** 2
    p_mix = (xi.a * t * e
             + xi.b * (t * (1.0 - e) + (1.0 - t) * e)
             + xi.c * (1.0 - t) * (1.0 - e))
    return p_pur, p_mix


def _score_q(t, e, q, eta1, eta2):
    """1 - 2(1-q)delta + 2 sqrt(2 eta1 eta2 (1-q) t (1-t)); works elementwise on arrays"""
    radicand = np.maximum(2.0 * eta1 * eta2 * (1.0 - q) * t * (1.0 - t), 0.0)
    return 1.0 - 2.0 * (1.0 - q) * disagreement(t, e) + 2.0 * np.sqrt(radicand)


def _best_labeling_score(t, e, q, eta1, eta2):
    return np.maximum(_score_q(t, e, q, eta1, eta2), _score_q(t, 1.0 - e, q, eta1, eta2))


def d_op_model_labeled(m: OnticModel2, q: float, eta1: float, eta2: float) -> Tuple[float, Labeling]:
    """Model score maximized over both labelings of the prior preparation"""
    if not m.is_pnc_valid:
        raise PreconditionError(f"Model violates preparation noncontextuality (residual {pnc_residual(m):.3g})")
    _check_q(q)
    identity = float(_score_q(m.t, m.e, q, eta1, eta2))
    swapped = float(_score_q(m.t, relabel_prior(m).e, q, eta1, eta2))
    if swapped > identity:
        return swapped, Labeling.SWAP
    return identity, Labeling.IDENTITY


def d_op_model(m: OnticModel2, q: float, eta1: float, eta2: float) -> float:
    return d_op_model_labeled(m, q, eta1, eta2)[0]


def direct_bound(q: float, c: float) -> float:
    """1 - 2(1-q) min(c, 1-c)"""
    _check_q(q)
    _check_unit("c", c)
    return 1.0 - 2.0 * (1.0 - q) * min(c, 1.0 - c)


def quantum_saturation(c: float) -> Tuple[float, float, float]:
    """
    Quantum game value against the direct bound at q = 1/2.

    Identical test states (overlap 1) with priors (c, 1-c) give the pure
    Gram-type state |0><0| and the prior state diag(c, 1-c).
    Returns (d_qm, bound, bound - d_qm).
    """
    if not 0.0 <= c <= 0.5:
        raise PreconditionError(f"c must lie in [0, 1/2] after relabeling, got {c}")
    ens = TwoStateEnsemble(eta1=c, eta2=1.0 - c, gamma12=1.0)
    d_qm = d_op_labeled(game_stats_exact(ens), ens)[0]
    bound = direct_bound(0.5, c)
    return d_qm, bound, bound - d_qm


def q_star(eta_min: float, d: float) -> float:
    """Response threshold 1 - (1-D)/(2 eta_min) above which the direct bound admits D"""
    if eta_min <= 0.0:
        raise PreconditionError("eta_min must be positive; a zero prior is degenerate")
    if eta_min > 0.5 + tolerance_config.state:
        raise PreconditionError(f"eta_min must not exceed 1/2, got {eta_min}")
    _check_unit("D", d)
    return 1.0 - (1.0 - d) / (2.0 * eta_min)


@dataclass
class ContradictionCheck:
    """Direct bound at c = eta_min against the quantum discriminability"""
    eta_min: float
    d: float
    q_star: float
    q: float
    bound: float

    @property
    def margin(self) -> float:
        return self.bound - self.d

    @property
    def holds(self) -> bool:
        return self.margin >= -tolerance_config.certification


def no_contradiction(eta1: float, gamma_sq: float, q: float) -> ContradictionCheck:
    eta_min = min(eta1, 1.0 - eta1)
    d = d_closed_form(eta1, 1.0 - eta1, gamma_sq)
    return ContradictionCheck(
        eta_min=eta_min,
        d=d,
        q_star=q_star(eta_min, d),
        q=q,
        bound=direct_bound(q, eta_min)
    )


def complete_pnc(t: float, e: float) -> Tuple[float, float]:
    """Smallest (t~, e~) with t + t~ = e + e~"""
    if e >= t:
        return e - t, 0.0
    return 0.0, t - e


@dataclass
class SearchResult:
    """Outcome of a two-state noncontextual search"""
    max_d_op: float
    capped_max: float
    argmax: OnticModel2
    labeling: Labeling
    resolution: int
    sharp: bool
    inputs: Dict[str, Optional[float]]
    witness: Optional[OnticModel2] = None
    witness_value: Optional[float] = None
    runtime: float = 0.0
    complete: bool = True

    def to_dict(self) -> Dict:
        data = dict(self.inputs)
        data.update({
            "sharp": self.sharp,
            "resolution": self.resolution,
            "max_d_op": self.max_d_op,
            "capped_max": self.capped_max,
            "labeling": self.labeling.value,
        })
        data.update({f"argmax_{k}": v for k, v in self.argmax.to_dict().items()})
        data["witness_value"] = self.witness_value
        data["complete"] = self.complete
        data["runtime"] = self.runtime
        return data


def _best_in_block(values: np.ndarray, keys: Sequence[np.ndarray], tol: float) -> Tuple[float, Tuple]:
    """Max of a flat block; tied entries resolved by the smallest key tuple"""
    top = float(np.max(values))
    tied = np.flatnonzero(values >= top - tol)
    # lexsort sorts by the last key first
    order = np.lexsort(tuple(k[tied] for k in reversed(keys)))
    i = tied[order[0]]
    return float(values[i]), tuple(float(k[i]) for k in keys)


def _sharp_block(t_values, grid, c_values, q, eta1, eta2, tol):
    """Sharp candidates for a slice of t values against every t~ and c"""
    t, t_tilde = np.meshgrid(t_values, grid, indexing="ij")
    t, t_tilde = t.ravel(), t_tilde.ravel()

    # Two ontic states: disjoint supports means one of mu_T, mu_T~ is (1,0)
    # and the other (0,1)
    disjoint = (t * t_tilde == 0.0) & ((1.0 - t) * (1.0 - t_tilde) == 0.0)
    if not disjoint.any():
        return None
    kept = int(disjoint.sum())
    t = np.repeat(t[disjoint], c_values.size)
    t_tilde = np.repeat(t_tilde[disjoint], c_values.size)
    c = np.tile(c_values, kept)

    # The sharp test passes exactly on the support of mu_T
    e = np.where(t == 1.0, c, 1.0 - c)
    e_tilde = t + t_tilde - e
    values = _best_labeling_score(t, e, q, eta1, eta2)
    return _best_in_block(values, (t, t_tilde, e, e_tilde), tol)


def _free_block(t_values, grid, q, eta1, eta2, tol):
    t, e = np.meshgrid(t_values, grid, indexing="ij")
    t, e = t.ravel(), e.ravel()
    values = _best_labeling_score(t, e, q, eta1, eta2)
    return _best_in_block(values, (t, e), tol)


def search_nc_max(
    q: float,
    eta1: float,
    eta2: float,
    sharp: bool = True,
    c: Optional[float] = None,
    resolution: Optional[int] = None,
    workers: Optional[int] = None
) -> SearchResult:
    """
    Grid search (plus local golden-section refinement for the free model) for
    the largest score of a PNC-valid two-state model.

    sharp=True fixes the sharp-test supports and derives mu_eta from the
    confusability c (gridded as well when c is None). sharp=False lets every
    epistemic weight vary; its raw maximum can exceed 1, so the value capped
    at the unit ceiling is reported next to it together with the
    deterministic witness t = e = 1.
    """
    resolution = resolution or search_config.resolution
    workers = workers or search_config.workers
    if resolution < search_config.min_resolution:
        raise PreconditionError(f"Resolution must be at least {search_config.min_resolution}, got {resolution}")
    _check_q(q)
    if c is not None:
        _check_unit("c", c)
    ens_check = TwoStateEnsemble(eta1, eta2)  # validates the priors
    tol = tolerance_config.state

    start = time.perf_counter()
    grid = np.linspace(0.0, 1.0, resolution)
    chunks = [chunk for chunk in np.array_split(grid, workers) if chunk.size]

    if sharp:
        c_values = np.array([c]) if c is not None else grid
        results = parallel_map(
            lambda chunk: _sharp_block(chunk, grid, c_values, q, ens_check.eta1, ens_check.eta2, tol),
            chunks, workers
        )
        results = [r for r in results if r is not None]
        if not results:
            raise PreconditionError("No sharp model on the grid")
        value, key = best_of(results, tol)
        argmax = OnticModel2(*key)
        max_d_op, labeling = d_op_model_labeled(argmax, q, eta1, eta2)
        witness, witness_value = None, None
    else:
        results = parallel_map(
            lambda chunk: _free_block(chunk, grid, q, eta1, eta2, tol),
            chunks, workers
        )
        value, (t0, e0) = best_of(results, tol)

        step = 1.0 / (resolution - 1)
        refined = coordinate_ascent(
            lambda x: float(_best_labeling_score(x[0], x[1], q, eta1, eta2)),
            (t0, e0),
            [(max(0.0, t0 - step), min(1.0, t0 + step)), (max(0.0, e0 - step), min(1.0, e0 + step))],
            tol=search_config.refine_tol
        )
        if refined.value > value + tol:
            t0, e0 = (float(v) for v in refined.x)
        argmax = OnticModel2(t0, *_pnc_pair(t0, e0))
        max_d_op, labeling = d_op_model_labeled(argmax, q, eta1, eta2)

        witness = OnticModel2(1.0, 0.0, 1.0, 0.0)
        witness_value = d_op_model(witness, q, eta1, eta2)

    return SearchResult(
        max_d_op=max_d_op,
        capped_max=min(max_d_op, 1.0),
        argmax=argmax,
        labeling=labeling,
        resolution=resolution,
        sharp=sharp,
        inputs={"q": q, "eta1": eta1, "eta2": eta2, "c": c},
        witness=witness,
        witness_value=witness_value,
        runtime=time.perf_counter() - start
    )


def _pnc_pair(t: float, e: float) -> Tuple[float, float, float]:
    t_tilde, e_tilde = complete_pnc(t, e)
    return t_tilde, e, e_tilde


@dataclass
class Constraints:
    """Support split and confusability for the n-state search"""
    t_support: Tuple[int, ...]
    t_tilde_support: Tuple[int, ...]
    c: Optional[float] = None

    @classmethod
    def halves(cls, n: int, c: Optional[float] = None) -> "Constraints":
        """First ceil(n/2) ontic states for P_T, the rest for P_T~"""
        k = (n + 1) // 2
        return cls(tuple(range(k)), tuple(range(k, n)), c)

    def validate(self, n: int):
        t_set, tt_set = set(self.t_support), set(self.t_tilde_support)
        if not t_set or not tt_set:
            raise PreconditionError("Both sharp supports must be non-empty")
        if t_set & tt_set:
            raise PreconditionError("Sharp supports must be disjoint")
        if not t_set | tt_set <= set(range(n)):
            raise PreconditionError(f"Supports must index ontic states 0..{n - 1}")
        if self.c is not None:
            _check_unit("c", self.c)


@dataclass
class GeneralSearchResult:
    """Best model found by the n-state search; a lower bound on the NC maximum"""
    best_d_op: float
    mu_t: Tuple[float, ...]
    mu_t_tilde: Tuple[float, ...]
    mu_eta: Tuple[float, ...]
    mu_eta_tilde: Tuple[float, ...]
    labeling: Labeling
    evaluations: int
    complete: bool
    inputs: Dict = field(default_factory=dict)
    lower_bound: bool = True

    def to_dict(self) -> Dict:
        data = dict(self.inputs)
        data.update({
            "best_d_op": self.best_d_op,
            "lower_bound": self.lower_bound,
            "labeling": self.labeling.value,
            "evaluations": self.evaluations,
            "complete": self.complete,
            "mu_t": " ".join(f"{v:.6g}" for v in self.mu_t),
            "mu_t_tilde": " ".join(f"{v:.6g}" for v in self.mu_t_tilde),
            "mu_eta": " ".join(f"{v:.6g}" for v in self.mu_eta),
            "mu_eta_tilde": " ".join(f"{v:.6g}" for v in self.mu_eta_tilde),
        })
        return data


def _normalized(weights: np.ndarray) -> np.ndarray:
    total = weights.sum()
    if total <= 0.0:
        return np.full(weights.size, 1.0 / weights.size)
    return weights / total


def _fit_mass(alpha: np.ndarray, mu: np.ndarray, target: float) -> np.ndarray:
    """Rescale alpha in [0,1]^k so that sum(alpha * mu) equals target"""
    mass = float(alpha @ mu)
    if mass >= target:
        return alpha * (target / mass) if mass > 0.0 else np.zeros_like(alpha)
    return 1.0 - (1.0 - alpha) * (1.0 - target) / (1.0 - mass)


class _GeneralModel:
    """Maps a point of the unit cube onto a feasible n-state model"""

    def __init__(self, n: int, constraints: Constraints):
        self.n = n
        self.t_idx = np.array(constraints.t_support, dtype=int)
        self.tt_idx = np.array(constraints.t_tilde_support, dtype=int)
        self.c = constraints.c
        k, m = self.t_idx.size, self.tt_idx.size
        self.slices = (slice(0, k), slice(k, k + m), slice(k + m, 2 * k + m), slice(2 * k + m, 2 * (k + m)))
        self.dim = 2 * (k + m) + (1 if self.c is None else 0)

    def distributions(self, x: np.ndarray) -> Tuple[np.ndarray, ...]:
        c = self.c if self.c is not None else float(x[-1])
        w_t, w_tt, alpha, beta = (x[s] for s in self.slices)

        mu_t = np.zeros(self.n)
        mu_tt = np.zeros(self.n)
        mu_t[self.t_idx] = _normalized(w_t)
        mu_tt[self.tt_idx] = _normalized(w_tt)

        # mu_eta <= mu_T + mu_T~ pointwise keeps mu_eta~ non-negative; the
        # sharp test for P_T passes on its support with probability c
        mu_eta = np.zeros(self.n)
        mu_eta[self.t_idx] = _fit_mass(alpha, mu_t[self.t_idx], c) * mu_t[self.t_idx]
        mu_eta[self.tt_idx] = _fit_mass(beta, mu_tt[self.tt_idx], 1.0 - c) * mu_tt[self.tt_idx]
        mu_eta_tilde = np.clip(mu_t + mu_tt - mu_eta, 0.0, None)
        return mu_t, mu_tt, mu_eta, mu_eta_tilde

    def corner(self) -> np.ndarray:
        """Point mass on the first ontic state of each support"""
        x = np.zeros(self.dim)
        x[self.slices[0].start] = 1.0
        x[self.slices[1].start] = 1.0
        x[self.slices[2]] = 1.0
        x[self.slices[3]] = 1.0
        if self.c is None:
            x[-1] = 0.0
        return x


def _general_score(mu_t, mu_eta, mu_eta_tilde, q, eta1, eta2) -> Tuple[float, Labeling]:
    """Score with the exchange-symmetric response: diagonal 1, off-diagonal q"""
    p_pur = q + (1.0 - q) * float(mu_t @ mu_t)
    p_id = q + (1.0 - q) * float(mu_t @ mu_eta)
    p_swap = q + (1.0 - q) * float(mu_t @ mu_eta_tilde)
    identity = score(p_id, p_pur, eta1, eta2)
    swapped = score(p_swap, p_pur, eta1, eta2)
    if swapped > identity:
        return swapped, Labeling.SWAP
    return identity, Labeling.IDENTITY


def search_nc_max_general(
    n: int,
    q: float,
    eta1: float,
    eta2: float,
    constraints: Optional[Constraints] = None,
    budget: Optional[int] = None,
    seed: int = 0,
    starts: int = 8
) -> GeneralSearchResult:
    """
    Multistart coordinate ascent over n-state epistemic distributions with
    disjoint sharp supports and the PNC mixture constraint.

    The result is the best model found, which only bounds the noncontextual
    maximum from below. When the evaluation budget runs out the best-so-far
    model is returned with complete=False.
    """
    if n < 2:
        raise PreconditionError(f"Need at least two ontic states, got {n}")
    _check_q(q)
    TwoStateEnsemble(eta1, eta2)
    constraints = constraints or Constraints.halves(n)
    constraints.validate(n)
    budget = budget or search_config.budget

    model = _GeneralModel(n, constraints)

    def objective(x: np.ndarray) -> float:
        mu_t, _, mu_eta, mu_eta_tilde = model.distributions(np.clip(x, 0.0, 1.0))
        return _general_score(mu_t, mu_eta, mu_eta_tilde, q, eta1, eta2)[0]

    streams = SeededStreams(seed)
    bounds = [(0.0, 1.0)] * model.dim
    evaluations = 0
    complete = True
    candidates: List[Tuple[float, Tuple]] = []

    for i in range(max(starts, 1)):
        remaining = budget - evaluations
        if remaining <= 0:
            complete = False
            break
        x0 = model.corner() if i == 0 else streams.stream(i).random(model.dim)
        result = coordinate_ascent(
            objective, x0, bounds,
            tol=search_config.line_tol,
            max_evaluations=remaining
        )
        evaluations += result.evaluations
        if not result.converged:
            complete = False
        candidates.append((result.value, tuple(float(v) for v in result.x)))

    _, key = best_of(candidates, tolerance_config.state)
    mu_t, mu_tt, mu_eta, mu_eta_tilde = model.distributions(np.array(key))
    best, labeling = _general_score(mu_t, mu_eta, mu_eta_tilde, q, eta1, eta2)

    return GeneralSearchResult(
        best_d_op=best,
        mu_t=tuple(mu_t.tolist()),
        mu_t_tilde=tuple(mu_tt.tolist()),
        mu_eta=tuple(mu_eta.tolist()),
        mu_eta_tilde=tuple(mu_eta_tilde.tolist()),
        labeling=labeling,
        evaluations=evaluations,
        complete=complete,
        inputs={"n_states": n, "q": q, "eta1": eta1, "eta2": eta2, "c": constraints.c}
    )
