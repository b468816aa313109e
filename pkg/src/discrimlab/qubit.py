"""
Qubit Module - Exact single-qubit state algebra

Bloch vectors are the canonical storage; the 2x2 density matrix is computed on
demand. Functions that take a "state" accept either a QubitState or a raw 2x2
complex matrix (Complex2x2) that passes the density-operator checks.
"""
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from .config import tolerance_config
from .errors import PreconditionError, UnphysicalStateError

# Raw 2x2 complex matrix; used for the Gram-type state and prior states
Complex2x2 = np.ndarray

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


@dataclass(frozen=True)
class QubitState:
    """Single-qubit density operator stored as its Bloch vector"""
    bloch: Tuple[float, float, float]

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.bloch, dtype=float)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    @property
    def matrix(self) -> Complex2x2:
        sx, sy, sz = self.bloch
        return 0.5 * (IDENTITY + sx * SIGMA_X + sy * SIGMA_Y + sz * SIGMA_Z)

    def is_pure(self, tol: float = None) -> bool:
        tol = tolerance_config.pure if tol is None else tol
        return abs(self.norm - 1.0) <= tol

    @classmethod
    def from_matrix(cls, m: Complex2x2) -> "QubitState":
        return density_to_bloch(m)


State = Union[QubitState, Complex2x2]


def is_hermitian(m: Complex2x2, tol: float = None) -> bool:
    tol = tolerance_config.state if tol is None else tol
    m = np.asarray(m)
    return m.shape == (2, 2) and bool(np.allclose(m, m.conj().T, atol=tol, rtol=0))


def is_psd(m: Complex2x2, tol: float = None) -> bool:
    """Hermitian with every eigenvalue >= -tol"""
    tol = tolerance_config.state if tol is None else tol
    if not is_hermitian(m, tol):
        return False
    return bool(np.linalg.eigvalsh(np.asarray(m)).min() >= -tol)


def has_unit_trace(m: Complex2x2, tol: float = None) -> bool:
    tol = tolerance_config.state if tol is None else tol
    return abs(complex(np.trace(m)) - 1.0) <= tol


def validate_density(m: Complex2x2, tol: float = None) -> Complex2x2:
    """Return m as a complex array, or raise UnphysicalStateError"""
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise UnphysicalStateError(f"Expected a 2x2 matrix, got shape {m.shape}")
    if not is_hermitian(m, tol):
        raise UnphysicalStateError("Matrix is not Hermitian")
    if not has_unit_trace(m, tol):
        raise UnphysicalStateError(f"Trace is {complex(np.trace(m)):.6g}, expected 1")
    if not is_psd(m, tol):
        raise UnphysicalStateError("Matrix has a negative eigenvalue")
    return m


def _as_matrix(state: State) -> Complex2x2:
    if isinstance(state, QubitState):
        return state.matrix
    return validate_density(state)


def bloch_to_density(s: Sequence[float]) -> QubitState:
    """rho = (I + s.sigma) / 2 for ||s|| <= 1"""
    vec = np.asarray(s, dtype=float).reshape(-1)
    if vec.shape != (3,):
        raise UnphysicalStateError(f"Bloch vector must have 3 components, got {vec.shape[0]}")
    norm = float(np.linalg.norm(vec))
    if norm > 1.0 + tolerance_config.state:
        raise UnphysicalStateError(f"Unphysical Bloch vector: norm {norm:.15g} > 1")
    return QubitState(bloch=(float(vec[0]), float(vec[1]), float(vec[2])))


def density_to_bloch(m: Complex2x2) -> QubitState:
    """s_k = Tr(rho sigma_k)"""
    m = validate_density(m)
    s = [float(np.real(np.trace(m @ p))) for p in PAULIS]
    return bloch_to_density(s)


def purity(rho: State) -> float:
    """Tr(rho^2) = (1 + ||s||^2) / 2"""
    if isinstance(rho, QubitState):
        return 0.5 * (1.0 + float(rho.vector @ rho.vector))
    m = _as_matrix(rho)
    return float(np.real(np.trace(m @ m)))


def overlap(rho: State, sigma: State) -> float:
    """Tr(rho sigma) = (1 + s.s') / 2"""
    if isinstance(rho, QubitState) and isinstance(sigma, QubitState):
        return 0.5 * (1.0 + float(rho.vector @ sigma.vector))
    return float(np.real(np.trace(_as_matrix(rho) @ _as_matrix(sigma))))


def determinant(rho: State) -> float:
    """det rho = (1 - Tr rho^2) / 2 for a qubit"""
    if isinstance(rho, QubitState):
        return 0.25 * (1.0 - float(rho.vector @ rho.vector))
    return float(np.real(np.linalg.det(_as_matrix(rho))))


def _clamped(value: float, what: str) -> float:
    if value < -tolerance_config.state:
        raise UnphysicalStateError(f"Negative {what}: {value:.6g}")
    return max(value, 0.0)


def fidelity_qubit(rho: State, sigma: State) -> float:
    """F = Tr(rho sigma) + 2 sqrt(det rho det sigma)"""
    det_rho = _clamped(determinant(rho), "determinant")
    det_sigma = _clamped(determinant(sigma), "determinant")
    return float(overlap(rho, sigma) + 2.0 * np.sqrt(det_rho * det_sigma))


def psd_sqrt(m: Complex2x2) -> Complex2x2:
    """Square root of a PSD matrix through its eigendecomposition"""
    vals, vecs = np.linalg.eigh(np.asarray(m, dtype=complex))
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def uhlmann_fidelity(rho: State, sigma: State) -> float:
    """(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, valid in any dimension"""
    root = psd_sqrt(_as_matrix(rho))
    inner = root @ _as_matrix(sigma) @ root
    inner = 0.5 * (inner + inner.conj().T)
    vals = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sum(np.sqrt(vals)) ** 2)


def helstrom_guess(pi_plus: float, rho_plus: State, pi_minus: float, rho_minus: State) -> float:
    """
    Optimal minimum-error success probability for two weighted states:
    (1 + ||pi+ rho+ - pi- rho-||_1) / 2
    """
    tol = tolerance_config.state
    if pi_plus < -tol or pi_minus < -tol:
        raise PreconditionError(f"Priors must be non-negative, got ({pi_plus}, {pi_minus})")
    if abs(pi_plus + pi_minus - 1.0) > tol:
        raise PreconditionError(f"Priors must sum to 1, got {pi_plus + pi_minus:.15g}")

    diff = pi_plus * _as_matrix(rho_plus) - pi_minus * _as_matrix(rho_minus)
    diff = 0.5 * (diff + diff.conj().T)
    trace_norm = float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
    return 0.5 * (1.0 + trace_norm)


def pure_state(theta: float, phi: float = 0.0) -> QubitState:
    """Pure state with polar angle theta and azimuth phi on the Bloch sphere"""
    return bloch_to_density((np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)))


def random_bloch(rng: np.random.Generator, pure: bool = False) -> np.ndarray:
    """Uniform direction; radius uniform in the ball volume unless pure"""
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    if pure:
        return v
    return v * rng.random() ** (1.0 / 3.0)
