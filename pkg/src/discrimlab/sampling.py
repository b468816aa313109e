"""
Sampling Module - Seeded counter-based RNG streams and Bernoulli frequency sampling
"""
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .config import sampling_config
from .errors import PreconditionError


class SeededStreams:
    """
    Deterministic family of independent random streams.

    Stream `i` is a Philox generator keyed by (seed, i), so a sweep row or an
    optimizer start always sees the same numbers whatever thread runs it.
    """

    def __init__(self, seed: int = 0):
        self._seed = int(seed)

    @property
    def seed(self) -> int:
        return self._seed

    def stream(self, index: int) -> np.random.Generator:
        """Generator for stream `index`"""
        child = np.random.SeedSequence(self._seed, spawn_key=(int(index),))
        return np.random.Generator(np.random.Philox(child))

    def streams(self, count: int) -> List[np.random.Generator]:
        return [self.stream(i) for i in range(count)]

    def fork(self, index: int) -> "SeededStreams":
        """Child family with a derived seed, for nested sweeps"""
        child_seed = int(self.stream(index).integers(0, 2 ** 63 - 1))
        return SeededStreams(child_seed)


def make_rng(seed: int = 0, stream: int = 0) -> np.random.Generator:
    """Convenience: one Philox generator for (seed, stream)"""
    return SeededStreams(seed).stream(stream)


@dataclass(frozen=True)
class SampledFrequency:
    """Empirical pass frequency with its normal-approximation half-width"""
    probability: float
    frequency: float
    n_samples: int
    ci_halfwidth: float

    @property
    def inside(self) -> bool:
        return abs(self.frequency - self.probability) <= self.ci_halfwidth


def ci_halfwidth(frequency: float, n: int, sigmas: float = None) -> float:
    """sigmas * sqrt(p(1-p)/n)"""
    sigmas = sampling_config.ci_sigmas if sigmas is None else sigmas
    return float(sigmas * np.sqrt(max(frequency * (1.0 - frequency), 0.0) / n))


def sample_frequencies(
    probs: Sequence[float],
    n: int,
    rng: np.random.Generator,
    sigmas: float = None
) -> List[SampledFrequency]:
    """
    For each success probability, the mean of n independent Bernoulli draws.

    The n draws of one probability are taken as a single binomial count, which
    has the same distribution as summing the draws.
    """
    if n < 1:
        raise PreconditionError(f"Number of samples must be at least 1, got {n}")

    results = []
    for p in probs:
        p = float(np.clip(p, 0.0, 1.0))
        count = int(rng.binomial(n, p))
        freq = count / n
        results.append(SampledFrequency(
            probability=p,
            frequency=freq,
            n_samples=n,
            ci_halfwidth=ci_halfwidth(freq, n, sigmas)
        ))
    return results
