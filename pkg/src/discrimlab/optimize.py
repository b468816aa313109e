"""
Optimize Module - Golden-section line search, scan-then-refine and coordinate ascent
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from .config import search_config

T = TypeVar("T")

INV_PHI = (math.sqrt(5) - 1) / 2  # 1/phi
INV_PHI_SQ = (3 - math.sqrt(5)) / 2  # 1/phi^2


def golden_section_max(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10
) -> Tuple[float, float]:
    """
    Maximize a unimodal 1-D function on [a, b].

    Returns (x, f(x)). The bracket endpoints are evaluated too, so a maximum
    sitting on the boundary is not lost.
    """
    dist = b - a
    if dist <= tol:
        x = (a + b) / 2
        return x, f(x)

    n = int(math.ceil(math.log(tol / dist) / math.log(INV_PHI)))
    c = a + INV_PHI_SQ * dist
    d = a + INV_PHI * dist
    yc = f(c)
    yd = f(d)

    for _ in range(max(n - 1, 0)):
        if yc > yd:
            b = d
            d = c
            yd = yc
            dist = INV_PHI * dist
            c = a + INV_PHI_SQ * dist
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            dist = INV_PHI * dist
            d = a + INV_PHI * dist
            yd = f(d)

    x = (a + d) / 2 if yc > yd else (c + b) / 2
    candidates = [(f(x), x), (f(a), a), (f(b), b)]
    best_y, best_x = max(candidates, key=lambda pair: pair[0])
    return best_x, best_y


def scan_then_refine(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    points: Optional[int] = None,
    tol: float = 1e-10
) -> Tuple[float, float]:
    """Coarse uniform scan, then golden section on the cells around the best point"""
    points = points or search_config.scan_points
    xs = np.linspace(lo, hi, points)
    ys = [f(x) for x in xs]
    i = int(np.argmax(ys))
    step = (hi - lo) / (points - 1)
    a = max(lo, xs[i] - step)
    b = min(hi, xs[i] + step)
    x, y = golden_section_max(f, a, b, tol)
    if ys[i] > y:
        return float(xs[i]), float(ys[i])
    return x, y


@dataclass
class AscentResult:
    """Outcome of a coordinate ascent"""
    x: np.ndarray
    value: float
    sweeps: int
    evaluations: int
    converged: bool


def coordinate_ascent(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    bounds: Sequence[Tuple[float, float]],
    tol: float = 1e-8,
    max_sweeps: Optional[int] = None,
    max_evaluations: Optional[int] = None,
    scan_points: Optional[int] = None
) -> AscentResult:
    """
    Maximize f by cycling over coordinates, each step a scan-then-refine line
    search over that coordinate's full bound. Stops when a sweep improves the
    value by less than tol, or when the evaluation budget runs out.
    """
    max_sweeps = max_sweeps or search_config.max_sweeps
    x = np.array(x0, dtype=float)
    evaluations = 0

    def counted(vec):
        nonlocal evaluations
        evaluations += 1
        return f(vec)

    value = counted(x)
    for sweep in range(1, max_sweeps + 1):
        previous = value
        for k, (lo, hi) in enumerate(bounds):
            def along(t, k=k):
                trial = x.copy()
                trial[k] = t
                return counted(trial)

            t_best, y_best = scan_then_refine(along, lo, hi, scan_points, tol)
            if y_best > value:
                x[k] = t_best
                value = y_best
            if max_evaluations is not None and evaluations >= max_evaluations:
                return AscentResult(x, value, sweep, evaluations, False)
        if value - previous < tol:
            return AscentResult(x, value, sweep, evaluations, True)
    return AscentResult(x, value, max_sweeps, evaluations, False)


def parallel_map(func: Callable[[T], object], items: Iterable[T], workers: int = 1) -> List[object]:
    """Map preserving input order; threads only when workers > 1"""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def best_of(candidates: Iterable[Tuple[float, Tuple]], tol: float = 0.0) -> Tuple[float, Tuple]:
    """
    Max by value; values within tol of the best are tied and the smallest
    key tuple wins, so the reduction does not depend on completion order.
    """
    candidates = list(candidates)
    top = max(value for value, _ in candidates)
    tied = [(key, value) for value, key in candidates if value >= top - tol]
    key, value = min(tied, key=lambda pair: pair[0])
    return value, key
