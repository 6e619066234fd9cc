"""Grid-then-golden-section minimization of a threshold objective on [1, r]."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

GRID_POINTS = 1024
REL_TOL = 1e-8
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ThresholdSearchResult:
    optimal_threshold: float
    optimal_value: float
    evaluations: int
    feasible: bool
    grid: tuple = field(default=(), repr=False, compare=False)
    grid_values: tuple = field(default=(), repr=False, compare=False)

    def as_dict(self) -> dict:
        return {
            "optimal_threshold": self.optimal_threshold,
            "optimal_value": self.optimal_value,
            "evaluations": self.evaluations,
            "feasible": self.feasible,
        }


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float):
    """Minimize ``f`` on ``[lo, hi]``; return ``(x, f(x), evaluations)``."""
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    n = 2
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
        n += 1
    return (x1, f1, n) if f1 <= f2 else (x2, f2, n)


def minimize_threshold(objective: Callable[[float], float], r: float,
                       points: int = GRID_POINTS, rtol: float = REL_TOL,
                       grid_objective: Callable[[np.ndarray], np.ndarray] | None = None,
                       ) -> ThresholdSearchResult:
    """Scan a log-spaced grid over ``[1, r]`` and refine around the best point.

    ``objective`` must return ``inf`` at infeasible thresholds. Refinement runs
    golden-section search in ``log s`` over the neighbours of the best grid
    point, so ``rtol`` is a relative tolerance in ``s``.
    """
    grid = np.geomspace(1.0, r, points)
    grid[0], grid[-1] = 1.0, r
    if grid_objective is not None:
        values = np.asarray(grid_objective(grid), dtype=float)
    else:
        values = np.array([objective(float(s)) for s in grid])
    i = int(np.argmin(values))
    best_s, best_v = float(grid[i]), float(values[i])
    evaluations = points
    if not math.isfinite(best_v):
        return ThresholdSearchResult(math.nan, math.inf, evaluations, False,
                                     tuple(grid), tuple(values))
    lo = math.log(grid[max(i - 1, 0)])
    hi = math.log(grid[min(i + 1, points - 1)])

    def in_log(t: float) -> float:
        return objective(min(max(math.exp(t), 1.0), r))

    t, v, n = golden_section(in_log, lo, hi, rtol)
    evaluations += n
    if v < best_v:
        best_s, best_v = min(max(math.exp(t), 1.0), r), v
    return ThresholdSearchResult(best_s, best_v, evaluations, True, tuple(grid), tuple(values))
