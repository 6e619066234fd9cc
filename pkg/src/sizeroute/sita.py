"""SITA: jobs no larger than the cutoff go to server 1, the rest to server 2.

Splitting a Poisson stream by job size yields two independent Poisson
streams, so both servers are exact M/G/1 stations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from scipy.optimize import bisect

from .distributions import BoundedPareto
from .errors import DomainError
from .mg1 import ServiceMoments, StationEvaluation, station_or_unstable
from .search import ThresholdSearchResult, minimize_threshold


@dataclass(frozen=True)
class PolicyEvaluation:
    policy: str
    threshold: float
    station1: StationEvaluation
    station2: StationEvaluation
    fraction_to_2: float
    total_wait: float
    feasible: bool = True
    reason: str | None = None

    def as_dict(self) -> dict:
        return {
            "policy": self.policy,
            "threshold": self.threshold,
            "station1": self.station1.as_dict(),
            "station2": self.station2.as_dict(),
            "fraction_to_2": self.fraction_to_2,
            "total_wait": self.total_wait,
            "feasible": self.feasible,
            "reason": self.reason,
        }


def check_threshold(d: BoundedPareto, s: float) -> None:
    if not (1.0 <= s <= d.r):
        raise DomainError(f"threshold must lie in [1, r={d.r}], got {s!r}")


def check_rate(arrival_rate: float) -> None:
    if not (arrival_rate > 0.0 and math.isfinite(arrival_rate)):
        raise DomainError(f"arrival rate must be positive, got {arrival_rate!r}")


def conditional_moments(d: BoundedPareto, a: float, b: float, mass: float) -> ServiceMoments | None:
    """First two moments of X given a <= X <= b; ``None`` for an empty interval.

    ``mass`` only decides emptiness; the normalizer is the zeroth partial
    moment from the same closed form, so rounding cancels on short intervals.
    """
    if mass <= 0.0 or a >= b:
        return None
    norm = d.partial_moment(0.0, a, b)
    return ServiceMoments(d.partial_moment(1.0, a, b) / norm, d.partial_moment(2.0, a, b) / norm)


def _combine_reasons(*reasons):
    found = [x for x in reasons if x]
    return "; ".join(found) if found else None


def evaluate_sita(d: BoundedPareto, arrival_rate: float, s: float) -> PolicyEvaluation:
    check_threshold(d, s)
    check_rate(arrival_rate)
    p1 = d.cdf(s)
    p2 = d.survival(s)
    st1, why1 = station_or_unstable(arrival_rate * p1, conditional_moments(d, 1.0, s, p1), "server 1")
    st2, why2 = station_or_unstable(arrival_rate * p2, conditional_moments(d, s, d.r, p2), "server 2")
    reason = _combine_reasons(why1, why2)
    if reason:
        return PolicyEvaluation("sita", s, st1, st2, p2, math.inf, False, reason)
    w1 = st1.mean_wait if p1 > 0.0 else 0.0
    w2 = st2.mean_wait if p2 > 0.0 else 0.0
    total = p1 * w1 + p2 * w2
    return PolicyEvaluation("sita", s, st1, st2, p2, total)


def pk_waits(arrival_rate, m1, m2) -> np.ndarray:
    """Elementwise M/G/1 mean wait with ``inf`` for unstable stations and 0 for idle ones."""
    load = arrival_rate * m1
    with np.errstate(divide="ignore", invalid="ignore"):
        wait = np.where(load < 1.0, arrival_rate * m2 / (2.0 * (1.0 - load)), np.inf)
    return np.where(arrival_rate > 0.0, wait, 0.0)


def _conditional(d: BoundedPareto, a, b, mass):
    with np.errstate(divide="ignore", invalid="ignore"):
        norm = d.partial_moments(0.0, a, b)
        m1 = np.where(mass > 0.0, d.partial_moments(1.0, a, b) / norm, 0.0)
        m2 = np.where(mass > 0.0, d.partial_moments(2.0, a, b) / norm, 0.0)
    return m1, m2


def sita_total_waits(d: BoundedPareto, arrival_rate: float, s: np.ndarray) -> np.ndarray:
    """``evaluate_sita(...).total_wait`` over an array of cutoffs."""
    p2 = d.survivals(s)
    p1 = np.where(s >= d.r, 1.0, d.cdf(s))
    m11, m12 = _conditional(d, np.ones_like(s), s, p1)
    m21, m22 = _conditional(d, s, np.full_like(s, d.r), p2)
    w1 = pk_waits(arrival_rate * p1, m11, m12)
    w2 = pk_waits(arrival_rate * p2, m21, m22)
    return np.where(np.isfinite(w1) & np.isfinite(w2), p1 * w1 + p2 * w2, np.inf)


def optimal_sita_cutoff(d: BoundedPareto, arrival_rate: float) -> ThresholdSearchResult:
    check_rate(arrival_rate)
    return minimize_threshold(lambda s: evaluate_sita(d, arrival_rate, s).total_wait, d.r,
                              grid_objective=lambda g: sita_total_waits(d, arrival_rate, g))


def load_balancing_cutoff(d: BoundedPareto) -> float:
    """Cutoff at which both servers receive equal work."""
    def imbalance(s: float) -> float:
        return d.partial_moment(1.0, 1.0, s) - d.partial_moment(1.0, s, d.r)

    return bisect(imbalance, 1.0, d.r, xtol=1e-15, rtol=1e-15, maxiter=400)
