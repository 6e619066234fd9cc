"""TAGS: every job starts at server 1; jobs still running at age ``s`` are
killed and restarted from scratch at server 2.

Server 1 sees the full Poisson stream with service ``min(X, s)``. Server 2 is
fed by the overflow stream, which is not Poisson; it is nevertheless
evaluated with the M/G/1 formula at rate ``lam * P(X > s)``. The simulator
gives the assumption-free comparison.
"""

from __future__ import annotations

import math

import numpy as np

from .distributions import BoundedPareto
from .mg1 import ServiceMoments, station_or_unstable
from .search import ThresholdSearchResult, minimize_threshold
from .sita import (PolicyEvaluation, _conditional, check_rate, check_threshold,
                   conditional_moments, pk_waits)


def truncated_service_moments(d: BoundedPareto, s: float, k: float) -> float:
    """``E[min(X, s)**k]``, the k-th moment of server-1 service under TAGS."""
    check_threshold(d, s)
    return d.partial_moment(k, 1.0, s) + s**k * d.survival(s)


def evaluate_tags(d: BoundedPareto, arrival_rate: float, s: float) -> PolicyEvaluation:
    check_threshold(d, s)
    check_rate(arrival_rate)
    overflow = d.survival(s)
    m1 = ServiceMoments(truncated_service_moments(d, s, 1.0), truncated_service_moments(d, s, 2.0))
    st1, why1 = station_or_unstable(arrival_rate, m1, "server 1")
    # full size at server 2: the restart discards the work done at server 1
    st2, why2 = station_or_unstable(arrival_rate * overflow,
                                    conditional_moments(d, s, d.r, overflow), "server 2")
    reasons = [x for x in (why1, why2) if x]
    if reasons:
        return PolicyEvaluation("tags", s, st1, st2, overflow, math.inf, False, "; ".join(reasons))
    total = st1.mean_wait + overflow * s + overflow * st2.mean_wait
    return PolicyEvaluation("tags", s, st1, st2, overflow, total)


def tags_total_waits(d: BoundedPareto, arrival_rate: float, s: np.ndarray) -> np.ndarray:
    """``evaluate_tags(...).total_wait`` over an array of thresholds."""
    overflow = d.survivals(s)
    ones = np.ones_like(s)
    w1 = pk_waits(arrival_rate,
                  d.partial_moments(1.0, ones, s) + s * overflow,
                  d.partial_moments(2.0, ones, s) + s * s * overflow)
    m21, m22 = _conditional(d, s, np.full_like(s, d.r), overflow)
    w2 = pk_waits(arrival_rate * overflow, m21, m22)
    total = w1 + overflow * s + overflow * w2
    return np.where(np.isfinite(w1) & np.isfinite(w2), total, np.inf)


def optimal_tags_threshold(d: BoundedPareto, arrival_rate: float) -> ThresholdSearchResult:
    check_rate(arrival_rate)
    return minimize_threshold(lambda s: evaluate_tags(d, arrival_rate, s).total_wait, d.r,
                              grid_objective=lambda g: tags_total_waits(d, arrival_rate, g))
