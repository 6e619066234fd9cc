"""Pollaczek-Khinchine mean wait for an M/G/1 FCFS station."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, UnstableStationError

# relative slack on the Jensen check; conditional moments over very
# short intervals can undershoot m1**2 by a few ulps
_JENSEN_RTOL = 1e-9


@dataclass(frozen=True)
class ServiceMoments:
    m1: float
    m2: float

    def __post_init__(self):
        if not (self.m1 > 0.0 and math.isfinite(self.m1)):
            raise DomainError(f"m1 must be positive and finite, got {self.m1!r}")
        if not self.m2 >= self.m1 * self.m1 * (1.0 - _JENSEN_RTOL):
            raise DomainError(f"m2={self.m2!r} violates m2 >= m1**2 (m1={self.m1!r})")


@dataclass(frozen=True)
class StationEvaluation:
    arrival_rate: float
    load: float
    mean_wait: float

    @property
    def stable(self) -> bool:
        return self.load < 1.0

    def as_dict(self) -> dict:
        return {"arrival_rate": self.arrival_rate, "load": self.load, "mean_wait": self.mean_wait}


IDLE_STATION = StationEvaluation(0.0, 0.0, 0.0)


def pk_wait(arrival_rate: float, moments: ServiceMoments, station: str = "") -> StationEvaluation:
    """Mean queueing delay ``lam * E[S^2] / (2 (1 - rho))``.

    Raises
    ------
    UnstableStationError
        If ``rho = lam * E[S] >= 1``; ``station`` labels the error.
    """
    if arrival_rate < 0.0 or math.isnan(arrival_rate):
        raise DomainError(f"arrival rate must be >= 0, got {arrival_rate!r}")
    load = arrival_rate * moments.m1
    if load >= 1.0:
        raise UnstableStationError(load, station)
    wait = arrival_rate * moments.m2 / (2.0 * (1.0 - load))
    return StationEvaluation(arrival_rate, load, wait)


def station_or_unstable(arrival_rate: float, moments: ServiceMoments | None, station: str):
    """Evaluate a station, mapping instability to an infinite wait.

    Returns ``(evaluation, reason)`` where ``reason`` is ``None`` for a stable
    station. ``moments=None`` means the station receives no traffic.
    """
    if moments is None or arrival_rate == 0.0:
        return IDLE_STATION, None
    try:
        return pk_wait(arrival_rate, moments, station), None
    except UnstableStationError as exc:
        load = arrival_rate * moments.m1
        return StationEvaluation(arrival_rate, load, math.inf), str(exc)
