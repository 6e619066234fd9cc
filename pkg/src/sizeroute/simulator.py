"""Seeded simulation of the two-server SITA and TAGS systems.

Both topologies are feed-forward, so every queue is advanced with the
Lindley recursion ``W[n+1] = max(0, W[n] + S[n] - A[n])`` instead of an event
calendar. The recursion is evaluated block by block with cumulative sums,
which keeps it vectorized while bounding the floating-point drift.

Random numbers come from numpy's PCG64 generator. The seed feeds a
``SeedSequence`` that spawns two child streams, one for inter-arrival times
and one for job-size uniforms, so SITA and TAGS runs with the same seed see
the same jobs.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import asdict, dataclass, replace
from typing import Protocol

import numpy as np
from scipy import stats

from .distributions import BoundedPareto
from .errors import ConfigError

DEFAULT_BATCHES = 32
CONFIDENCE = 0.95
_BLOCK = 4096


class Policy(str, enum.Enum):
    SITA = "sita"
    TAGS = "tags"


class SizeDistribution(Protocol):
    r: float

    def quantile(self, u): ...


@dataclass(frozen=True)
class SimConfig:
    seed: int
    num_jobs: int
    policy: Policy
    threshold: float
    arrival_rate: float
    dist: BoundedPareto
    warmup_jobs: int | None = None
    batches: int = DEFAULT_BATCHES

    def __post_init__(self):
        try:
            object.__setattr__(self, "policy", Policy(self.policy))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.warmup_jobs is None:
            object.__setattr__(self, "warmup_jobs", self.num_jobs // 10)
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.num_jobs > self.warmup_jobs >= 0:
            raise ConfigError(f"need num_jobs > warmup_jobs >= 0, got {self.num_jobs}, {self.warmup_jobs}")
        if self.batches < 2:
            raise ConfigError(f"need at least 2 batches, got {self.batches}")
        if self.num_jobs - self.warmup_jobs < self.batches:
            raise ConfigError("fewer measured jobs than batches")
        if not 1.0 <= self.threshold <= self.dist.r:
            raise ConfigError(f"threshold must lie in [1, {self.dist.r}], got {self.threshold}")
        if not (self.arrival_rate > 0.0 and math.isfinite(self.arrival_rate)):
            raise ConfigError(f"arrival rate must be positive, got {self.arrival_rate}")


@dataclass(frozen=True)
class SimResult:
    mean_wait: float
    ci_halfwidth: float
    station1_mean_wait: float
    station2_mean_wait: float
    overflow_fraction: float
    jobs_measured: int
    mean_size: float
    station1_ci_halfwidth: float = math.nan
    diverging: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def lindley(service: np.ndarray, gaps: np.ndarray) -> np.ndarray:
    """FCFS waiting times of successive customers, the first finding the queue empty.

    ``gaps[j]`` is the time between arrivals ``j`` and ``j + 1``.
    """
    n = service.size
    w = np.zeros(n)
    if n < 2:
        return w
    drift = service[:-1] - gaps
    start = 0
    while start < n - 1:
        stop = min(start + _BLOCK, n - 1)
        c = np.cumsum(drift[start:stop])
        floor = np.minimum(np.minimum.accumulate(c), -w[start])
        w[start + 1:stop + 1] = c - floor
        start = stop
    return w


def _substream_gaps(gaps: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Inter-arrival times of the jobs at positions ``idx`` of the full stream."""
    if idx.size < 2:
        return np.zeros(0)
    # segment j covers gaps[idx[j]:idx[j+1]]
    return np.add.reduceat(gaps[: idx[-1]], idx[:-1])


def batch_means(values: np.ndarray, batches: int, confidence: float = CONFIDENCE):
    """Return ``(mean, half_width)`` of a Student-t batch-means interval."""
    means = np.array([b.mean() for b in np.array_split(values, batches)])
    half = stats.t.ppf(0.5 + confidence / 2.0, batches - 1) * means.std(ddof=1) / math.sqrt(batches)
    return float(values.mean()), float(half)


def _streams(seed: int):
    arrivals, sizes = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(arrivals)), np.random.Generator(np.random.PCG64(sizes))


def simulate(config: SimConfig) -> SimResult:
    n = config.num_jobs
    lam = config.arrival_rate
    s = config.threshold
    rng_arrivals, rng_sizes = _streams(config.seed)
    # gaps[i] separates arrival i from arrival i + 1
    gaps = rng_arrivals.exponential(1.0 / lam, n - 1)
    sizes = np.asarray(config.dist.quantile(rng_sizes.random(n)), dtype=float)

    if config.policy is Policy.SITA:
        to_second = sizes > s
        idx1 = np.flatnonzero(~to_second)
        idx2 = np.flatnonzero(to_second)
        w1 = lindley(sizes[idx1], _substream_gaps(gaps, idx1))
        w2 = lindley(sizes[idx2], _substream_gaps(gaps, idx2))
        waits = np.empty(n)
        waits[idx1] = w1
        waits[idx2] = w2
        station1 = np.full(n, np.nan)
        station1[idx1] = w1
        loads = (lam * sizes[idx1].sum() / n, lam * sizes[idx2].sum() / n)
    else:
        to_second = sizes > s
        first_service = np.minimum(sizes, s)
        w1 = lindley(first_service, gaps)
        idx2 = np.flatnonzero(to_second)
        # kill epochs are t + w1 + s; FCFS departures from server 1 keep them ordered
        gaps2 = _substream_gaps(gaps, idx2) + np.diff(w1[idx2])
        assert gaps2.size == 0 or gaps2.min() >= -1e-9 * max(1.0, float(np.abs(w1).max())), \
            "overflow job reached server 2 before its kill epoch"
        w2 = lindley(sizes[idx2], np.maximum(gaps2, 0.0))
        waits = w1.copy()
        waits[idx2] += s + w2
        station1 = w1
        loads = (lam * first_service.mean(), lam * sizes[idx2].sum() / n)

    measured = slice(config.warmup_jobs, n)
    second_measured = idx2[idx2 >= config.warmup_jobs]
    w2_measured = w2[idx2 >= config.warmup_jobs]
    mean_wait, half = batch_means(waits[measured], config.batches)
    s1 = station1[measured]
    s1 = s1[~np.isnan(s1)]
    s1_half = batch_means(s1, config.batches)[1] if s1.size >= config.batches else math.nan
    diverging = max(loads) >= 1.0
    if diverging:
        warnings.warn(f"simulated station loads {loads[0]:.4g}, {loads[1]:.4g}; estimates diverge",
                      RuntimeWarning, stacklevel=2)
    return SimResult(
        mean_wait=mean_wait,
        ci_halfwidth=half,
        station1_mean_wait=float(s1.mean()) if s1.size else 0.0,
        station2_mean_wait=float(w2_measured.mean()) if w2_measured.size else 0.0,
        overflow_fraction=second_measured.size / (n - config.warmup_jobs),
        jobs_measured=n - config.warmup_jobs,
        mean_size=float(sizes.mean()),
        diverging=bool(diverging),
        station1_ci_halfwidth=s1_half,
    )


def replication_seed(seed: int, index: int) -> int:
    """Seed of replication ``index``; replication 0 reuses the base seed."""
    if index == 0:
        return seed
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


def replicate(config: SimConfig, replications: int) -> SimResult:
    """Pool independent replications; the interval is taken across replication means."""
    if replications < 1:
        raise ConfigError(f"need at least one replication, got {replications}")
    runs = [simulate(replace(config, seed=replication_seed(config.seed, i)))
            for i in range(replications)]
    if replications == 1:
        return runs[0]
    means = np.array([x.mean_wait for x in runs])
    t = stats.t.ppf(0.5 + CONFIDENCE / 2.0, replications - 1)
    return SimResult(
        mean_wait=float(means.mean()),
        ci_halfwidth=float(t * means.std(ddof=1) / math.sqrt(replications)),
        station1_mean_wait=float(np.mean([x.station1_mean_wait for x in runs])),
        station2_mean_wait=float(np.mean([x.station2_mean_wait for x in runs])),
        overflow_fraction=float(np.mean([x.overflow_fraction for x in runs])),
        jobs_measured=sum(x.jobs_measured for x in runs),
        mean_size=float(np.mean([x.mean_size for x in runs])),
        diverging=any(x.diverging for x in runs),
        station1_ci_halfwidth=float(t * np.std([x.station1_mean_wait for x in runs], ddof=1)
                                    / math.sqrt(replications)),
    )
