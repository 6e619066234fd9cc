"""Closed-form TAGS/SITA bounds for alpha = 1 and their numerical check."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .distributions import BoundedPareto
from .errors import DomainError, HypothesisError
from .sita import optimal_sita_cutoff
from .tags import optimal_tags_threshold

# the SITA bound is asymptotic in r; it is asserted only from here on
LEMMA2_MIN_R = 1e3
LEMMA2_SLACK = 0.01


def _require_light_traffic(arrival_rate: float, r: float) -> None:
    if not arrival_rate * r < 1.0:
        raise HypothesisError(f"bound requires lambda*r < 1, got {arrival_rate * r:.6g}")


def tags_lower_bound(arrival_rate: float, r: float) -> float:
    _require_light_traffic(arrival_rate, r)
    return arrival_rate * r


def sita_upper_bound(arrival_rate: float, r: float) -> float:
    _require_light_traffic(arrival_rate, r)
    q = math.sqrt(r)
    return arrival_rate * (q - 1.0) ** 2 / (q * (1.0 - 1.0 / r) ** 2)


def ratio_lower_bound(r: float) -> float:
    """``(sqrt(r) + 1)**2 / sqrt(r)``; independent of the arrival rate."""
    if not r > 1.0:
        raise DomainError(f"r must exceed 1, got {r!r}")
    q = math.sqrt(r)
    return (q + 1.0) ** 2 / q


@dataclass(frozen=True)
class BoundReport:
    r: float
    arrival_rate: float
    tags_lower: float
    sita_upper: float
    ratio_lower: float
    computed_tags: float
    computed_sita: float
    computed_ratio: float
    all_hold: bool
    lemma1_holds: bool
    lemma2_holds: bool
    lemma2_asserted: bool
    ratio_holds: bool
    # lambda*r/2: what the TAGS bound argument yields once its algebra is redone
    tags_lower_corrected: float
    lemma1_corrected_holds: bool

    def as_dict(self) -> dict:
        return asdict(self)


def verify_bounds(d: BoundedPareto, arrival_rate: float) -> BoundReport:
    if d.alpha != 1.0:
        raise HypothesisError(f"bounds are stated for alpha = 1, got {d.alpha}")
    r = d.r
    tags_lo = tags_lower_bound(arrival_rate, r)
    sita_hi = sita_upper_bound(arrival_rate, r)
    ratio_lo = ratio_lower_bound(r)
    w_tags = optimal_tags_threshold(d, arrival_rate).optimal_value
    w_sita = optimal_sita_cutoff(d, arrival_rate).optimal_value
    ratio = w_tags / w_sita
    lemma1 = w_tags > tags_lo
    lemma2 = w_sita <= sita_hi * (1.0 + LEMMA2_SLACK)
    asserted = r >= LEMMA2_MIN_R
    return BoundReport(
        r=r,
        arrival_rate=arrival_rate,
        tags_lower=tags_lo,
        sita_upper=sita_hi,
        ratio_lower=ratio_lo,
        computed_tags=w_tags,
        computed_sita=w_sita,
        computed_ratio=ratio,
        all_hold=lemma1 and (lemma2 or not asserted),
        lemma1_holds=lemma1,
        lemma2_holds=lemma2,
        lemma2_asserted=asserted,
        ratio_holds=ratio >= ratio_lo,
        tags_lower_corrected=tags_lo / 2.0,
        lemma1_corrected_holds=w_tags > tags_lo / 2.0,
    )
