"""Bounded Pareto job sizes on [1, r].

The density is ``alpha * x**(-alpha-1) / (1 - r**-alpha)`` on ``[1, r]``.
All normalizing constants are evaluated through ``expm1``/``log`` so that
small ``|alpha * ln r|`` and moment orders close to ``alpha`` stay accurate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# |k - alpha| at or below this uses the logarithmic moment formula
SINGULAR_TOL = 1e-9


def _one_minus_pow(base_log: float, alpha: float) -> float:
    """Return ``1 - exp(-alpha * base_log)`` without cancellation."""
    return -math.expm1(-alpha * base_log)


def _log_branch(a, e, log_ratio):
    """``a**e * expm1(e L) / e`` expanded around ``e = 0``; equals ``L`` at ``e = 0``."""
    t = e * log_ratio
    return a**e * log_ratio * (1.0 + t / 2.0 + t * t / 6.0)


@dataclass(frozen=True)
class BoundedPareto:
    """Bounded Pareto distribution with support ``[1, r]`` and tail ``alpha``."""

    alpha: float
    r: float

    def __post_init__(self):
        a, r = float(self.alpha), float(self.r)
        if not math.isfinite(a) or a == 0.0:
            raise DomainError(f"alpha must be finite and nonzero, got {self.alpha!r}")
        if not (math.isfinite(r) and r > 1.0):
            raise DomainError(f"r must be finite and > 1, got {self.r!r}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "r", r)

    @property
    def _log_r(self) -> float:
        return math.log(self.r)

    @property
    def norm(self) -> float:
        """Density constant ``alpha / (1 - r**-alpha)``; positive for every valid alpha."""
        return self.alpha / _one_minus_pow(self._log_r, self.alpha)

    def pdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        inside = (x_arr >= 1.0) & (x_arr <= self.r)
        safe = np.where(inside, x_arr, 1.0)
        out = np.where(inside, self.norm * safe ** (-self.alpha - 1.0), 0.0)
        return float(out) if out.ndim == 0 else out

    def cdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        clipped = np.clip(x_arr, 1.0, self.r)
        # (1 - x^-a) / (1 - r^-a), both factors via expm1
        num = -np.expm1(-self.alpha * np.log(clipped))
        out = num / _one_minus_pow(self._log_r, self.alpha)
        out = np.where(x_arr <= 1.0, 0.0, np.where(x_arr >= self.r, 1.0, out))
        return float(out) if out.ndim == 0 else out

    def quantile(self, u):
        """Inverse CDF; ``u`` may be a scalar or an array in ``[0, 1]``."""
        u_arr = np.asarray(u, dtype=float)
        if np.any((u_arr < 0.0) | (u_arr > 1.0)) or np.any(np.isnan(u_arr)):
            raise DomainError("quantile level must lie in [0, 1]")
        mass = _one_minus_pow(self._log_r, self.alpha)
        with np.errstate(divide="ignore"):  # u = 1 with mass rounding to 1; replaced below
            log_x = -np.log1p(-u_arr * mass) / self.alpha
        out = np.where(u_arr == 1.0, self.r, np.clip(np.exp(log_x), 1.0, self.r))
        return float(out) if out.ndim == 0 else out

    def partial_moment(self, k: float, a: float, b: float) -> float:
        """Return the integral of ``x**k * pdf(x)`` over ``[a, b]``."""
        if not (1.0 <= a <= b <= self.r):
            raise DomainError(f"need 1 <= a <= b <= r, got a={a!r}, b={b!r}, r={self.r!r}")
        if a == b:
            return 0.0
        e = k - self.alpha
        log_ratio = math.log(b / a)
        if abs(e) <= SINGULAR_TOL:
            return self.norm * _log_branch(a, e, log_ratio)
        # a^e * (exp(e ln(b/a)) - 1) / e, finite as e -> 0
        return self.norm * a**e * math.expm1(e * log_ratio) / e

    def partial_moments(self, k: float, a, b) -> np.ndarray:
        """Vectorized ``partial_moment`` over arrays of interval endpoints."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if np.any(a < 1.0) or np.any(b > self.r) or np.any(a > b):
            raise DomainError("need 1 <= a <= b <= r elementwise")
        e = k - self.alpha
        log_ratio = np.log(b / a)
        if abs(e) <= SINGULAR_TOL:
            return self.norm * _log_branch(a, e, log_ratio)
        return self.norm * a**e * np.expm1(e * log_ratio) / e

    def survivals(self, s) -> np.ndarray:
        """Vectorized ``survival``."""
        s = np.asarray(s, dtype=float)
        clipped = np.clip(s, 1.0, self.r)
        la = self.alpha
        num = np.expm1(-la * np.log(clipped)) - math.expm1(-la * self._log_r)
        out = num / _one_minus_pow(self._log_r, la)
        return np.where(s <= 1.0, 1.0, np.where(s >= self.r, 0.0, out))

    def mean(self) -> float:
        return self.partial_moment(1.0, 1.0, self.r)

    def survival(self, s: float) -> float:
        """Probability that a job exceeds ``s``."""
        if s <= 1.0:
            return 1.0
        if s >= self.r:
            return 0.0
        # (x^-a - r^-a) / (1 - r^-a) computed as a difference of expm1 terms
        la = self.alpha
        num = math.expm1(-la * math.log(s)) - math.expm1(-la * self._log_r)
        return num / _one_minus_pow(self._log_r, la)
