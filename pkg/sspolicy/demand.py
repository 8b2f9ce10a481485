"""Per-period demand distributions and CDFs of accumulated demand.

Demand is integer valued. A ``DemandModel`` holds one ``Pmf`` per period and
lazily caches the distribution of every window sum ``xi_n + ... + xi_{n+k-1}``
it is asked for, building ``(n, k)`` from ``(n, k - 1)`` by one convolution.
"""
import logging
import threading
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import stats

from .config import Tolerances
from .errors import InvalidParametersError, WindowError

logger = logging.getLogger(__name__)

DistributionKind = Literal["uniform-discrete",
                           "normal-discretized", "negative-binomial", "explicit-pmf"]

KIND_ALIASES = {
    "uniform": "uniform-discrete",
    "normal": "normal-discretized",
    "nbinom": "negative-binomial",
    "negbin": "negative-binomial",
    "explicit": "explicit-pmf",
}


def _scalar(values):
    return float(values) if np.ndim(values) == 0 else values


class Pmf:
    """Probability mass function on consecutive integers starting at ``support_min``."""

    __slots__ = ("support_min", "probabilities")

    def __init__(self, support_min: int, probabilities, tol: float = 1e-12):
        probs = np.array(probabilities, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise InvalidParametersError(
                "probabilities must be a non-empty flat sequence")
        if int(support_min) != support_min or support_min < 0:
            raise InvalidParametersError(
                f"support must start at a non-negative integer, got {support_min}")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise InvalidParametersError(
                "probabilities must be finite and non-negative")
        total = probs.sum()
        if abs(total - 1.0) > tol:
            raise InvalidParametersError(
                f"probabilities sum to {total!r}, not 1")
        self._assign(int(support_min), probs)

    @classmethod
    def _trusted(cls, support_min: int, probs: np.ndarray) -> "Pmf":
        pmf = cls.__new__(cls)
        pmf._assign(int(support_min), np.asarray(probs, dtype=np.float64))
        return pmf

    def _assign(self, support_min: int, probs: np.ndarray) -> None:
        nonzero = np.flatnonzero(probs)
        lo, hi = (int(nonzero[0]), int(nonzero[-1])) if nonzero.size else (0, 0)
        trimmed = probs[lo:hi + 1].copy()
        trimmed.setflags(write=False)
        self.support_min = support_min + lo
        self.probabilities = trimmed

    @classmethod
    def point(cls, value: int) -> "Pmf":
        return cls(value, [1.0])

    @property
    def support_max(self) -> int:
        return self.support_min + len(self.probabilities) - 1

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.support_min, self.support_max + 1)

    @property
    def mean(self) -> float:
        return float(self.support @ self.probabilities)

    @property
    def variance(self) -> float:
        centred = self.support - self.mean
        return float((centred * centred) @ self.probabilities)

    def cdf(self) -> "Cdf":
        return Cdf(self)

    def __repr__(self) -> str:
        return f"Pmf(support={self.support_min}..{self.support_max}, mean={self.mean:.4f})"


class Cdf:
    """CDF with first-moment prefix sums, so E(y - xi)^+ and E(y - xi)^- cost O(1) per level."""

    __slots__ = ("support_min", "support_max", "mean", "values", "partial_means")

    def __init__(self, pmf: Pmf):
        cumulative = np.minimum(np.cumsum(pmf.probabilities), 1.0)
        cumulative[-1] = 1.0
        partial = np.cumsum(pmf.support * pmf.probabilities)
        cumulative.setflags(write=False)
        partial.setflags(write=False)
        self.support_min = pmf.support_min
        self.support_max = pmf.support_max
        self.values = cumulative
        self.partial_means = partial
        self.mean = float(partial[-1])

    def _lookup(self, table: np.ndarray, y):
        idx = np.floor(np.asarray(y, dtype=np.float64)).astype(np.int64) - self.support_min
        idx = np.clip(idx, -1, len(table) - 1)
        return np.where(idx >= 0, table[np.maximum(idx, 0)], 0.0)

    def __call__(self, y):
        """P(xi <= y); 0 below the support and 1 above it."""
        return _scalar(self._lookup(self.values, y))

    def partial_mean(self, y):
        """E[xi; xi <= y]."""
        return _scalar(self._lookup(self.partial_means, y))

    def expected_overage(self, y):
        """E(y - xi)^+."""
        y = np.asarray(y, dtype=np.float64)
        return _scalar(y * self._lookup(self.values, y) - self._lookup(self.partial_means, y))

    def expected_shortage(self, y):
        """E(y - xi)^-."""
        y = np.asarray(y, dtype=np.float64)
        below = self._lookup(self.values, y)
        return _scalar((self.mean - self._lookup(self.partial_means, y)) - y * (1.0 - below))


def convolve(a: Pmf, b: Pmf) -> Pmf:
    return Pmf._trusted(a.support_min + b.support_min,
                        np.convolve(a.probabilities, b.probabilities))


class DemandModel:
    """Independent per-period demands with a lazily built accumulated-demand cache.

    Periods are numbered 1..T. Cache population is locked, so a frozen model
    can be shared between threads and every public call behaves as a pure read.
    """

    def __init__(self, periods: Sequence[Pmf]):
        if not periods:
            raise InvalidParametersError("a demand model needs at least one period")
        self.periods: Tuple[Pmf, ...] = tuple(periods)
        self._pmfs: Dict[Tuple[int, int], Pmf] = {}
        self._cdfs: Dict[Tuple[int, int], Cdf] = {}
        self._lock = threading.RLock()
        self._frozen = False

    @property
    def horizon(self) -> int:
        return len(self.periods)

    @property
    def frozen(self) -> bool:
        return self._frozen

    def freeze(self) -> "DemandModel":
        if not self._frozen:
            for n in range(1, self.horizon + 1):
                self.accumulated_cdf(n, 1)
            self._frozen = True
        return self

    def _check_window(self, n: int, k: int) -> None:
        if not 1 <= n <= self.horizon or not 1 <= k <= self.horizon - n + 1:
            raise WindowError(
                f"window (n={n}, k={k}) lies outside the horizon T={self.horizon}")

    def accumulated_pmf(self, n: int, k: int) -> Pmf:
        self._check_window(n, k)
        cached = self._pmfs.get((n, k))
        if cached is not None:
            return cached
        with self._lock:
            built = k
            while built > 1 and (n, built) not in self._pmfs:
                built -= 1
            if built == 1:
                self._pmfs.setdefault((n, 1), self.periods[n - 1])
            pmf = self._pmfs[(n, built)]
            for length in range(built + 1, k + 1):
                pmf = convolve(pmf, self.periods[n + length - 2])
                self._pmfs[(n, length)] = pmf
            if k - built:
                logger.debug("🧮 Convolved window n=%d up to k=%d", n, k)
            return self._pmfs[(n, k)]

    def accumulated_cdf(self, n: int, k: int) -> Cdf:
        cached = self._cdfs.get((n, k))
        if cached is not None:
            return cached
        pmf = self.accumulated_pmf(n, k)
        with self._lock:
            return self._cdfs.setdefault((n, k), Cdf(pmf))

    @property
    def max_period_support(self) -> int:
        return max(pmf.support_max for pmf in self.periods)

    @property
    def total_support_max(self) -> int:
        return sum(pmf.support_max for pmf in self.periods)


class DistributionSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: DistributionKind
    mean: Optional[float] = Field(
        default=None, description="Average demand per period")
    spread: Optional[int] = Field(
        default=None, ge=0, description="Half-width of a discrete uniform distribution")
    cv: Optional[float] = Field(
        default=None, ge=0, description="Coefficient of variation")
    probabilities: Optional[List[float]] = Field(
        default=None, description="Explicit masses for consecutive integers")
    support_min: int = Field(
        default=0, ge=0, description="First demand value of an explicit distribution")

    @field_validator("kind", mode="before")
    @classmethod
    def _resolve_alias(cls, value):
        return KIND_ALIASES.get(value, value)

    @model_validator(mode="after")
    def _check_required(self):
        required = {
            "uniform-discrete": ("mean", "spread"),
            "normal-discretized": ("mean", "cv"),
            "negative-binomial": ("mean", "cv"),
            "explicit-pmf": ("probabilities",),
        }[self.kind]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(
                f"{self.kind} demand needs {', '.join(missing)}")
        return self

    @property
    def variance(self) -> float:
        if self.kind == "uniform-discrete":
            return self.spread * (self.spread + 1) / 3.0
        if self.kind == "explicit-pmf":
            return build_pmf(self).variance
        return (self.cv * self.mean) ** 2


def build_pmf(spec: DistributionSpec, tolerances: Tolerances = None) -> Pmf:
    tol = tolerances or Tolerances()
    if spec.kind == "uniform-discrete":
        return _uniform(spec.mean, spec.spread)
    if spec.kind == "normal-discretized":
        return _discretized_normal(spec.mean, spec.cv)
    if spec.kind == "negative-binomial":
        return _negative_binomial(spec.mean, spec.cv, tol.tail)
    probs = np.asarray(spec.probabilities, dtype=np.float64)
    total = probs.sum()
    if np.any(probs < 0) or abs(total - 1.0) > 1e-9:
        raise InvalidParametersError(
            f"explicit probabilities must be non-negative and sum to 1 (got {total!r})")
    return Pmf(spec.support_min, probs / total, tol.mass)


def _uniform(mean: float, spread: int) -> Pmf:
    if mean < 0 or mean != int(mean):
        raise InvalidParametersError(
            f"uniform demand needs a non-negative integer mean, got {mean}")
    if spread > mean:
        raise InvalidParametersError(
            f"spread {spread} exceeds mean {mean}; demand would go negative")
    width = 2 * spread + 1
    return Pmf(int(mean) - spread, np.full(width, 1.0 / width))


def _discretized_normal(mean: float, cv: float) -> Pmf:
    """Unit-step discretization on 0..2*mean, renormalized."""
    if mean <= 0:
        raise InvalidParametersError(
            f"normal demand needs a positive mean, got {mean}")
    sigma = cv * mean
    if sigma == 0:
        return Pmf.point(int(round(mean)))
    upper = int(np.floor(2 * mean))
    edges = np.arange(upper + 2) - 0.5
    # sf differences keep precision in the upper tail
    lower_mass = np.diff(stats.norm.cdf(edges, loc=mean, scale=sigma))
    upper_mass = -np.diff(stats.norm.sf(edges, loc=mean, scale=sigma))
    mass = np.where(np.arange(upper + 1) < mean, lower_mass, upper_mass)
    total = mass.sum()
    if total <= 0:
        raise InvalidParametersError(
            f"normal(mean={mean}, cv={cv}) leaves no mass on 0..{upper}")
    return Pmf._trusted(0, mass / total)


def _negative_binomial(mean: float, cv: float, tail: float) -> Pmf:
    if mean <= 0:
        raise InvalidParametersError(
            f"negative binomial demand needs a positive mean, got {mean}")
    variance = (cv * mean) ** 2
    if variance <= mean:
        raise InvalidParametersError(
            f"negative binomial needs cv**2 * mean > 1 (variance above mean); "
            f"got cv={cv}, mean={mean}")
    success = mean / variance
    size = mean ** 2 / (variance - mean)
    dist = stats.nbinom(size, success)
    upper = int(dist.isf(tail))
    while dist.sf(upper) >= tail:
        upper += 1
    mass = dist.pmf(np.arange(upper + 1))
    return Pmf._trusted(0, mass / mass.sum())
