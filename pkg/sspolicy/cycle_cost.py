"""Expected cost of one replenishment cycle.

A cycle starts in period ``n`` with inventory raised to ``y`` and covers ``a``
periods without a further order. Its expected holding and backlog cost is

    L_na(y) = sum_{k=1..a} h * E(y - xi_nk)^+ + p * E(y - xi_nk)^-

where ``xi_nk`` is the accumulated demand of periods n..n+k-1. ``L_na`` is
convex in ``y``; its minimizer is the smallest level at which the averaged CDF
of the accumulated demands reaches the critical fractile p / (h + p).
"""
import logging
from functools import cached_property
from typing import Dict, Tuple

from pydantic import BaseModel, ConfigDict

from .demand import DemandModel
from .errors import WindowError

logger = logging.getLogger(__name__)


class MinimizerResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    y_star: int
    cost_at_min: float


class CycleCostFn:
    """Immutable view of ``L_na`` over a frozen demand model."""

    def __init__(self, model: DemandModel, n: int, a: int, h: float, p: float, K: float,
                 mass_tol: float = 1e-12):
        if n < 1 or a < 1 or n + a - 1 > model.horizon:
            raise WindowError(
                f"cycle (n={n}, a={a}) runs past the horizon T={model.horizon}")
        self.model = model
        self.n, self.a = n, a
        self.h, self.p, self.K = h, p, K
        self.mass_tol = mass_tol
        self._cdfs = [model.accumulated_cdf(n, k) for k in range(1, a + 1)]

    @property
    def support_min(self) -> int:
        return self._cdfs[0].support_min

    @property
    def support_max(self) -> int:
        return self._cdfs[-1].support_max

    def eval(self, y):
        total = 0.0
        for cdf in self._cdfs:
            total = total + self.h * cdf.expected_overage(y) + self.p * cdf.expected_shortage(y)
        return total

    def averaged_cdf(self, y):
        return sum(cdf(y) for cdf in self._cdfs) / self.a

    def derivative(self, y):
        """Right difference L(y + 1) - L(y) on the integer grid."""
        return -self.a * self.p + (self.h + self.p) * self.a * self.averaged_cdf(y)

    @cached_property
    def _minimum(self) -> MinimizerResult:
        target = self.p / (self.h + self.p) - self.mass_tol
        # averaged CDF is 0 at lo and 1 at hi
        lo, hi = self.support_min - 1, self.support_max
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.averaged_cdf(mid) >= target:
                hi = mid
            else:
                lo = mid
        logger.debug("cycle (n=%d, a=%d) minimized at y=%d", self.n, self.a, hi)
        return MinimizerResult(y_star=hi, cost_at_min=float(self.eval(hi)))

    def minimize(self) -> MinimizerResult:
        return self._minimum

    def cycle_value(self) -> float:
        """K plus the minimal expected cost of the cycle."""
        return self.K + self._minimum.cost_at_min

    def __repr__(self) -> str:
        return f"CycleCostFn(n={self.n}, a={self.a})"


class CycleCosts:
    """Memo table of cycle cost functions for one instance, keyed by (n, a)."""

    def __init__(self, instance):
        self.instance = instance
        self._functions: Dict[Tuple[int, int], CycleCostFn] = {}

    def function(self, n: int, a: int) -> CycleCostFn:
        fn = self._functions.get((n, a))
        if fn is None:
            inst = self.instance
            fn = self._functions.setdefault(
                (n, a),
                CycleCostFn(inst.demand, n, a, inst.h, inst.p, inst.K, inst.tolerances.mass))
        return fn

    def minimizer(self, n: int, a: int) -> MinimizerResult:
        return self.function(n, a).minimize()

    def value(self, n: int, a: int) -> float:
        return self.function(n, a).cycle_value()

    def evaluated(self) -> int:
        return len(self._functions)
