"""Shortest-path recursion over replenishment cycles.

``v_n = min_a { l_na + v_{n+a} }`` with ``v_{T+1} = 0`` and ``l_na`` the cycle
value (K plus the minimum of ``L_na``). Cycle lengths beyond the pruning bound
are never examined.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, PrivateAttr

from .cycle_cost import CycleCosts

logger = logging.getLogger(__name__)


class CyclePlan(BaseModel):
    """Values and chosen cycle lengths of the shortest-path recursion.

    Lists are 0-based storage of 1-based periods: ``v[n - 1]`` is ``v_n`` and
    ``v[T]`` is the terminal 0.
    """

    model_config = ConfigDict(frozen=True)

    v: List[float]
    a: List[int]
    a_bar: List[int]
    _costs: Optional[CycleCosts] = PrivateAttr(default=None)

    @property
    def horizon(self) -> int:
        return len(self.a)

    @property
    def costs(self) -> CycleCosts:
        return self._costs

    def value(self, n: int) -> float:
        return self.v[n - 1]

    def cycle_length(self, n: int) -> int:
        return self.a[n - 1]

    def bound(self, n: int) -> int:
        return self.a_bar[n - 1]

    def cycles(self) -> List[Tuple[int, int]]:
        """Cycles (start, length) of the plan's path from period 1."""
        path, n = [], 1
        while n <= self.horizon:
            path.append((n, self.cycle_length(n)))
            n += self.cycle_length(n)
        return path


def prune_bound(costs: CycleCosts, n: int) -> int:
    """Largest cycle length still worth considering from period ``n``.

    Scans a = 2, 3, ... and stops at the first a whose order-up-to level leaves
    a one-period cycle cost above ``l_n1``.
    """
    instance = costs.instance
    single = costs.function(n, 1)
    threshold = single.cycle_value() + instance.tolerances.cost
    bound = 1
    for a in range(2, instance.horizon - n + 2):
        if single.eval(costs.minimizer(n, a).y_star) > threshold:
            break
        bound = a
    return bound


def _backward(costs: CycleCosts, bounds: Sequence[int]) -> CyclePlan:
    instance = costs.instance
    horizon = instance.horizon
    prefer_longest = instance.tolerances.tie_break == "largest"
    v = [0.0] * (horizon + 1)
    chosen = [0] * horizon
    for n in range(horizon, 0, -1):
        best_a, best_v = 0, math.inf
        for a in range(1, bounds[n - 1] + 1):
            candidate = costs.value(n, a) + v[n + a - 1]
            if candidate < best_v or (prefer_longest and candidate <= best_v):
                best_a, best_v = a, candidate
        v[n - 1], chosen[n - 1] = best_v, best_a
        logger.debug("🧭 Period %d: a=%d of %d, v=%.4f", n, best_a, bounds[n - 1], best_v)
    plan = CyclePlan(v=v, a=chosen, a_bar=list(bounds))
    plan._costs = costs
    return plan


def solve(instance, costs: CycleCosts = None) -> CyclePlan:
    costs = costs or CycleCosts(instance)
    bounds = [prune_bound(costs, n) for n in range(1, instance.horizon + 1)]
    plan = _backward(costs, bounds)
    logger.info("🧭 Shortest path solved: v_1=%.4f over %d cycle functions",
                plan.value(1), costs.evaluated())
    return plan


def unpruned_solve(instance, costs: CycleCosts = None) -> CyclePlan:
    """Same recursion with every cycle length allowed; a reference for the pruned plan."""
    costs = costs or CycleCosts(instance)
    bounds = [instance.horizon - n + 1 for n in range(1, instance.horizon + 1)]
    return _backward(costs, bounds)
