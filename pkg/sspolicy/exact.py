"""Optimal (s, S) policy by backward stochastic dynamic programming.

    G_n(y) = L_n(y) + E C_{n+1}(y - xi_n)
    C_n(x) = min( G_n(x), K + min_{y >= x} G_n(y) ),   C_{T+1} = 0

on a bounded integer grid. Below the grid ``C_{n+1}`` is flat (the ordering
region), so expectations reaching under ``grid_min`` reuse its lowest value.
The grid grows by doubling whenever a minimum or re-order level touches its edge.
"""
import logging
from typing import Iterable, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from .cycle_cost import CycleCostFn
from .demand import Pmf
from .errors import GridTooSmallError, WindowError
from .instance import Instance
from .policy import Policy

logger = logging.getLogger(__name__)


class ValueGrid(BaseModel):
    """Cost functions tabulated on ``grid_min..grid_max``; row ``n - 1`` belongs to period n."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid_min: int
    grid_max: int
    C: np.ndarray
    G: np.ndarray

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.grid_min, self.grid_max + 1)

    def index(self, x: int) -> int:
        if not self.grid_min <= x <= self.grid_max:
            raise WindowError(
                f"inventory level {x} lies outside the grid [{self.grid_min}, {self.grid_max}]")
        return int(x - self.grid_min)

    def cost_to_go(self, n: int, x: int) -> float:
        return float(self.C[n - 1, self.index(x)])

    def g(self, n: int, y: int) -> float:
        return float(self.G[n - 1, self.index(y)])


class _BoundaryHit(Exception):
    def __init__(self, low: bool, high: bool):
        self.low, self.high = low, high


def grid_bounds(instance: Instance) -> Tuple[int, int]:
    model = instance.demand
    pad = max(model.max_period_support, 1)
    return -2 * pad, model.total_support_max + pad


def single_period_cost(instance: Instance, n: int, levels: np.ndarray) -> np.ndarray:
    fn = CycleCostFn(instance.demand, n, 1, instance.h, instance.p, instance.K,
                     instance.tolerances.mass)
    return np.asarray(fn.eval(levels), dtype=np.float64)


def expected_next(values: np.ndarray, pmf: Pmf) -> np.ndarray:
    """E f(y - xi) for every grid level y, with f flat at ``values[0]`` below the grid."""
    width = pmf.support_max
    kernel = np.zeros(width + 1)
    kernel[pmf.support_min:] = pmf.probabilities
    extended = np.concatenate([np.full(width, values[0]), values])
    return np.convolve(extended, kernel, mode="valid")


def _backward_pass(instance: Instance, lo: int, hi: int) -> Tuple[Policy, ValueGrid]:
    horizon, K = instance.horizon, instance.K
    tol = instance.tolerances.cost
    levels = np.arange(lo, hi + 1)
    width = len(levels)
    C = np.zeros((horizon + 1, width))
    G = np.empty((horizon, width))
    s, S, g_at_S = [0] * horizon, [0] * horizon, [0.0] * horizon
    for n in range(horizon, 0, -1):
        g = single_period_cost(instance, n, levels) + expected_next(
            C[n], instance.demand.periods[n - 1])
        i_S = int(np.argmin(g))
        i_s = int(np.argmax(g <= g[i_S] + K + tol))
        if i_S == 0 or i_s == 0 or i_S == width - 1:
            raise _BoundaryHit(low=i_S == 0 or i_s == 0, high=i_S == width - 1)
        G[n - 1] = g
        s[n - 1], S[n - 1], g_at_S[n - 1] = lo + i_s, lo + i_S, float(g[i_S])
        best_above = np.minimum.accumulate(g[::-1])[::-1]
        C[n - 1] = np.minimum(g, K + best_above)
    C.setflags(write=False)
    G.setflags(write=False)
    grid = ValueGrid(grid_min=lo, grid_max=hi, C=C, G=G)
    return Policy(s=s, S=S, g_at_S=g_at_S, source="exact"), grid


def solve_exact(instance: Instance, cover: Iterable[int] = ()) -> Tuple[Policy, ValueGrid]:
    """Optimal policy and cost tables; ``cover`` lists levels the grid must contain."""
    lo, hi = grid_bounds(instance)
    for level in cover:
        lo, hi = min(lo, level - 1), max(hi, level)
    for _ in range(instance.tolerances.max_grid_doublings + 1):
        try:
            policy, grid = _backward_pass(instance, lo, hi)
        except _BoundaryHit as hit:
            span = hi - lo
            lo = lo - span if hit.low else lo
            hi = hi + span if hit.high else hi
            logger.info("🔁 Grid extended to [%d, %d]", lo, hi)
            continue
        for n in range(1, instance.horizon + 1):
            violations = k_convexity_violations(grid, instance.K, n)
            if violations:
                logger.warning("⚠️ Period %d: %d sampled K-convexity violations", n, violations)
        logger.info("✅ Exact DP solved on [%d, %d]: C_1(0)=%s", lo, hi,
                    f"{grid.cost_to_go(1, 0):.4f}" if lo <= 0 <= hi else "n/a")
        return policy, grid
    raise GridTooSmallError(
        f"cost minimum still on the grid boundary after "
        f"{instance.tolerances.max_grid_doublings} extensions")


def expected_total_cost(grid: ValueGrid, x0: int) -> float:
    return grid.cost_to_go(1, x0)


def k_convexity_violations(grid: ValueGrid, K: float, n: int, samples: int = 64,
                           seed: int = 0, tol: float = 1e-7) -> int:
    """Count sampled (y, b) with K + G(y + b) < G(y) + b * (G(y) - G(y - 1))."""
    g = grid.G[n - 1]
    if len(g) < 3:
        return 0
    rng = np.random.default_rng(seed)
    y = rng.integers(1, len(g) - 1, size=samples)
    b = rng.integers(1, len(g) - 1, size=samples)
    keep = y + b < len(g)
    y, b = y[keep], b[keep]
    slack = tol * max(1.0, float(np.abs(g).max()))
    return int(np.sum(K + g[y + b] < g[y] + b * (g[y] - g[y - 1]) - slack))
