"""Heuristic (s, S) policy built on the shortest-path cycle plan.

The approximate cost of starting period ``n`` at level ``y`` is
``G_hat_n(y) = min_a { L_na(y) + v_{n+a} }``. The order-up-to level is the
minimizer of the chosen cycle, and the re-order level is the smallest ``y``
whose approximate cost stays within ``K`` of the minimum ``v_n - K``.

The per-period computations run as a LangGraph fan-out, one worker per period.
"""
import logging
import operator
from typing import Annotated, List, Literal, Optional, TypedDict

import numpy as np
from langgraph.graph import END, START, StateGraph
from langgraph.types import Send
from pydantic import BaseModel, ConfigDict, Field

from .config import Tolerances, settings
from .cycle_cost import CycleCostFn, CycleCosts
from .demand import DemandModel, Pmf
from .errors import CycleNotBracketedError, InvalidParametersError, NumericalError
from .instance import Instance
from .plan import CyclePlan, solve

logger = logging.getLogger(__name__)


class Policy(BaseModel):
    model_config = ConfigDict(frozen=True)

    s: List[int] = Field(description="Re-order level per period")
    S: List[int] = Field(description="Order-up-to level per period")
    g_at_S: List[float] = Field(description="Period cost function evaluated at S")
    source: Literal["heuristic", "exact"]

    @property
    def horizon(self) -> int:
        return len(self.S)


class StationaryPolicy(BaseModel):
    model_config = ConfigDict(frozen=True)

    s: int
    S: int
    average_cost: float = Field(description="Cost per period of the best cycle length")
    cycle_length: int
    bracketed: bool = Field(description="False when the cost ratio was still falling at max_cycle")


def approx_components(n: int, y, plan: CyclePlan) -> np.ndarray:
    """Rows ``L_na(y) + v_{n+a}`` for a = 1..T-n+1."""
    costs = plan.costs
    rows = [costs.function(n, a).eval(y) + plan.value(n + a)
            for a in range(1, plan.horizon - n + 2)]
    return np.array(rows, dtype=np.float64)


def approx_g(n: int, y, plan: CyclePlan):
    best = np.min(approx_components(n, y, plan), axis=0)
    return float(best) if np.ndim(best) == 0 else best


def order_up_to(n: int, plan: CyclePlan) -> int:
    return plan.costs.minimizer(n, plan.cycle_length(n)).y_star


def _lowest_level_within(fn: CycleCostFn, offset: float, threshold: float) -> Optional[int]:
    """Smallest y with fn(y) + offset <= threshold, or None if no level qualifies."""
    minimum = fn.minimize()
    if minimum.cost_at_min + offset > threshold:
        return None
    hi = minimum.y_star
    step = max(fn.support_max - fn.support_min, 1)
    lo = hi - step
    while fn.eval(lo) + offset <= threshold:
        step *= 2
        lo = hi - step
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fn.eval(mid) + offset <= threshold:
            hi = mid
        else:
            lo = mid
    return hi


def reorder_level(n: int, plan: CyclePlan, restricted: bool = True) -> int:
    """Smallest y with ``G_hat_n(y) <= v_n``.

    Only cycle lengths up to ``a_n`` can contribute the minimum; pass
    ``restricted=False`` to scan every feasible length instead.
    """
    costs = plan.costs
    threshold = plan.value(n) + costs.instance.tolerances.cost
    last = plan.cycle_length(n) if restricted else plan.horizon - n + 1
    candidates = []
    for a in range(1, last + 1):
        level = _lowest_level_within(costs.function(n, a), plan.value(n + a), threshold)
        if level is not None:
            candidates.append(level)
    return min(candidates)


class HeuristicState(TypedDict):
    instance: Instance
    costs: CycleCosts
    plan: CyclePlan
    period_results: Annotated[List[dict], operator.add]
    policy: Policy


class PeriodState(TypedDict):
    n: int
    plan: CyclePlan


def cycle_costs_step(state: HeuristicState) -> dict:
    instance = state["instance"]
    logger.info("📐 Preparing cycle cost functions for %d periods", instance.horizon)
    return {"costs": CycleCosts(instance)}


def shortest_path_step(state: HeuristicState) -> dict:
    return {"plan": solve(state["instance"], costs=state["costs"])}


def dispatch_periods(state: HeuristicState):
    plan = state["plan"]
    return [Send("period", {"n": n, "plan": plan}) for n in range(1, plan.horizon + 1)]


def period_step(state: PeriodState) -> dict:
    n, plan = state["n"], state["plan"]
    S = order_up_to(n, plan)
    s = reorder_level(n, plan)
    g = approx_g(n, S, plan)
    logger.debug("📦 Period %d: s=%d S=%d G_hat(S)=%.4f", n, s, S, g)
    return {"period_results": [{"n": n, "s": s, "S": S, "g_at_S": g}]}


def assemble_step(state: HeuristicState) -> dict:
    rows = sorted(state["period_results"], key=lambda row: row["n"])
    policy = Policy(s=[row["s"] for row in rows], S=[row["S"] for row in rows],
                    g_at_S=[row["g_at_S"] for row in rows], source="heuristic")
    logger.info("✅ Heuristic policy assembled for %d periods", policy.horizon)
    return {"policy": policy}


builder = StateGraph(HeuristicState)
builder.add_node("cycle_costs", cycle_costs_step)
builder.add_node("shortest_path", shortest_path_step)
builder.add_node("period", period_step)
builder.add_node("assemble", assemble_step)

builder.add_edge(START, "cycle_costs")
builder.add_edge("cycle_costs", "shortest_path")
builder.add_conditional_edges("shortest_path", dispatch_periods, ["period"])
builder.add_edge("period", "assemble")
builder.add_edge("assemble", END)

heuristic_workflow = builder.compile()


def run_heuristic(instance: Instance, threads: int = None) -> dict:
    """Run the workflow and return its final state (plan and policy included)."""
    return heuristic_workflow.invoke(
        {"instance": instance, "period_results": []},
        config={"max_concurrency": threads or settings.threads},
    )


def heuristic_policy(instance: Instance, threads: int = None) -> Policy:
    return run_heuristic(instance, threads)["policy"]


def stationary_policy(pmf: Pmf, h: float, p: float, K: float, max_cycle: int,
                      strict: bool = True, tolerances: Tolerances = None) -> StationaryPolicy:
    """Cycle-length policy for i.i.d. demand: minimize cost per period over a <= max_cycle."""
    if max_cycle < 1:
        raise InvalidParametersError(f"max_cycle must be at least 1, got {max_cycle}")
    tol = tolerances or Tolerances()
    model = DemandModel([pmf] * max_cycle).freeze()
    functions = [CycleCostFn(model, 1, a, h, p, K, tol.mass) for a in range(1, max_cycle + 1)]
    ratios = np.array([fn.cycle_value() / fn.a for fn in functions])
    best = int(np.argmin(ratios))
    average = float(ratios[best])
    level = _lowest_level_within(functions[0], 0.0, average + tol.cost)
    if level is None:
        raise NumericalError(f"no single-period level reaches the average cost {average:.6f}")
    bracketed = max_cycle == 1 or bool(ratios[-1] >= ratios[-2])
    result = StationaryPolicy(s=level, S=functions[best].minimize().y_star,
                              average_cost=average, cycle_length=best + 1,
                              bracketed=bracketed)
    if not bracketed:
        message = (f"cost per period still decreasing at max_cycle={max_cycle}; "
                   f"raise the cap to bracket the best cycle length")
        if strict:
            raise CycleNotBracketedError(message, result=result)
        logger.warning("⚠️ %s", message)
    return result
