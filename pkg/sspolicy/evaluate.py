"""Exact and simulated cost of a given (s, S) policy, and the heuristic-vs-optimal comparison."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Literal, Optional, Tuple, TypedDict

import numpy as np
from langgraph.graph import END, START, StateGraph
from pydantic import BaseModel, Field

from .config import settings
from .errors import GridTooSmallError, InvalidParametersError, MalformedPolicyError
from .exact import (ValueGrid, expected_next, expected_total_cost, grid_bounds,
                    single_period_cost, solve_exact)
from .instance import Instance
from .policy import Policy, heuristic_policy

logger = logging.getLogger(__name__)


class EvalReport(BaseModel):
    expected_cost: float = Field(description="Exact expected cost of the heuristic policy")
    optimal_cost: Optional[float] = None
    gap_percent: Optional[float] = Field(
        default=None, description="100 * (expected - optimal) / optimal")
    mc_estimate: Optional[float] = None
    mc_stderr: Optional[float] = None

    @classmethod
    def from_costs(cls, expected: float, optimal: float = None, **extra) -> "EvalReport":
        gap = None
        if optimal is not None:
            if optimal > 0:
                gap = 100.0 * (expected - optimal) / optimal
            else:
                gap = 0.0 if math.isclose(expected, optimal, abs_tol=1e-9) else math.inf
        return cls(expected_cost=expected, optimal_cost=optimal, gap_percent=gap, **extra)


def check_policy(policy: Policy, horizon: int) -> None:
    if not len(policy.s) == len(policy.S) == horizon:
        raise MalformedPolicyError(
            f"policy covers {len(policy.S)} periods, instance has {horizon}")
    for n, (s, S) in enumerate(zip(policy.s, policy.S), start=1):
        if s > S:
            raise MalformedPolicyError(f"period {n}: re-order level {s} above order-up-to {S}")


def policy_values(instance: Instance, policy: Policy, grid_min: int = None,
                  grid_max: int = None) -> ValueGrid:
    """Fixed-policy backward pass. ``C`` holds V_n and ``G`` the no-order cost W_n."""
    check_policy(policy, instance.horizon)
    if grid_min is None or grid_max is None:
        lo, hi = grid_bounds(instance)
        lo, hi = min(lo, min(policy.s) - 1), max(hi, max(policy.S))
    else:
        lo, hi = grid_min, grid_max
        if lo >= min(policy.s) or hi < max(policy.S):
            raise GridTooSmallError(
                f"grid [{lo}, {hi}] must reach below every s and up to every S")
    levels = np.arange(lo, hi + 1)
    V = np.zeros((instance.horizon + 1, len(levels)))
    W = np.empty((instance.horizon, len(levels)))
    for n in range(instance.horizon, 0, -1):
        W[n - 1] = single_period_cost(instance, n, levels) + expected_next(
            V[n], instance.demand.periods[n - 1])
        ordering = instance.K + W[n - 1, policy.S[n - 1] - lo]
        V[n - 1] = np.where(levels < policy.s[n - 1], ordering, W[n - 1])
    V.setflags(write=False)
    W.setflags(write=False)
    return ValueGrid(grid_min=lo, grid_max=hi, C=V, G=W)


def evaluate_policy(instance: Instance, policy: Policy, x0: int = 0) -> float:
    check_policy(policy, instance.horizon)
    lo, hi = grid_bounds(instance)
    lo, hi = min(lo, min(policy.s) - 1, x0), max(hi, max(policy.S), x0)
    return policy_values(instance, policy, lo, hi).cost_to_go(1, x0)


def simulate_policy(instance: Instance, policy: Policy, x0: int, trials: int, seed: int,
                    threads: int = None, chunk: int = None) -> Tuple[float, float]:
    """Monte Carlo mean and standard error of the total cost.

    Trials are split into fixed-size chunks, each driven by its own PCG64 stream
    spawned from ``seed``, so results do not depend on the thread count.
    """
    if trials < 1:
        raise InvalidParametersError(f"trials must be at least 1, got {trials}")
    check_policy(policy, instance.horizon)
    chunk = chunk or settings.sim_chunk
    sizes = [chunk] * (trials // chunk) + ([trials % chunk] if trials % chunk else [])
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    tables = [(pmf.support_min, np.cumsum(pmf.probabilities))
              for pmf in instance.demand.periods]
    h, p, K = instance.h, instance.p, instance.K

    def run(size: int, stream: np.random.SeedSequence) -> np.ndarray:
        rng = np.random.Generator(np.random.PCG64(stream))
        inventory = np.full(size, x0, dtype=np.int64)
        cost = np.zeros(size)
        for n, (support_min, cumulative) in enumerate(tables):
            order = inventory < policy.s[n]
            inventory = np.where(order, policy.S[n], inventory)
            cost += K * order
            draws = np.searchsorted(cumulative, rng.random(size), side="right")
            inventory = inventory - (support_min + np.minimum(draws, len(cumulative) - 1))
            cost += h * np.maximum(inventory, 0) + p * np.maximum(-inventory, 0)
        return cost

    with ThreadPoolExecutor(max_workers=threads or settings.threads) as pool:
        totals = np.concatenate(list(pool.map(run, sizes, streams)))
    mean = float(totals.mean())
    stderr = float(totals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    logger.info("🎲 Simulated %d trials: mean=%.4f stderr=%.4f", trials, mean, stderr)
    return mean, stderr


class CompareState(TypedDict):
    instance: Instance
    x0: int
    trials: int
    seed: int
    threads: int
    heuristic: Policy
    optimal: Policy
    grid: ValueGrid
    heuristic_cost: float
    optimal_cost: float
    mc_estimate: float
    mc_stderr: float
    report: EvalReport


def heuristic_step(state: CompareState) -> dict:
    return {"heuristic": heuristic_policy(state["instance"], threads=state["threads"])}


def exact_step(state: CompareState) -> dict:
    optimal, grid = solve_exact(state["instance"], cover=(state["x0"],))
    return {"optimal": optimal, "grid": grid}


def evaluate_step(state: CompareState) -> dict:
    heuristic_cost = evaluate_policy(state["instance"], state["heuristic"], state["x0"])
    optimal_cost = expected_total_cost(state["grid"], state["x0"])
    logger.info("📊 Heuristic %.4f vs optimal %.4f", heuristic_cost, optimal_cost)
    return {"heuristic_cost": heuristic_cost, "optimal_cost": optimal_cost}


def route_after_evaluation(state: CompareState) -> Literal["simulate", "report"]:
    return "simulate" if state.get("trials") else "report"


def simulate_step(state: CompareState) -> dict:
    mean, stderr = simulate_policy(state["instance"], state["heuristic"], state["x0"],
                                   state["trials"], state["seed"], threads=state["threads"])
    return {"mc_estimate": mean, "mc_stderr": stderr}


def report_step(state: CompareState) -> dict:
    report = EvalReport.from_costs(state["heuristic_cost"], state["optimal_cost"],
                                   mc_estimate=state.get("mc_estimate"),
                                   mc_stderr=state.get("mc_stderr"))
    return {"report": report}


builder = StateGraph(CompareState)
builder.add_node("heuristic_agent", heuristic_step)
builder.add_node("exact_agent", exact_step)
builder.add_node("evaluate_agent", evaluate_step)
builder.add_node("simulate_agent", simulate_step)
builder.add_node("report_agent", report_step)

builder.add_edge(START, "heuristic_agent")
builder.add_edge(START, "exact_agent")
builder.add_edge(["heuristic_agent", "exact_agent"], "evaluate_agent")
builder.add_conditional_edges("evaluate_agent", route_after_evaluation,
                              {"simulate": "simulate_agent", "report": "report_agent"})
builder.add_edge("simulate_agent", "report_agent")
builder.add_edge("report_agent", END)

compare_workflow = builder.compile()


def run_compare(instance: Instance, x0: int = None, trials: int = 0, seed: int = 0,
                threads: int = None) -> dict:
    threads = threads or settings.threads
    return compare_workflow.invoke(
        {"instance": instance,
         "x0": instance.initial_inventory if x0 is None else x0,
         "trials": trials, "seed": seed, "threads": threads},
        config={"max_concurrency": threads},
    )


def compare(instance: Instance, x0: int = None, trials: int = 0, seed: int = 0,
            threads: int = None) -> EvalReport:
    return run_compare(instance, x0, trials, seed, threads)["report"]
