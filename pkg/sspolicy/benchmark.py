"""Full-factorial test bed: heuristic cost against the exact optimum, summarized per parameter."""
import itertools
import logging
import time
from typing import Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from .demand import DistributionSpec
from .demand_patterns import mean_pattern
from .evaluate import EvalReport, evaluate_policy
from .exact import expected_total_cost, solve_exact
from .instance import Instance
from .policy import heuristic_policy

logger = logging.getLogger(__name__)

PIVOTS = ("pattern", "horizon", "cv", "K", "p")


class BenchmarkRow(BaseModel):
    pattern: str
    horizon: int
    cv: float
    K: float
    p: float
    kind: str
    heuristic_cost: float
    optimal_cost: float
    gap_percent: float
    seconds: float = Field(description="Wall time of heuristic, exact solve and evaluation")


def factorial_suite(horizons: Sequence[int] = (12, 24), cvs: Sequence[float] = (0.1, 0.3),
                    fixed_costs: Sequence[float] = (100.0, 800.0),
                    penalties: Sequence[float] = (5.0, 10.0),
                    patterns: Sequence[str] = ("seasonal", "trend"),
                    kind: str = "normal-discretized", base_mean: float = 100.0,
                    h: float = 1.0) -> List[Tuple[Dict, Instance]]:
    suite = []
    for pattern, horizon, cv, K, p in itertools.product(patterns, horizons, cvs,
                                                        fixed_costs, penalties):
        means = mean_pattern(pattern, horizon, base_mean)
        specs = [DistributionSpec(kind=kind, mean=float(m), cv=cv) for m in means]
        labels = {"pattern": pattern, "horizon": horizon, "cv": cv, "K": K, "p": p, "kind": kind}
        suite.append((labels, Instance.from_specs(specs, h, p, K)))
    logger.info("🧪 Factorial suite with %d instances", len(suite))
    return suite


def run_suite(suite: Sequence[Tuple[Dict, Instance]], x0: int = 0,
              threads: int = None) -> List[BenchmarkRow]:
    rows = []
    for labels, instance in suite:
        started = time.perf_counter()
        heuristic = heuristic_policy(instance, threads=threads)
        _, grid = solve_exact(instance, cover=(x0,))
        report = EvalReport.from_costs(evaluate_policy(instance, heuristic, x0),
                                       expected_total_cost(grid, x0))
        row = BenchmarkRow(**labels, heuristic_cost=report.expected_cost,
                           optimal_cost=report.optimal_cost, gap_percent=report.gap_percent,
                           seconds=time.perf_counter() - started)
        logger.info("📊 %s T=%d cv=%g K=%g p=%g: gap %.3f%%", row.pattern, row.horizon,
                    row.cv, row.K, row.p, row.gap_percent)
        rows.append(row)
    return rows


def summarize(rows: Sequence[BenchmarkRow]) -> List[Dict]:
    """Average and maximum gap for every value of every pivot, then all instances."""
    summary = []
    for pivot in PIVOTS:
        for value in sorted({getattr(row, pivot) for row in rows}):
            gaps = np.array([row.gap_percent for row in rows if getattr(row, pivot) == value])
            summary.append({"parameter": pivot, "value": value,
                            "average_gap": float(gaps.mean()), "max_gap": float(gaps.max()),
                            "instances": len(gaps)})
    gaps = np.array([row.gap_percent for row in rows])
    summary.append({"parameter": "All instances", "value": "",
                    "average_gap": float(gaps.mean()), "max_gap": float(gaps.max()),
                    "instances": len(gaps)})
    return summary
