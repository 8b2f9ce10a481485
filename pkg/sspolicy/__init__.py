"""Non-stationary (s, S) inventory policies: a recursion-free heuristic and an exact oracle."""
from .config import Tolerances, settings
from .demand import Cdf, DemandModel, DistributionSpec, Pmf, build_pmf
from .errors import SSPolicyError
from .evaluate import EvalReport, compare, evaluate_policy, simulate_policy
from .exact import ValueGrid, expected_total_cost, solve_exact
from .instance import Instance
from .instance_file import parse_instance
from .plan import CyclePlan, solve
from .policy import Policy, StationaryPolicy, heuristic_policy, stationary_policy

__all__ = [
    "Cdf", "CyclePlan", "DemandModel", "DistributionSpec", "EvalReport", "Instance", "Pmf",
    "Policy", "SSPolicyError", "StationaryPolicy", "Tolerances", "ValueGrid", "build_pmf",
    "compare", "evaluate_policy", "expected_total_cost", "heuristic_policy", "parse_instance",
    "settings", "simulate_policy", "solve", "solve_exact", "stationary_policy",
]
