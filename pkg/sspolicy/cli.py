"""Command-line front end.

Results go to standard output, diagnostics to standard error. Exit codes:
0 ok, 1 instance parse error, 2 validation error, 3 numerical failure.
"""
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from .benchmark import factorial_suite, run_suite, summarize
from .config import configure_logging, settings
from .demand import DistributionSpec, build_pmf
from .demand_patterns import PATTERNS
from .errors import InvalidParametersError, SSPolicyError
from .evaluate import run_compare
from .exact import solve_exact
from .instance_file import dump_instance, generate_instance, parse_instance
from .policy import approx_components, run_heuristic, stationary_policy
from .reports import RunArchive, policy_table, render, render_csv, report_rows

logger = logging.getLogger(__name__)


def _archive(args, tables: dict, summary: str) -> None:
    if args.archive:
        RunArchive(args.command, getattr(args, "path", None)).generate(tables, summary)


def command_solve(args) -> str:
    instance = parse_instance(args.path)
    state = run_heuristic(instance, threads=args.threads)
    exact = solve_exact(instance)[0] if args.exact else None
    header, rows = policy_table(state["policy"], state["plan"], exact)
    output = render(header, rows, args.format, args.precision)
    _archive(args, {"policy.csv": render_csv(header, rows, args.precision)},
             f"v_1 = {state['plan'].value(1):.{args.precision}f}; "
             f"cycles {state['plan'].cycles()}")
    return output


def command_compare(args) -> str:
    instance = parse_instance(args.path)
    state = run_compare(instance, x0=args.x0, trials=args.simulate or 0, seed=args.seed,
                        threads=args.threads)
    rows = report_rows(state["report"])
    output = render(["metric", "value"], rows, args.format, args.precision)
    _archive(args, {"comparison.csv": render_csv(["metric", "value"], rows, args.precision)},
             f"gap {state['report'].gap_percent:.4f}%")
    return output


def command_generate(args) -> str:
    document = generate_instance(
        horizon=args.horizon, h=args.holding, p=args.penalty, K=args.fixed_cost, cv=args.cv,
        pattern=args.pattern, means=args.means, mean=args.mean, kind=args.kind,
        noise=args.noise, seed=args.seed, name=args.name)
    text = dump_instance(document)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
        logger.info("📝 Instance written to %s", args.output)
        return ""
    return text


def command_stationary(args) -> str:
    spec = DistributionSpec(kind=args.kind, mean=args.mean, spread=args.spread, cv=args.cv,
                            probabilities=args.probabilities, support_min=args.support_min)
    result = stationary_policy(build_pmf(spec), args.holding, args.penalty, args.fixed_cost,
                               args.max_cycle, strict=not args.allow_unbracketed)
    rows = [["s", result.s], ["S", result.S], ["v", result.average_cost],
            ["cycle_length", result.cycle_length]]
    return render(["metric", "value"], rows, args.format, args.precision)


def command_benchmark(args) -> str:
    suite = factorial_suite(args.horizons, args.cvs, args.fixed_costs, args.penalties,
                            args.patterns, args.kind, args.mean)
    rows = run_suite(suite, threads=args.threads)
    header = ["parameter", "value", "average_gap", "max_gap", "instances"]
    table = [[line[name] for name in header] for line in summarize(rows)]
    output = render(header, table, args.format, args.precision)
    if args.archive:
        detail_header = list(rows[0].model_dump()) if rows else []
        detail = [list(row.model_dump().values()) for row in rows]
        _archive(args, {"summary.csv": render_csv(header, table, 4),
                        "instances.csv": render_csv(detail_header, detail, 4)},
                 f"{len(rows)} instances")
    return output


def command_curves(args) -> str:
    instance = parse_instance(args.path)
    plan = run_heuristic(instance, threads=args.threads)["plan"]
    _, grid = solve_exact(instance)
    levels = grid.levels
    horizon = instance.horizon
    header = ["n", "y", "G", "G_hat"] + [f"component_{a}" for a in range(1, horizon + 1)]
    rows = []
    for n in range(1, horizon + 1):
        components = approx_components(n, levels, plan)
        approx = components.min(axis=0)
        for i, y in enumerate(levels):
            row = [n, int(y), float(grid.G[n - 1, i]), float(approx[i])]
            row += [float(value) for value in components[:, i]]
            row += [""] * (horizon - len(components))
            rows.append(row)
    return render_csv(header, rows, args.precision)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--log-level", default=None, help="Diagnostic verbosity (default from SSPOLICY_LOG_LEVEL)")
    parser.add_argument("--threads", type=int, default=settings.threads, help="Worker threads")
    parser.add_argument("--archive", action="store_true", help="Also write a timestamped run folder")
    parser.add_argument("--format", choices=["table", "csv"], default="table")
    parser.add_argument("--precision", type=int, default=2, help="Decimals for cost columns")


def _add_costs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--holding", type=float, required=True, help="Holding cost h")
    parser.add_argument("--penalty", type=float, required=True, help="Backlog penalty p")
    parser.add_argument("--fixed-cost", type=float, required=True, help="Fixed order cost K")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sspolicy", description="Non-stationary (s, S) inventory policies")
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="Heuristic policy table")
    solve.add_argument("path")
    solve.add_argument("--exact", action="store_true", help="Add the optimal policy columns")
    solve.set_defaults(handler=command_solve)

    compare = commands.add_parser("compare", help="Heuristic cost against the optimum")
    compare.add_argument("path")
    compare.add_argument("--x0", type=int, default=None, help="Initial inventory")
    compare.add_argument("--simulate", type=int, default=0, metavar="N", help="Monte Carlo trials")
    compare.add_argument("--seed", type=int, default=0)
    compare.set_defaults(handler=command_compare)

    generate = commands.add_parser("generate", help="Write an instance file")
    generate.add_argument("--horizon", type=int, required=True)
    shape = generate.add_mutually_exclusive_group(required=True)
    shape.add_argument("--pattern", choices=PATTERNS)
    shape.add_argument("--means", type=float, nargs="+")
    generate.add_argument("--mean", type=float, default=100.0, help="Horizon-average demand")
    generate.add_argument("--cv", type=float, required=True)
    generate.add_argument("--kind", choices=["normal-discretized", "negative-binomial"],
                          default="normal-discretized")
    generate.add_argument("--noise", type=float, default=0.0)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--name", default=None)
    generate.add_argument("--output", "-o", default=None)
    _add_costs(generate)
    generate.set_defaults(handler=command_generate)

    stationary = commands.add_parser("stationary", help="Stationary cycle-length policy")
    stationary.add_argument("--kind", required=True)
    stationary.add_argument("--mean", type=float, default=None)
    stationary.add_argument("--spread", type=int, default=None)
    stationary.add_argument("--cv", type=float, default=None)
    stationary.add_argument("--probabilities", type=float, nargs="+", default=None)
    stationary.add_argument("--support-min", type=int, default=0)
    stationary.add_argument("--max-cycle", type=int, default=20)
    stationary.add_argument("--allow-unbracketed", action="store_true",
                            help="Warn instead of failing when the cycle cap binds")
    _add_costs(stationary)
    stationary.set_defaults(handler=command_stationary)

    bench = commands.add_parser("benchmark", help="Factorial gap study")
    bench.add_argument("--horizons", type=int, nargs="+", default=[12, 24])
    bench.add_argument("--cvs", type=float, nargs="+", default=[0.1, 0.3])
    bench.add_argument("--fixed-costs", type=float, nargs="+", default=[100.0, 800.0])
    bench.add_argument("--penalties", type=float, nargs="+", default=[5.0, 10.0])
    bench.add_argument("--patterns", nargs="+", choices=PATTERNS, default=["seasonal", "trend"])
    bench.add_argument("--kind", choices=["normal-discretized", "negative-binomial"],
                       default="normal-discretized")
    bench.add_argument("--mean", type=float, default=100.0)
    bench.set_defaults(handler=command_benchmark)

    curves = commands.add_parser("curves", help="CSV of exact and approximate cost curves")
    curves.add_argument("path")
    curves.set_defaults(handler=command_curves)

    for sub in (solve, compare, generate, stationary, bench, curves):
        _add_common(sub)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        output = args.handler(args)
    except SSPolicyError as error:
        print(f"❌ {type(error).__name__}: {error}", file=sys.stderr)
        return error.exit_code
    except ValidationError as error:
        # command-line values rejected by a model
        print(f"❌ {InvalidParametersError.__name__}: {error}", file=sys.stderr)
        return InvalidParametersError.exit_code
    if output:
        sys.stdout.write(output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
