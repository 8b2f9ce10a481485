import pytest

from sspolicy.benchmark import BenchmarkRow, factorial_suite, run_suite, summarize


def _row(pattern, K, gap):
    return BenchmarkRow(pattern=pattern, horizon=12, cv=0.1, K=K, p=10.0,
                        kind="normal-discretized", heuristic_cost=100.0 + gap,
                        optimal_cost=100.0, gap_percent=gap, seconds=0.1)


def test_suite_is_full_factorial():
    suite = factorial_suite()
    assert len(suite) == 32
    labels, instance = suite[0]
    assert set(labels) == {"pattern", "horizon", "cv", "K", "p", "kind"}
    assert instance.horizon == labels["horizon"]
    assert instance.h == 1.0


def test_summary_lines():
    rows = [_row("seasonal", 100.0, 0.2), _row("seasonal", 800.0, 1.0), _row("trend", 100.0, 0.6)]
    summary = summarize(rows)
    by_key = {(line["parameter"], line["value"]): line for line in summary}
    assert by_key[("pattern", "seasonal")]["average_gap"] == pytest.approx(0.6)
    assert by_key[("pattern", "seasonal")]["max_gap"] == pytest.approx(1.0)
    assert by_key[("K", 100.0)]["instances"] == 2
    assert summary[-1]["parameter"] == "All instances"
    assert summary[-1]["average_gap"] == pytest.approx(0.6)


def test_small_suite_runs():
    suite = factorial_suite(horizons=(4,), cvs=(0.2,), fixed_costs=(50.0,), penalties=(5.0,),
                            patterns=("trend",), base_mean=10.0)
    rows = run_suite(suite)
    assert len(rows) == 1
    assert rows[0].gap_percent >= -1e-9
    assert rows[0].seconds > 0


@pytest.mark.slow
def test_factorial_gaps():
    rows = run_suite(factorial_suite())
    summary = summarize(rows)
    assert summary[-1]["instances"] == 32
    assert summary[-1]["average_gap"] <= 2.0
    assert summary[-1]["max_gap"] <= 5.0
    assert all(row.gap_percent >= -1e-9 for row in rows)
