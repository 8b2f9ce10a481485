import numpy as np
import pytest

from sspolicy.errors import InstanceParseError, InstanceValidationError, InvalidParametersError
from sspolicy.instance_file import (dump_instance, generate_instance, parse_instance,
                                    parse_text, write_instance)

VALID = """\
schema_version: 1
horizon: 4
h: 1
p: 10
K: 100
demands:
  - {kind: uniform-discrete, mean: 60, spread: 10}
  - {kind: uniform-discrete, mean: 15, spread: 10}
  - {kind: uniform-discrete, mean: 30, spread: 10}
  - {kind: uniform-discrete, mean: 40, spread: 10}
"""


def test_example_file(example_path):
    instance = parse_instance(example_path)
    assert instance.horizon == 4
    assert (instance.h, instance.p, instance.K) == (1.0, 10.0, 100.0)
    assert instance.initial_inventory == 0
    assert [pmf.support_min for pmf in instance.demand.periods] == [50, 5, 20, 30]


def test_zero_penalty_is_rejected_at_its_line():
    with pytest.raises(InstanceValidationError) as caught:
        parse_text(VALID.replace("p: 10", "p: 0"))
    assert caught.value.line == 4
    assert caught.value.exit_code == 2


def test_demand_count_must_match_horizon():
    text = VALID.replace("  - {kind: uniform-discrete, mean: 40, spread: 10}\n", "")
    with pytest.raises(InstanceValidationError) as caught:
        parse_text(text)
    assert caught.value.line == 6


def test_bad_distribution_points_at_demands():
    with pytest.raises(InstanceValidationError) as caught:
        parse_text(VALID.replace("mean: 15, spread: 10", "mean: 15, spread: 20"))
    assert caught.value.line == 6


def test_unknown_key_in_a_demand_entry():
    with pytest.raises(InstanceValidationError) as caught:
        parse_text(VALID.replace("mean: 30, spread: 10", "mean: 30, spred: 10"))
    assert caught.value.line == 9


def test_malformed_yaml():
    with pytest.raises(InstanceParseError) as caught:
        parse_text("horizon: 4\nh: [1, 2\np: 3\n")
    assert caught.value.exit_code == 1
    assert caught.value.line is not None


def test_top_level_must_be_a_mapping():
    with pytest.raises(InstanceParseError):
        parse_text("- 1\n- 2\n")


def test_missing_file(tmp_path):
    with pytest.raises(InstanceParseError):
        parse_instance(tmp_path / "absent.yaml")


def test_generator_block():
    text = """\
horizon: 6
h: 1
p: 5
K: 50
generator:
  pattern: seasonal
  mean: 20
  cv: 0.2
"""
    instance = parse_text(text)
    assert instance.horizon == 6
    assert np.mean([spec.mean for spec in instance.specs]) == pytest.approx(20.0, abs=1e-3)


def test_tolerance_overrides():
    instance = parse_text(VALID + "tolerances:\n  tie_break: largest\n")
    assert instance.tolerances.tie_break == "largest"


class TestGenerate:
    def test_constant_normal(self):
        document = generate_instance(horizon=5, h=1, p=10, K=100, cv=0.1, pattern="constant")
        assert len(document.demands) == 5
        assert all(spec.kind == "normal-discretized" and spec.mean == 100.0
                   for spec in document.demands)

    def test_negative_binomial_variance(self):
        document = generate_instance(horizon=3, h=1, p=10, K=100, cv=0.5, pattern="constant",
                                     kind="negative-binomial")
        assert all(spec.variance == pytest.approx(2500.0) for spec in document.demands)

    def test_seeded_noise_is_deterministic(self):
        first = generate_instance(horizon=12, h=1, p=10, K=100, cv=0.1, pattern="seasonal",
                                  noise=0.2, seed=4)
        second = generate_instance(horizon=12, h=1, p=10, K=100, cv=0.1, pattern="seasonal",
                                   noise=0.2, seed=4)
        assert dump_instance(first) == dump_instance(second)

    @pytest.mark.parametrize("pattern", ["constant", "trend", "seasonal", "life-cycle"])
    def test_patterns_keep_the_average(self, pattern):
        document = generate_instance(horizon=12, h=1, p=10, K=100, cv=0.1, pattern=pattern)
        assert np.mean([spec.mean for spec in document.demands]) == pytest.approx(100, abs=1e-3)

    def test_explicit_means_must_match_horizon(self):
        with pytest.raises(InvalidParametersError):
            generate_instance(horizon=3, h=1, p=10, K=100, cv=0.1, means=[10, 20])

    def test_negative_binomial_without_overdispersion(self):
        with pytest.raises(InvalidParametersError):
            generate_instance(horizon=2, h=1, p=10, K=100, cv=0.05, means=[10, 10],
                              kind="negative-binomial")

    def test_round_trip(self, tmp_path):
        document = generate_instance(horizon=4, h=2, p=8, K=60, cv=0.3, pattern="trend",
                                     name="trend-four")
        path = tmp_path / "trend.yaml"
        write_instance(document, path)
        parsed = parse_instance(path)
        original = document.to_instance()
        assert parsed.name == "trend-four"
        assert (parsed.h, parsed.p, parsed.K) == (2.0, 8.0, 60.0)
        assert parsed.specs == original.specs
        for left, right in zip(parsed.demand.periods, original.demand.periods):
            assert left.support_min == right.support_min
            assert np.array_equal(left.probabilities, right.probabilities)
