from pathlib import Path

import numpy as np
import pytest

from sspolicy.demand import DistributionSpec
from sspolicy.instance import Instance

DOCS = Path(__file__).resolve().parent.parent / "docs"

KINDS = ("uniform-discrete", "normal-discretized", "negative-binomial", "explicit-pmf")


def uniform_instance(means, spread=10, h=1.0, p=10.0, K=100.0, **extra):
    specs = [DistributionSpec(kind="uniform-discrete", mean=m, spread=spread) for m in means]
    return Instance.from_specs(specs, h, p, K, **extra)


def random_spec(rng: np.random.Generator) -> DistributionSpec:
    kind = KINDS[int(rng.integers(len(KINDS)))]
    if kind == "uniform-discrete":
        mean = int(rng.integers(2, 16))
        return DistributionSpec(kind=kind, mean=mean, spread=int(rng.integers(0, min(mean, 6) + 1)))
    if kind == "normal-discretized":
        return DistributionSpec(kind=kind, mean=float(rng.integers(2, 16)),
                                cv=float(rng.uniform(0.1, 0.5)))
    if kind == "negative-binomial":
        return DistributionSpec(kind=kind, mean=float(rng.integers(3, 11)),
                                cv=float(rng.uniform(0.6, 0.8)))
    width = int(rng.integers(1, 8))
    return DistributionSpec(kind=kind, probabilities=rng.dirichlet(np.ones(width)).tolist(),
                            support_min=int(rng.integers(0, 10)))


def random_instance(rng: np.random.Generator, max_horizon: int = 8) -> Instance:
    horizon = int(rng.integers(1, max_horizon + 1))
    specs = [random_spec(rng) for _ in range(horizon)]
    K = 0.0 if rng.random() < 0.1 else float(rng.uniform(0.0, 150.0))
    return Instance.from_specs(specs, h=float(rng.uniform(0.5, 2.0)),
                               p=float(rng.uniform(2.0, 20.0)), K=K)


@pytest.fixture(scope="session")
def example_instance() -> Instance:
    """Four periods, uniform demand around 60, 15, 30 and 40, h=1, p=10, K=100."""
    return uniform_instance([60, 15, 30, 40])


@pytest.fixture(scope="session")
def example_path() -> Path:
    return DOCS / "example_instance.yaml"


@pytest.fixture(scope="session")
def random_suite():
    rng = np.random.default_rng(20240601)
    return [random_instance(rng) for _ in range(100)]


@pytest.fixture(scope="session")
def make_uniform_instance():
    return uniform_instance


@pytest.fixture(scope="session")
def make_random_instance():
    return random_instance
