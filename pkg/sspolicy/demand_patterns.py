"""Built-in mean-demand shapes, each scaled so its horizon average equals ``base``."""
from typing import Literal

import numpy as np

PatternName = Literal["constant", "trend", "seasonal", "life-cycle"]
PATTERNS = ("constant", "trend", "seasonal", "life-cycle")


def _shape(name: str, horizon: int, season: int) -> np.ndarray:
    t = np.arange(horizon, dtype=np.float64)
    if name == "constant" or horizon == 1:
        return np.ones(horizon)
    if name == "trend":
        return np.linspace(0.5, 1.5, horizon)
    if name == "seasonal":
        return 1.0 + 0.5 * np.sin(2.0 * np.pi * t / season)
    if name == "life-cycle":
        last = horizon - 1
        # growth, plateau, decline
        return np.interp(t, [0.0, last / 3.0, 2.0 * last / 3.0, last], [0.2, 1.0, 1.0, 0.3])
    raise ValueError(f"unknown pattern {name!r}; choose from {', '.join(PATTERNS)}")


def mean_pattern(name: str, horizon: int, base: float = 100.0, noise: float = 0.0,
                 seed: int = 0, season: int = 12) -> np.ndarray:
    """Per-period means. ``noise`` applies a seeded multiplicative jitter in [1 - noise, 1 + noise]."""
    shape = _shape(name, horizon, season)
    means = base * shape / shape.mean()
    if noise:
        rng = np.random.default_rng(seed)
        means = means * (1.0 + noise * rng.uniform(-1.0, 1.0, horizon))
    return np.round(means, 4)
