"""Seeded random instances for property runs and benchmarks."""
from __future__ import annotations

import numpy as np

from .geometry import BaseClass, EdgeLengthSet, Realization, vertex_turns


def random_convex_pyramid(rng: np.random.Generator, margin: float = 0.05,
                          min_height: float = 0.2) -> Realization:
    """A convex pyramid in standard position.

    Every vertex turn of the base exceeds ``margin`` and the apex height is at
    least ``min_height``, which keeps instances away from the degenerate
    boundaries of the solver's parametrization.
    """
    while True:
        alpha = rng.uniform(0.25, np.pi - 0.25)
        l4 = rng.uniform(0.3, 2.5)
        x1, y1 = l4 * np.cos(alpha), l4 * np.sin(alpha)
        x2 = rng.uniform(-1.5, 3.0)
        y2 = rng.uniform(0.1, 3.0)
        x3 = rng.uniform(-1.0, 2.0)
        y3 = rng.uniform(-0.5, 2.5)
        z3 = rng.uniform(min_height, 2.5)
        r = Realization.from_coords((x1, y1, x2, y2, x3, y3, z3))
        if r.base_class is BaseClass.ConvexCCW and min(vertex_turns(r.base)) > margin:
            return r


def random_lengths(rng: np.random.Generator, low: float = 0.3, high: float = 3.0) -> EdgeLengthSet:
    return EdgeLengthSet.from_sequence(rng.uniform(low, high, size=8))
