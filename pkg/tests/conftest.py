import math

import numpy as np
import pytest

from qpyramid import EdgeLengthSet

R2, R3, R5 = math.sqrt(2), math.sqrt(3), math.sqrt(5)


def example_lengths(ec2):
    """The three-realization length set with |EC|^2 = ec2."""
    return EdgeLengthSet(1.0, 2.0, R2, 1.0, R2, R5, math.sqrt(ec2), R3)


EXAMPLE_SWEEP = [1.0, 2.0, R2, 1.0, R2, R5, None, R3]

FLEX_POINTS = np.array([(0, 0, 0), (1, 0, 0), (2, 2, 0), (2, 1, 0), (1, 1, 1)], dtype=float)
SQUARE_COORDS = np.array([0.0, 1.0, 1.0, 1.0, 0.5, 0.5, 1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
