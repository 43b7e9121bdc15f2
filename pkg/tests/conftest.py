import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import zonobasis as zb


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def unit_square():
    return zb.Zonotope([[1.0, 0.0], [0.0, 1.0]])


@pytest.fixture
def parallelogram():
    return zb.Zonotope([[1.0, 0.0], [1.0, 1.0]])


@pytest.fixture
def hexagon():
    return zb.Zonotope([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


@pytest.fixture
def octagon():
    return zb.Zonotope([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [-1.0, 1.0]])
