import sys
from pathlib import Path

import numpy as np
import pytest

# Add current directory to Python path
sys.path.insert(0, str(Path(__file__).parent))

from graphs import Graph
from opsys import graph_system, sk_system


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def pentagon():
    return Graph.cycle(5)


@pytest.fixture
def s2():
    return sk_system(2)


@pytest.fixture
def pentagon_system(pentagon):
    return graph_system(pentagon)
