import numpy as np
import pytest

from majoritylab import Coloring, from_edge_list


@pytest.fixture
def k5():
    return from_edge_list(5, [(a, b) for a in range(5) for b in range(a + 1, 5)])


@pytest.fixture
def c4():
    return from_edge_list(4, [(0, 1), (1, 2), (2, 3), (0, 3)])


@pytest.fixture
def path3():
    return from_edge_list(3, [(0, 1), (1, 2)])


def coloring_of(*labels) -> Coloring:
    return Coloring(np.asarray(labels, dtype=np.int8))
