import numpy as np
import pytest

from domlab import SpaceDescriptor

BLOCK_STRUCTURES = [(2,), (3,), (4,), (1, 1, 1, 1), (2, 1, 1), (2, 2)]


@pytest.fixture(params=BLOCK_STRUCTURES, ids=lambda b: "x".join(map(str, b)))
def space(request):
    return SpaceDescriptor(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20260824)
