import numpy as np
import pytest


@pytest.fixture
def rng():
    """Counter-based generator: identical draws on every platform."""
    return np.random.Generator(np.random.Philox(20260823))


@pytest.fixture(params=[-1, 0, 1], ids=["boson", "classical", "fermion"])
def theta(request):
    return request.param
