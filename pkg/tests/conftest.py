import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_states(rng, n, d=None):
    from sparsephase.photons import InternalState

    d = n if d is None else d
    return [InternalState.normalized(rng.normal(size=d) + 1j * rng.normal(size=d)) for _ in range(n)]
