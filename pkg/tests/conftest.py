import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def max_abs(x) -> float:
    return float(np.max(np.abs(np.asarray(x, dtype=float))))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
