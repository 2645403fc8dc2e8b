import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)


def vectors(min_size=1, max_size=5):
    return st.integers(min_size, max_size).flatmap(lambda d: arrays(np.float64, d, elements=finite))


def matrices(max_side=5):
    shapes = st.tuples(st.integers(1, max_side), st.integers(1, max_side))
    return shapes.flatmap(lambda s: arrays(np.float64, s, elements=finite))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def d321():
    return np.diag([3.0, 2.0, 1.0])
