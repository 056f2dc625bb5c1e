import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from tcrobots.spaces import Edge, PhysPoint, Space, canonicalize, dist

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

unit = st.floats(min_value=0.0, max_value=1.0, exclude_max=True, allow_nan=False)
closed_unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


def points(space: Space):
    if space is Space.INTERVAL:
        return closed_unit.map(lambda t: PhysPoint(Edge.I, t))
    if space is Space.CIRCLE:
        return unit.map(lambda t: PhysPoint(Edge.C, t))
    return st.one_of(closed_unit.map(lambda t: canonicalize(space, PhysPoint(Edge.I, t))),
                     unit.map(lambda t: PhysPoint(Edge.C, t)))


def states(space: Space, min_sep: float = 0.0):
    return st.tuples(points(space), points(space)).filter(
        lambda ab: dist(space, *ab) > min_sep)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
