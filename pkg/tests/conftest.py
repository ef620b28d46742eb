import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from sparsedom.dyadic import DyadicGrid, GridFunction

settings.register_profile(
    "repo", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

KINDS = ("lognormal", "pareto", "sparse", "integers", "spike")


def sample_values(rng, size, kind, positive=False):
    if kind == "lognormal":
        v = rng.lognormal(0.0, 1.5, size)
    elif kind == "pareto":
        v = rng.pareto(1.2, size)
    elif kind == "sparse":
        v = rng.exponential(1.0, size) * (rng.random(size) < 0.3)
    elif kind == "integers":
        # small integers produce many exact ties between averages
        v = rng.integers(0, 4, size).astype(float)
    else:
        v = np.zeros(size)
        v[rng.integers(size)] = rng.lognormal()
    if positive:
        v = v + rng.uniform(0.05, 0.5)
    if not v.any():
        v[0] = 1.0
    return v


@st.composite
def grids(draw, max_depth_1d=7, max_depth_2d=4, max_depth_3d=2):
    n = draw(st.integers(1, 3))
    cap = {1: max_depth_1d, 2: max_depth_2d, 3: max_depth_3d}[n]
    depth = draw(st.integers(0, cap))
    return DyadicGrid(n, depth)


@st.composite
def functions(draw, grid=None, positive=False, signed=False, weight=False):
    g = draw(grids()) if grid is None else grid
    seed = draw(st.integers(0, 2**32 - 1))
    kind = draw(st.sampled_from(KINDS))
    rng = np.random.default_rng(seed)
    v = sample_values(rng, g.size, kind, positive)
    if signed:
        v = v * rng.choice([-1.0, 1.0], g.size)
    return GridFunction(g, v, weight=weight)


@st.composite
def function_pairs(draw, positive_second=False):
    g = draw(grids())
    return draw(functions(g)), draw(functions(g, positive=positive_second, weight=True))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
