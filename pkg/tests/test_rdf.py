import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sparsedom.dyadic import DyadicGrid, GridFunction
from sparsedom.maximal import dyadic_maximal
from sparsedom.rdf import rdf_build, s_operator
from sparsedom.verify.norms import lp_norm

from conftest import functions


def ones(g):
    return GridFunction(g, np.ones(g.size), weight=True)


def test_s_operator_with_unit_weight_is_maximal():
    g = DyadicGrid(1, 4)
    f = GridFunction(g, np.random.default_rng(0).lognormal(size=16))
    assert np.allclose(s_operator(f, ones(g), 2.0).values, dyadic_maximal(f).output.values)
    assert np.allclose(s_operator(ones(g), ones(g), 3.0).values, 1.0)


def test_s_operator_errors():
    g = DyadicGrid(1, 1)
    with pytest.raises(ValueError):
        s_operator(ones(g), GridFunction(g, [1.0, 0.0], weight=True), 2.0)
    with pytest.raises(ValueError):
        s_operator(ones(g), ones(g), 1.0)


@given(functions(), functions(positive=True, weight=True), st.sampled_from([1.5, 2.0, 4.0]))
def test_s_operator_bounded_by_dual_exponent(f, v, s):
    if f.grid != v.grid:
        v = GridFunction(f.grid, np.resize(v.values, f.grid.size), weight=True)
    sp = s / (s - 1)
    assert lp_norm(s_operator(f, v, s), v, s) <= sp * lp_norm(f, v, s) * (1 + 1e-9)


@pytest.mark.parametrize("s", [1.5, 2.0, 4.0])
def test_unit_input_closed_form(s):
    g = DyadicGrid(2, 3)
    res = rdf_build(ones(g), ones(g), s)
    sp = s / (s - 1)
    assert np.allclose(res.R.values, 1 / (1 - 1 / (2 * sp)), rtol=0, atol=1e-9)
    assert res.s_norm == pytest.approx(sp) and res.passed


def test_truncation_count():
    g = DyadicGrid(1, 2)
    res = rdf_build(ones(g), ones(g), 2.0, tol=1e-10)
    assert res.K == math.floor(math.log2(1e10)) + 1


def test_cell_indicator():
    g = DyadicGrid(1, 6)
    h = np.zeros(g.size)
    h[9] = 1.0
    res = rdf_build(GridFunction(g, h), ones(g), 2.0)
    assert res.majorizes and res.R_norm <= 2 * res.h_norm + 1e-10
    assert math.isfinite(res.a1) and res.a1_ratio == pytest.approx(res.a1 / 2)


def test_zero_input():
    g = DyadicGrid(1, 2)
    res = rdf_build(GridFunction(g, np.zeros(4)), ones(g), 2.0)
    assert res.K == 0 and not res.R.values.any() and res.passed


def test_rdf_errors():
    g = DyadicGrid(1, 1)
    with pytest.raises(ValueError):
        rdf_build(GridFunction(g, [-1.0, 1.0]), ones(g), 2.0)
    with pytest.raises(ValueError):
        rdf_build(ones(g), ones(g), 2.0, tol=0.0)
    with pytest.raises(ValueError):
        rdf_build(ones(g), GridFunction(g, [0.0, 1.0], weight=True), 2.0)


@given(functions(), st.integers(0, 2**32 - 1), st.sampled_from([1.5, 2.0, 4.0]))
def test_rdf_properties(h, seed, s):
    v = GridFunction(h.grid, np.random.default_rng(seed).lognormal(0, 1, h.grid.size), weight=True)
    res = rdf_build(h, v, s)
    assert np.all(res.R.values >= h.values)
    assert res.R_norm <= 2 * res.h_norm + 1e-9
    assert math.isfinite(res.a1) and res.a1 >= 1 - 1e-12
