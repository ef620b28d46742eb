import io
import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sparsedom.dyadic import (Cube, DGFError, DyadicGrid, GridFunction, average, cells,
                              format_function, integrate, level_means, read_function,
                              write_function)

from conftest import functions, grids


def test_cells_1d_halves():
    g = DyadicGrid(1, 2)
    left, right = cells(g, 1)
    assert g.origin_of(left) == (0.0,) and g.origin_of(right) == (0.5,)
    assert g.side_of(left) == 0.5


def test_cells_2d_quadrants_and_root():
    g = DyadicGrid(2, 1)
    assert cells(g, 1) == [Cube(1, (0, 0)), Cube(1, (0, 1)), Cube(1, (1, 0)), Cube(1, (1, 1))]
    assert cells(g, 0) == [g.root]


def test_cells_level_out_of_range():
    with pytest.raises(ValueError):
        cells(DyadicGrid(1, 2), 3)


def test_grid_rejects_bad_parameters():
    for args in [(0, 1), (4, 1), (1, -1)]:
        with pytest.raises(ValueError):
            DyadicGrid(*args)
    with pytest.raises(ValueError):
        DyadicGrid(1, 1, side=0.0)
    with pytest.raises(ValueError):
        DyadicGrid(2, 1, origin=(0.0,))


def test_average_examples():
    g = DyadicGrid(1, 2)
    assert average(GridFunction(g, [3, 3, 3, 3]), g.root) == 3
    assert average(GridFunction(g, [1, 1, 0, 0]), g.root) == 0.5
    assert average(GridFunction(g, [1, 2, 3, 4]), g.root) == 2.5
    assert average(GridFunction(g, [1, 2, 3, 4]), Cube(1, (1,))) == 3.5


def test_average_rejects_foreign_cube():
    g = DyadicGrid(1, 2)
    with pytest.raises(ValueError):
        average(GridFunction(g, [1, 2, 3, 4]), Cube(3, (0,)))


def test_integrate_examples():
    g = DyadicGrid(1, 1)
    one = GridFunction(g, [1, 1])
    assert integrate(one) == 1.0
    assert integrate(GridFunction(g, [1, 0]), GridFunction(g, [0, 1])) == 0.0
    assert integrate(GridFunction(g, [1, 2]), GridFunction(g, [3, 4])) == 5.5
    with pytest.raises(ValueError):
        integrate(one, GridFunction(DyadicGrid(1, 2), [1, 1, 1, 1]))


def test_weight_flag_rejects_negative_values():
    with pytest.raises(ValueError):
        GridFunction(DyadicGrid(1, 1), [1.0, -1.0], weight=True)
    with pytest.raises(ValueError):
        GridFunction(DyadicGrid(1, 1), [1.0, 2.0, 3.0])


def test_values_are_read_only():
    f = GridFunction(DyadicGrid(1, 1), [1.0, 2.0])
    with pytest.raises(ValueError):
        f.values[0] = 5.0


def test_cube_family_relations():
    Q = Cube(2, (1, 2))
    assert Q.parent() == Cube(1, (0, 1))
    assert all(c.parent() == Q for c in Q.children())
    assert Q.contains(Cube(4, (5, 9))) and not Q.contains(Cube(4, (8, 9)))
    assert Cube(4, (5, 9)).ancestor(2) == Q
    with pytest.raises(ValueError):
        Cube(0, (0,)).parent()


def test_mask_layout_is_lexicographic():
    g = DyadicGrid(2, 1)
    # last coordinate fastest: cell (0, 1) is flat index 1
    assert np.flatnonzero(g.mask(Cube(1, (0, 1)))).tolist() == [1]
    assert np.flatnonzero(g.mask(Cube(1, (1, 0)))).tolist() == [2]


def test_dgf_parse_example():
    f = read_function(io.StringIO("DGF1 n=1 depth=1 origin=0 side=1\n1 3\n"))
    assert f.values.tolist() == [1.0, 3.0] and f.grid == DyadicGrid(1, 1)


def test_dgf_comments_and_weight_flag():
    text = "# a comment\nDGF1 n=2 depth=1 origin=0.5,1 side=2 weight\n# more\n1 2\n3 4\n"
    f = read_function(io.StringIO(text))
    assert f.weight and f.grid.origin == (0.5, 1.0) and f.grid.side == 2.0


@pytest.mark.parametrize("text, line", [
    ("DGF1 n=1 depth=2 origin=0 side=1\n1 2 3\n", 2),
    ("DGF2 n=1 depth=1 origin=0 side=1\n1 2\n", 1),
    ("DGF1 n=1 depth=1 side=1\n1 2\n", 1),
    ("DGF1 n=1 depth=1 origin=0 side=1\n1 x\n", 2),
    ("DGF1 n=1 depth=1 origin=0 side=1 weight\n1\n-2\n", 3),
    ("DGF1 n=1 depth=1 origin=0 side=1\n1 2\n3\n", 3),
    ("DGF1 n=1 depth=1 origin=0 side=1 colour=red\n1 2\n", 1),
])
def test_dgf_errors_name_the_line(text, line):
    with pytest.raises(DGFError) as exc:
        read_function(io.StringIO(text))
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_dgf_file_round_trip(tmp_path):
    g = DyadicGrid(2, 2, origin=(-1.0, 0.25), side=3.0)
    f = GridFunction(g, np.random.default_rng(0).lognormal(size=16), weight=True)
    path = str(tmp_path / "f.dgf")
    write_function(f, path)
    back = read_function(path)
    assert back == f and back.weight and back.grid == g
    assert format_function(back) == open(path).read()


@given(functions(signed=True))
def test_dgf_round_trip_is_bitwise(f):
    buf = io.StringIO()
    write_function(f, buf)
    back = read_function(io.StringIO(buf.getvalue()))
    assert np.array_equal(back.values, f.values)
    assert format_function(back) == buf.getvalue()


@given(functions(signed=True))
def test_parent_average_is_mean_of_children(f):
    g = f.grid
    for k in range(g.depth):
        for Q in cells(g, k):
            kids = [average(f, c) for c in Q.children()]
            assert average(f, Q) == pytest.approx(np.mean(kids), rel=1e-12, abs=1e-12 * np.abs(f.values).max())


@given(functions(signed=True))
def test_level_means_agree_with_average(f):
    g = f.grid
    means = level_means(f.values, g)
    k = g.depth // 2
    for Q in cells(g, k)[:8]:
        assert means[k][Q.index] == pytest.approx(average(f, Q), rel=1e-12, abs=1e-300)


@given(functions(signed=True))
def test_integral_is_cell_sum(f):
    assert integrate(f) == float(f.values.sum() * f.grid.cell_volume)


@given(grids(), st.floats(0.1, 10.0))
def test_levels_partition_the_root(g, side):
    g = DyadicGrid(g.n, g.depth, side=side)
    for k in range(g.depth + 1):
        vols = [g.volume_of(Q) for Q in cells(g, k)]
        assert sum(vols) == pytest.approx(g.volume, rel=1e-12)
        masks = np.array([g.mask(Q) for Q in cells(g, k)])
        assert (masks.sum(axis=0) == 1).all()


@given(grids())
def test_children_partition_parent(g):
    for Q in itertools.islice((Q for k in range(g.depth) for Q in cells(g, k)), 20):
        kids = np.array([g.mask(c) for c in Q.children()])
        assert np.array_equal(kids.sum(axis=0).astype(bool), g.mask(Q)) and kids.sum() == g.mask(Q).sum()
