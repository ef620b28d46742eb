"""Finite dyadic grids on a root cube and piecewise-constant grid functions.

Cell values are stored flat in lexicographic order (last coordinate fastest),
which is C order for an array of shape ``(2**depth,) * n``.  All integrals
are exact finite sums; every per-level quantity is computed from a pyramid
of block sums so that tree passes cost O(cells) per level.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

__all__ = [
    "Cube",
    "DyadicGrid",
    "GridFunction",
    "DGFError",
    "cells",
    "average",
    "integrate",
    "read_function",
    "write_function",
    "level_blocks",
    "level_sums",
    "level_means",
    "expand",
]


@dataclass(frozen=True, order=True)
class Cube:
    level: int
    index: tuple[int, ...]

    def parent(self) -> "Cube":
        if self.level == 0:
            raise ValueError("the root cube has no parent inside the grid")
        return Cube(self.level - 1, tuple(i // 2 for i in self.index))

    def children(self) -> list["Cube"]:
        offsets = itertools.product((0, 1), repeat=len(self.index))
        return [Cube(self.level + 1, tuple(2 * i + o for i, o in zip(self.index, off)))
                for off in offsets]

    def contains(self, other: "Cube") -> bool:
        """True if ``other`` is a (not necessarily strict) sub-cube."""
        if other.level < self.level:
            return False
        shift = other.level - self.level
        return all((j >> shift) == i for i, j in zip(self.index, other.index))

    def ancestor(self, level: int) -> "Cube":
        if level > self.level:
            raise ValueError("ancestor level must not exceed the cube level")
        shift = self.level - level
        return Cube(level, tuple(i >> shift for i in self.index))


@dataclass(frozen=True)
class DyadicGrid:
    n: int
    depth: int
    origin: tuple[float, ...] = None  # type: ignore[assignment]
    side: float = 1.0

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.n}")
        if self.depth < 0:
            raise ValueError("depth must be nonnegative")
        if not self.side > 0:
            raise ValueError("root side must be positive")
        origin = (0.0,) * self.n if self.origin is None else tuple(float(x) for x in self.origin)
        if len(origin) != self.n:
            raise ValueError("origin length must equal the dimension")
        object.__setattr__(self, "origin", origin)

    @property
    def shape(self) -> tuple[int, ...]:
        return (1 << self.depth,) * self.n

    @property
    def size(self) -> int:
        return 1 << (self.n * self.depth)

    @property
    def cell_volume(self) -> float:
        return (self.side / (1 << self.depth)) ** self.n

    @property
    def volume(self) -> float:
        return self.side ** self.n

    @property
    def root(self) -> Cube:
        return Cube(0, (0,) * self.n)

    def side_of(self, Q: Cube) -> float:
        return self.side / (1 << Q.level)

    def volume_of(self, Q: Cube) -> float:
        return self.side_of(Q) ** self.n

    def origin_of(self, Q: Cube) -> tuple[float, ...]:
        s = self.side_of(Q)
        return tuple(o + i * s for o, i in zip(self.origin, Q.index))

    def check_cube(self, Q: Cube) -> None:
        if not 0 <= Q.level <= self.depth or len(Q.index) != self.n:
            raise ValueError(f"cube {Q} does not belong to this grid")
        if any(not 0 <= i < (1 << Q.level) for i in Q.index):
            raise ValueError(f"cube {Q} does not belong to this grid")

    def flat_index(self, Q: Cube) -> int:
        """Position of ``Q`` among the cubes of its level (lexicographic)."""
        return int(np.ravel_multi_index(Q.index, (1 << Q.level,) * self.n))

    def cube_at(self, level: int, flat: int) -> Cube:
        idx = np.unravel_index(flat, (1 << level,) * self.n)
        return Cube(level, tuple(int(i) for i in idx))

    def mask(self, Q: Cube) -> np.ndarray:
        """Boolean flat mask of the finest cells inside ``Q``."""
        self.check_cube(Q)
        m = np.zeros(self.shape, dtype=bool)
        w = 1 << (self.depth - Q.level)
        m[tuple(slice(i * w, (i + 1) * w) for i in Q.index)] = True
        return m.reshape(-1)

    def cell_centers(self) -> np.ndarray:
        """Array of shape (size, n) with the centre of every finest cell."""
        h = self.side / (1 << self.depth)
        axes = [o + (np.arange(1 << self.depth) + 0.5) * h for o in self.origin]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: DyadicGrid
    values: np.ndarray
    weight: bool = False

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} values, got {v.size}")
        if self.weight and np.any(v < 0):
            raise ValueError("weight functions must be nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def array(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)

    def with_values(self, values, weight: bool | None = None) -> "GridFunction":
        return GridFunction(self.grid, values, self.weight if weight is None else weight)

    def __eq__(self, other):
        return (isinstance(other, GridFunction) and self.grid == other.grid
                and np.array_equal(self.values, other.values))

    __hash__ = None  # type: ignore[assignment]


def cells(grid: DyadicGrid, level: int) -> list[Cube]:
    if not 0 <= level <= grid.depth:
        raise ValueError(f"level {level} outside [0, {grid.depth}]")
    return [Cube(level, idx) for idx in itertools.product(range(1 << level), repeat=grid.n)]


def _check_same_grid(*fs: GridFunction) -> None:
    g = fs[0].grid
    if any(f.grid != g for f in fs[1:]):
        raise ValueError("grid functions live on different grids")


def level_blocks(values: np.ndarray, grid: DyadicGrid, level: int) -> np.ndarray:
    """View ``values`` as a (cubes, cells-per-cube) matrix for one level.

    Row ``r`` holds the finest cells of the level cube with flat index ``r``.
    """
    n, L = grid.n, grid.depth
    a, b = 1 << level, 1 << (L - level)
    arr = np.asarray(values).reshape((a, b) * n)
    order = tuple(range(0, 2 * n, 2)) + tuple(range(1, 2 * n, 2))
    return arr.transpose(order).reshape(a ** n, b ** n)


def level_sums(values: np.ndarray, grid: DyadicGrid) -> list[np.ndarray]:
    """Cell-value sums over every cube, level by level (index = level).

    Each entry has shape ``(2**k,) * n``; built bottom-up by summing children.
    """
    n = grid.n
    cur = np.asarray(values, dtype=float).reshape(grid.shape)
    out = [cur]
    for k in range(grid.depth, 0, -1):
        half = 1 << (k - 1)
        cur = cur.reshape((half, 2) * n).sum(axis=tuple(range(1, 2 * n, 2)))
        out.append(cur)
    return out[::-1]


def level_means(values: np.ndarray, grid: DyadicGrid) -> list[np.ndarray]:
    sums = level_sums(values, grid)
    return [s / float(1 << (grid.n * (grid.depth - k))) for k, s in enumerate(sums)]


def expand(arr: np.ndarray, grid: DyadicGrid, level: int, to_level: int | None = None) -> np.ndarray:
    """Broadcast a level array down to ``to_level`` (default: finest cells)."""
    to_level = grid.depth if to_level is None else to_level
    r = 1 << (to_level - level)
    out = np.asarray(arr).reshape((1 << level,) * grid.n)
    for ax in range(grid.n):
        out = np.repeat(out, r, axis=ax)
    return out


def average(f: GridFunction, Q: Cube) -> float:
    f.grid.check_cube(Q)
    row = level_blocks(f.values, f.grid, Q.level)[f.grid.flat_index(Q)]
    return float(row.mean())


def integrate(f: GridFunction, w: GridFunction | None = None) -> float:
    if w is None:
        return float(f.values.sum() * f.grid.cell_volume)
    _check_same_grid(f, w)
    return float(np.dot(f.values, w.values) * f.grid.cell_volume)


# --- DGF1 text format -------------------------------------------------------

class DGFError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


_HEADER_KEYS = {"n", "depth", "origin", "side"}


def _parse_header(text: str, lineno: int) -> tuple[DyadicGrid, bool]:
    tokens = text.split()
    if not tokens or tokens[0] != "DGF1":
        raise DGFError("header must start with 'DGF1'", lineno)
    fields, weight = {}, False
    for tok in tokens[1:]:
        if tok == "weight":
            weight = True
            continue
        m = re.fullmatch(r"(\w+)=(\S+)", tok)
        if not m or m.group(1) not in _HEADER_KEYS or m.group(1) in fields:
            raise DGFError(f"bad header token {tok!r}", lineno)
        fields[m.group(1)] = m.group(2)
    missing = _HEADER_KEYS - fields.keys()
    if missing:
        raise DGFError(f"header missing {sorted(missing)}", lineno)
    try:
        n, depth = int(fields["n"]), int(fields["depth"])
        origin = tuple(float(x) for x in fields["origin"].split(","))
        side = float(fields["side"])
        return DyadicGrid(n, depth, origin, side), weight
    except ValueError as exc:
        raise DGFError(str(exc), lineno) from None


def read_function(source: str | IO[str]) -> GridFunction:
    """Parse a DGF1 file (path or open text stream)."""
    if isinstance(source, str):
        with open(source) as fh:
            return read_function(fh)
    grid = weight = None
    values: list[float] = []
    lineno = 0
    for lineno, line in enumerate(source, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if grid is None:
            grid, weight = _parse_header(s, lineno)
            continue
        for tok in s.split():
            try:
                values.append(float(tok))
            except ValueError:
                raise DGFError(f"not a number: {tok!r}", lineno) from None
        if len(values) > grid.size:
            raise DGFError(f"more than {grid.size} values", lineno)
    if grid is None:
        raise DGFError("missing DGF1 header", lineno or 1)
    if len(values) != grid.size:
        raise DGFError(f"expected {grid.size} values, found {len(values)}", lineno)
    if weight and any(v < 0 for v in values):
        raise DGFError("negative value in a weight file", lineno)
    return GridFunction(grid, np.array(values), weight)


def _fmt(x: float) -> str:
    return "%.17g" % x


def format_function(f: GridFunction, per_line: int = 8) -> str:
    g = f.grid
    head = (f"DGF1 n={g.n} depth={g.depth} origin={','.join(_fmt(o) for o in g.origin)} "
            f"side={_fmt(g.side)}" + (" weight" if f.weight else ""))
    vals = [_fmt(v) for v in f.values]
    rows = [" ".join(vals[i:i + per_line]) for i in range(0, len(vals), per_line)]
    return "\n".join([head, *rows]) + "\n"


def write_function(f: GridFunction, sink: str | IO[str]) -> None:
    text = format_function(f)
    if isinstance(sink, str):
        from .io import atomic_write_text
        atomic_write_text(sink, text)
    else:
        sink.write(text)
