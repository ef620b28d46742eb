"""Calderón–Zygmund decomposition, Orlicz stopping cubes and sparse operators."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .dyadic import Cube, DyadicGrid, GridFunction, expand, level_means, level_sums
from .maximal import cube_norms
from .orlicz import YoungFunction

__all__ = [
    "SparseFamily", "CZDecomposition", "StoppingCubes",
    "make_family", "cz_decompose", "cz_violations", "stopping_cubes", "sparse_from_cz",
    "is_sparse", "apply_sparse", "carleson_constant",
    "family_to_json", "family_from_json", "write_family", "read_family",
]


def _children_sum(arr: np.ndarray, n: int) -> np.ndarray:
    half = arr.shape[0] // 2
    return arr.reshape((half, 2) * n).sum(axis=tuple(range(1, 2 * n, 2)))


def _select_maximal(levels: list[np.ndarray], threshold: float, grid: DyadicGrid) -> list[np.ndarray]:
    """Per level, the maximal cubes whose value exceeds ``threshold`` (strictly)."""
    covered = np.zeros((1,) * grid.n, dtype=bool)
    out = []
    for k, vals in enumerate(levels):
        if k:
            covered = expand(covered, grid, k - 1, k)
        sel = (vals > threshold) & ~covered
        out.append(sel)
        covered = covered | sel
    return out


def _cubes_from_levels(sel: list[np.ndarray], grid: DyadicGrid) -> list[Cube]:
    cubes = []
    for k, s in enumerate(sel):
        for idx in np.argwhere(s):
            cubes.append(Cube(k, tuple(int(i) for i in idx)))
    return cubes


def _union_mask(sel: list[np.ndarray], grid: DyadicGrid) -> np.ndarray:
    m = np.zeros(grid.shape, dtype=bool)
    for k, s in enumerate(sel):
        if s.any():
            m |= expand(s, grid, k)
    return m.reshape(-1)


# --- sparse families ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SparseFamily:
    grid: DyadicGrid
    cubes: tuple[Cube, ...]
    E: tuple[np.ndarray, ...]

    def __len__(self):
        return len(self.cubes)

    def membership(self) -> list[np.ndarray]:
        mem = [np.zeros((1 << k,) * self.grid.n, dtype=bool) for k in range(self.grid.depth + 1)]
        for Q in self.cubes:
            mem[Q.level][Q.index] = True
        return mem


def _deepest_owner_level(grid: DyadicGrid, mem: list[np.ndarray]) -> np.ndarray:
    """Per finest cell, the level of the deepest family cube containing it (-1 if none)."""
    deepest = np.full(grid.shape, -1, dtype=np.int64)
    for k, m in enumerate(mem):
        if m.any():
            deepest = np.where(expand(m, grid, k), k, deepest)
    return deepest.reshape(-1)


def make_family(grid: DyadicGrid, cubes: Iterable[Cube]) -> SparseFamily:
    """Family with ``E(Q) = Q`` minus the union of strict sub-cubes in the family."""
    cubes = tuple(sorted(set(cubes)))
    for Q in cubes:
        grid.check_cube(Q)
    fam = SparseFamily(grid, cubes, ())
    deepest = _deepest_owner_level(grid, fam.membership())
    E = []
    for Q in cubes:
        m = grid.mask(Q) & (deepest == Q.level)
        m.setflags(write=False)
        E.append(m)
    return SparseFamily(grid, cubes, tuple(E))


def is_sparse(S: SparseFamily) -> tuple[bool, str | None]:
    """Check ½-packing, disjointness of the E(Q) and ``|Q| <= 2|E(Q)|``."""
    g = S.grid
    deepest = _deepest_owner_level(g, S.membership())
    seen = np.zeros(g.size, dtype=bool)
    for Q, EQ in zip(S.cubes, S.E):
        qm = g.mask(Q)
        covered = np.count_nonzero(qm & (deepest > Q.level))
        if 2 * covered > qm.sum():
            return False, f"packing violated at {Q}: {covered} of {qm.sum()} cells covered"
        if np.any(EQ & ~qm):
            return False, f"E({Q}) is not contained in {Q}"
        if np.any(EQ & seen):
            return False, f"E({Q}) meets another E set"
        seen |= EQ
        if qm.sum() > 2 * np.count_nonzero(EQ):
            return False, f"|Q| > 2|E(Q)| at {Q}"
    return True, None


def apply_sparse(S: SparseFamily, f: GridFunction) -> GridFunction:
    """``sum_{Q in S} avg_Q f * 1_Q``."""
    if f.grid != S.grid:
        raise ValueError("family and function live on different grids")
    g = S.grid
    means = level_means(f.values, g)
    out = np.zeros(g.shape)
    for k, m in enumerate(S.membership()):
        if m.any():
            out += expand(np.where(m, means[k], 0.0), g, k)
    return GridFunction(g, out.reshape(-1))


def carleson_constant(S: SparseFamily, w: GridFunction) -> tuple[float, Cube]:
    """``max_R sum_{Q in S, Q ⊆ R} w(Q) / w(R)`` over ``R`` in ``S`` ∪ {root}."""
    g = S.grid
    if not np.any(w.values > 0):
        raise ValueError("weight vanishes identically")
    sums = level_sums(w.values, g)
    mem = S.membership()
    tot = np.where(mem[g.depth], sums[g.depth], 0.0)
    best, arg = -math.inf, g.root
    for k in range(g.depth, -1, -1):
        if k < g.depth:
            tot = np.where(mem[k], sums[k], 0.0) + _children_sum(tot, g.n)
        cand = mem[k].copy()
        if k == 0:
            cand[...] = True
        cand &= sums[k] > 0
        if cand.any():
            ratio = np.where(cand, tot / np.where(cand, sums[k], 1.0), -math.inf)
            i = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
            if ratio[i] > best:
                best, arg = float(ratio[i]), Cube(k, tuple(int(v) for v in i))
    return best, arg


# --- Calderón–Zygmund ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CZDecomposition:
    lam: float
    cubes: list[Cube]
    good: GridFunction
    bad: list[GridFunction]
    omega: np.ndarray
    averages: list[float] = field(default_factory=list)


def cz_decompose(f: GridFunction, lam: float) -> CZDecomposition:
    """Maximal dyadic cubes with ``avg_Q |f| > lam`` and the good/bad split.

    The upper bound ``avg_Q |f| <= 2^n lam`` comes from the parent of a
    selected cube; for the root it holds whenever ``avg_root |f| <= 2^n lam``
    (the root's parent in the zero-extended lattice has average
    ``2^-n avg_root |f|``).
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    g = f.grid
    absmeans = level_means(np.abs(f.values), g)
    sel = _select_maximal(absmeans, lam, g)
    cubes = _cubes_from_levels(sel, g)
    means = level_means(f.values, g)
    good = f.values.copy()
    bad, avgs = [], []
    for Q in cubes:
        m = g.mask(Q)
        fq = means[Q.level][Q.index]
        good[m] = fq
        b = np.zeros(g.size)
        b[m] = f.values[m] - fq
        bad.append(GridFunction(g, b))
        avgs.append(float(absmeans[Q.level][Q.index]))
    omega = _union_mask(sel, g)
    return CZDecomposition(lam, cubes, GridFunction(g, good), bad, omega, avgs)


def cz_violations(f: GridFunction, cz: CZDecomposition, tol: float = 1e-12) -> list[str]:
    """Invariant check; an empty list means every invariant holds.

    The upper bounds ``avg <= 2^n lam`` and ``|g| <= 2^n lam`` are only
    guaranteed when ``lam >= 2^-n avg_root |f|``; below that the root itself
    is selected with a larger average.
    """
    g = f.grid
    out = []
    n2 = 2 ** g.n
    seen = np.zeros(g.size, dtype=bool)
    scale = max(1.0, float(np.abs(f.values).max()))
    for Q, b, avg in zip(cz.cubes, cz.bad, cz.averages):
        m = g.mask(Q)
        if np.any(m & seen):
            out.append(f"{Q} overlaps another selected cube")
        seen |= m
        if not avg > cz.lam:
            out.append(f"{Q}: average {avg} not above lambda")
        if avg > n2 * cz.lam * (1 + tol):
            out.append(f"{Q}: average {avg} above 2^n lambda")
        if Q.level > 0 and float(np.abs(f.values[g.mask(Q.parent())]).mean()) > cz.lam:
            out.append(f"{Q} is not maximal")
        if abs(b.values[m].sum()) > tol * scale * m.sum():
            out.append(f"{Q}: bad part has nonzero mean")
        if np.any(b.values[~m] != 0):
            out.append(f"{Q}: bad part leaks outside its cube")
    if np.abs(cz.good.values).max(initial=0.0) > n2 * cz.lam * (1 + tol):
        out.append("good part exceeds 2^n lambda")
    recon = cz.good.values + sum((b.values for b in cz.bad), np.zeros(g.size))
    if np.max(np.abs(recon - f.values), initial=0.0) > tol * scale:
        out.append("f != g + sum b_j")
    if np.any(np.abs(f.values[~seen]) > cz.lam):
        out.append("a cell outside Omega exceeds lambda")
    return out


# --- Orlicz stopping cubes ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class StoppingCubes:
    a: float
    layers: dict[int, list[Cube]]
    E: dict[tuple[int, int], np.ndarray]
    norms: dict[tuple[int, int], float]
    alpha: float

    @property
    def ks(self) -> list[int]:
        return sorted(self.layers)

    def union(self, k: int, grid: DyadicGrid) -> np.ndarray:
        m = np.zeros(grid.size, dtype=bool)
        for Q in self.layers.get(k, []):
            m |= grid.mask(Q)
        return m


def _floor_log(x: float, a: float) -> int:
    """Largest integer ``k`` with ``a**k < x``."""
    k = math.floor(math.log(x) / math.log(a))
    while a ** k >= x:
        k -= 1
    while a ** (k + 1) < x:
        k += 1
    return k


def stopping_cubes(f: GridFunction, A: YoungFunction, a: float) -> StoppingCubes:
    """Layers ``k`` of maximal cubes with ``||f||_{A,Q} > a^k``.

    Only one layer selecting the root is kept (all lower layers repeat it).
    """
    g = f.grid
    if not a > 2 ** (g.n + 1):
        raise ValueError(f"a must exceed 2^(n+1) = {2 ** (g.n + 1)}")
    norms = cube_norms(f, A)
    top = max(float(x.max()) for x in norms)
    if top == 0:
        return StoppingCubes(a, {}, {}, {}, 1.0)
    root = float(norms[0].reshape(-1)[0])
    k_lo, k_hi = _floor_log(root, a), _floor_log(top, a)
    layers, unions = {}, {}
    for k in range(k_lo, k_hi + 1):
        sel = _select_maximal(norms, a ** k, g)
        layers[k] = _cubes_from_levels(sel, g)
        unions[k] = _union_mask(sel, g)
    E, nrm = {}, {}
    alpha = 1.0
    for k, cubes in layers.items():
        nxt = unions.get(k + 1, np.zeros(g.size, dtype=bool))
        for j, Q in enumerate(cubes):
            qm = g.mask(Q)
            e = qm & ~nxt
            E[(k, j)] = e
            nrm[(k, j)] = float(norms[Q.level][Q.index])
            ne = np.count_nonzero(e)
            alpha = max(alpha, math.inf if ne == 0 else qm.sum() / ne)
    return StoppingCubes(a, layers, E, nrm, alpha)


def sparse_from_cz(f: GridFunction, lam0: float, ratio: float | None = None) -> SparseFamily:
    """Union of CZ cubes at ``lam0 * ratio^k``, ``k = 0, 1, ...``.

    Levels below ``2^-n avg_root |f|`` are skipped: there the root would not be
    maximal in the zero-extended lattice and packing can fail.
    """
    g = f.grid
    if not np.any(f.values != 0):
        raise ValueError("f vanishes identically")
    if not lam0 > 0:
        raise ValueError("lam0 must be positive")
    ratio = 2 ** (g.n + 1) + 1 if ratio is None else ratio
    if not ratio > 2 ** (g.n + 1):
        raise ValueError("ratio must exceed 2^(n+1)")
    absv = np.abs(f.values)
    absmeans = level_means(absv, g)
    floor_lam = float(absv.mean()) / 2 ** g.n
    lam = lam0
    while lam < floor_lam:
        lam *= ratio
    top = float(absv.max())
    cubes: set[Cube] = set()
    while lam < top:
        cubes.update(_cubes_from_levels(_select_maximal(absmeans, lam, g), g))
        lam *= ratio
    return make_family(g, cubes)


# --- family.json -------------------------------------------------------------------

def _ranges(mask: np.ndarray) -> list[list[int]]:
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(idx) != 1)
    starts = np.concatenate([[idx[0]], idx[breaks + 1]])
    ends = np.concatenate([idx[breaks], [idx[-1]]]) + 1
    return [[int(a), int(b)] for a, b in zip(starts, ends)]


def family_to_json(S: SparseFamily) -> dict:
    g = S.grid
    return {
        "grid": {"n": g.n, "depth": g.depth, "origin": list(g.origin), "side": g.side},
        "cubes": [{"level": Q.level, "index": list(Q.index), "E": _ranges(e)}
                  for Q, e in zip(S.cubes, S.E)],
    }


def family_from_json(obj: dict) -> SparseFamily:
    gd = obj["grid"]
    g = DyadicGrid(int(gd["n"]), int(gd["depth"]), tuple(gd["origin"]), float(gd["side"]))
    cubes = [Cube(int(c["level"]), tuple(int(i) for i in c["index"])) for c in obj["cubes"]]
    fam = make_family(g, cubes)
    stored = {Cube(int(c["level"]), tuple(int(i) for i in c["index"])): c.get("E") for c in obj["cubes"]}
    for Q, e in zip(fam.cubes, fam.E):
        if stored[Q] is not None and stored[Q] != _ranges(e):
            raise ValueError(f"E({Q}) in file disagrees with the family geometry")
    return fam


def write_family(S: SparseFamily, sink: str | IO[str]) -> None:
    text = json.dumps(family_to_json(S), indent=1) + "\n"
    if isinstance(sink, str):
        from .io import atomic_write_text
        atomic_write_text(sink, text)
    else:
        sink.write(text)


def read_family(source: str | IO[str]) -> SparseFamily:
    if isinstance(source, str):
        with open(source) as fh:
            return family_from_json(json.load(fh))
    return family_from_json(json.load(source))
