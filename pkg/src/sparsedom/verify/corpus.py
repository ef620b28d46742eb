"""Seeded corpora of (f, w, sigma) instances on small dyadic grids.

A corpus spec is a comma-separated ``key=value`` list, with ``+`` separating
alternatives, e.g. ``n=1,depth=8,count=200,weights=power+cascade,f=spike+random,m=2+4``.
Instance ``i`` draws from its own generator ``default_rng([seed, i])`` so that
instances are reproducible independently of each other and of the order in
which they are built.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..dyadic import Cube, DyadicGrid, GridFunction

__all__ = ["CorpusSpec", "Instance", "Corpus", "parse_corpus_spec", "corpus_generate",
           "WEIGHT_GENERATORS", "F_GENERATORS"]


@dataclass(frozen=True)
class CorpusSpec:
    n: int = 1
    depth: int = 8
    count: int = 200
    weights: tuple[str, ...] = ("power", "cascade")
    f: tuple[str, ...] = ("spike", "random")
    m: tuple[float, ...] = (2.0, 4.0)

    def __post_init__(self):
        for name in self.weights:
            if name not in WEIGHT_GENERATORS:
                raise ValueError(f"unknown weight generator {name!r}")
        for name in self.f:
            if name not in F_GENERATORS:
                raise ValueError(f"unknown f generator {name!r}")
        if self.count < 1:
            raise ValueError("count must be positive")
        if any(m < 1 for m in self.m):
            raise ValueError("cascade ratios m must be at least 1")
        DyadicGrid(self.n, self.depth)

    def text(self) -> str:
        return (f"n={self.n},depth={self.depth},count={self.count},weights={'+'.join(self.weights)},"
                f"f={'+'.join(self.f)},m={'+'.join('%g' % m for m in self.m)}")


def parse_corpus_spec(text: str) -> CorpusSpec:
    kw: dict = {}
    for part in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in part:
            raise ValueError(f"bad corpus spec item {part!r}")
        key, val = (s.strip() for s in part.split("=", 1))
        if key in ("n", "depth", "count"):
            kw[key] = int(val)
        elif key in ("weights", "f"):
            kw[key] = tuple(v.strip() for v in val.split("+"))
        elif key == "m":
            kw[key] = tuple(float(v) for v in val.split("+"))
        else:
            raise ValueError(f"unknown corpus spec key {key!r}")
    return CorpusSpec(**kw)


# --- weight generators ---------------------------------------------------------------

def power_weight(grid: DyadicGrid, rng: np.random.Generator, **_) -> tuple[np.ndarray, dict]:
    """``(|x - x0| + h)^a`` with ``a`` uniform in ``(-0.9 n, 3]``."""
    n = grid.n
    a = float(rng.uniform(-0.9 * n, 3.0))
    x0 = np.array(grid.origin) + rng.uniform(0, grid.side, n)
    h = grid.side / (1 << grid.depth) * float(rng.uniform(0.25, 2.0))
    dist = np.linalg.norm(grid.cell_centers() - x0, axis=1)
    return (dist + h) ** a, {"a": a, "h": h, "x0": [float(x) for x in x0]}


def cascade_weight(grid: DyadicGrid, rng: np.random.Generator, m: float = 2.0, **_) -> tuple[np.ndarray, dict]:
    """Multiplicative cascade: each child multiplies its parent by a factor
    log-uniform in ``[1/m, m]``; normalized to mean 1."""
    v = np.ones((1,) * grid.n)
    lm = math.log(m)
    for k in range(1, grid.depth + 1):
        for ax in range(grid.n):
            v = np.repeat(v, 2, axis=ax)
        v = v * np.exp(rng.uniform(-lm, lm, v.shape)) if lm > 0 else v
    v = v.reshape(-1)
    return v / v.mean(), {"m": m}


def degenerate_weight(grid: DyadicGrid, rng: np.random.Generator, m: float = 2.0, **_) -> tuple[np.ndarray, dict]:
    """A cascade weight vanishing on one random finest cell."""
    v, meta = cascade_weight(grid, rng, m)
    v = v.copy()
    cell = int(rng.integers(grid.size))
    v[cell] = 0.0
    return v, {**meta, "zero_cell": cell}


WEIGHT_GENERATORS = {"power": power_weight, "cascade": cascade_weight, "degenerate": degenerate_weight}


# --- f generators ----------------------------------------------------------------------

def spike_f(grid: DyadicGrid, rng: np.random.Generator) -> tuple[np.ndarray, dict]:
    """``c * 1_cell``."""
    cell = int(rng.integers(grid.size))
    c = float(rng.lognormal(0.0, 1.0))
    v = np.zeros(grid.size)
    v[cell] = c
    return v, {"cell": cell, "c": c}


def random_f(grid: DyadicGrid, rng: np.random.Generator) -> tuple[np.ndarray, dict]:
    """Heavy-tailed (Pareto, index 1.5) values on a random half of the cells."""
    v = rng.pareto(1.5, grid.size) * (rng.random(grid.size) < 0.5)
    if not v.any():
        v[int(rng.integers(grid.size))] = 1.0
    return v, {}


def block_f(grid: DyadicGrid, rng: np.random.Generator) -> tuple[np.ndarray, dict]:
    """Constant on a random dyadic cube."""
    level = int(rng.integers(grid.depth + 1))
    idx = tuple(int(i) for i in rng.integers(1 << level, size=grid.n))
    c = float(rng.lognormal(0.0, 1.0))
    return c * grid.mask(Cube(level, idx)).astype(float), {"level": level, "index": list(idx), "c": c}


F_GENERATORS = {"spike": spike_f, "random": random_f, "block": block_f}


@dataclass(frozen=True, eq=False)
class Instance:
    id: str
    grid: DyadicGrid
    f: GridFunction
    w: GridFunction
    sigma: GridFunction
    meta: dict = field(default_factory=dict)

    @property
    def u(self) -> GridFunction:
        return self.w

    @property
    def degenerate(self) -> bool:
        return bool(self.meta.get("degenerate", False))

    def descriptor(self) -> dict:
        g = self.grid
        return {"id": self.id, "n": g.n, "depth": g.depth, **self.meta}


@dataclass(frozen=True, eq=False)
class Corpus:
    seed: int
    spec: CorpusSpec
    instances: tuple[Instance, ...]

    def __iter__(self):
        return iter(self.instances)

    def __len__(self):
        return len(self.instances)


def make_instance(seed: int, spec: CorpusSpec, i: int) -> Instance:
    rng = np.random.default_rng([seed, i])
    grid = DyadicGrid(spec.n, spec.depth)
    wname = spec.weights[i % len(spec.weights)]
    fname = spec.f[(i // len(spec.weights)) % len(spec.f)]
    m = spec.m[(i // (len(spec.weights) * len(spec.f))) % len(spec.m)]
    wv, wmeta = WEIGHT_GENERATORS[wname](grid, rng, m=m)
    sv, smeta = WEIGHT_GENERATORS[wname if wname != "degenerate" else "cascade"](grid, rng, m=m)
    fv, fmeta = F_GENERATORS[fname](grid, rng)
    meta = {"seed": seed, "index": i, "weight": wname, "f_kind": fname,
            "w_params": wmeta, "sigma_params": smeta, "f_params": fmeta,
            "degenerate": wname == "degenerate"}
    return Instance(f"s{seed}-n{spec.n}d{spec.depth}-{i:04d}", grid, GridFunction(grid, fv),
                    GridFunction(grid, wv, weight=True), GridFunction(grid, sv, weight=True), meta)


def corpus_generate(seed: int, spec: CorpusSpec | str) -> Corpus:
    if isinstance(spec, str):
        spec = parse_corpus_spec(spec)
    return Corpus(seed, spec, tuple(make_instance(seed, spec, i) for i in range(spec.count)))
