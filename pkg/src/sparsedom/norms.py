"""Exact weighted strong and weak norms of piecewise-constant functions."""
from __future__ import annotations

import math

import numpy as np

from .dyadic import GridFunction

__all__ = ["lp_norm", "weak_norm", "dual_exponent"]


def _weight_values(f: GridFunction, w: GridFunction | None) -> np.ndarray:
    if w is None:
        return np.ones(f.grid.size)
    if w.grid != f.grid:
        raise ValueError("function and weight live on different grids")
    if np.any(w.values < 0):
        raise ValueError("weights must be nonnegative")
    return w.values


def lp_norm(f: GridFunction, w: GridFunction | None = None, p: float = 1.0) -> float:
    """``(int |f|^p w)^{1/p}``."""
    if not p >= 1:
        raise ValueError("p must be at least 1")
    wv = _weight_values(f, w)
    a = np.abs(f.values)
    top = float(a.max(initial=0.0))
    if top == 0:
        return 0.0
    return top * float(np.dot((a / top) ** p, wv) * f.grid.cell_volume) ** (1 / p)


def weak_norm(f: GridFunction, w: GridFunction | None = None, p: float = 1.0) -> float:
    """``sup_t t w(|f| > t)^{1/p}``, attained at a value ``v`` of ``|f|`` with
    the set ``{|f| >= v}``."""
    if not p >= 1:
        raise ValueError("p must be at least 1")
    wv = _weight_values(f, w)
    a = np.abs(f.values)
    order = np.argsort(-a, kind="stable")
    vals, mass = a[order], np.cumsum(wv[order]) * f.grid.cell_volume
    # last position of each distinct value in descending order
    last = np.flatnonzero(np.r_[vals[1:] != vals[:-1], True])
    v, m = vals[last], mass[last]
    keep = v > 0
    if not keep.any():
        return 0.0
    return float(np.max(v[keep] * m[keep] ** (1 / p)))


def dual_exponent(p: float) -> float:
    return math.inf if p == 1 else p / (p - 1)
