"""The Rubio de Francia iteration ``R h = sum_k 2^-k S^k h / ||S||^k``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dyadic import GridFunction
from .maximal import dyadic_maximal
from .norms import lp_norm
from .weights import a1_constant

__all__ = ["RdFResult", "s_operator", "rdf_build"]


def _check_v(v: GridFunction) -> None:
    if np.any(v.values <= 0):
        raise ValueError("v must be strictly positive on every cell")


def s_operator(f: GridFunction, v: GridFunction, s: float) -> GridFunction:
    """``S f = M(f v^{1/s}) / v^{1/s}``."""
    if not s > 1:
        raise ValueError("s must exceed 1")
    _check_v(v)
    vs = v.values ** (1 / s)
    M = dyadic_maximal(f.with_values(f.values * vs)).output.values
    return f.with_values(M / vs)


@dataclass(frozen=True)
class RdFResult:
    R: GridFunction
    K: int
    s_norm: float
    a1: float
    a1_ratio: float
    h_norm: float
    R_norm: float
    majorizes: bool
    norm_ok: bool
    tol: float

    @property
    def passed(self) -> bool:
        return self.majorizes and self.norm_ok and math.isfinite(self.a1)


def rdf_build(h: GridFunction, v: GridFunction, s: float, tol: float = 1e-10) -> RdFResult:
    """Truncated Rubio de Francia sum.

    ``||S||_{L^s(v)}`` is taken as the dyadic maximal bound ``s'``, so each
    normalized term has norm at most ``||h||`` and the tail after ``K`` terms
    is below ``2^-K ||h||``.
    """
    if not s > 1:
        raise ValueError("s must exceed 1")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if np.any(h.values < 0):
        raise ValueError("h must be nonnegative")
    _check_v(v)
    sp = s / (s - 1)
    hn = lp_norm(h, v, s)
    K = 0 if hn == 0 else max(0, math.floor(math.log2(hn / tol)) + 1)
    R = h.values.copy()
    term = h
    for k in range(1, K + 1):
        term = s_operator(term, v, s)
        term = term.with_values(term.values / sp)
        R += term.values * 0.5 ** k
    Rf = h.with_values(R, weight=False)
    Rn = lp_norm(Rf, v, s)
    if hn == 0:
        a1 = 1.0
    else:
        a1 = a1_constant(GridFunction(h.grid, R * v.values ** (1 / s), weight=True))
    return RdFResult(Rf, K, sp, a1, a1 / sp, hn, Rn, bool(np.all(R >= h.values)),
                     Rn <= 2 * hn + tol, tol)
