"""Dyadic weight characteristics and the structural weight lemmas.

Every supremum "over cubes" runs over all dyadic cubes of the grid, root
included.  Argmax cubes are the first cube in tree order (level, then
lexicographic index) whose value is within a relative ``1e-12`` of the
maximum, which keeps them stable under rescaling of the weight.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dyadic import Cube, DyadicGrid, GridFunction, expand, level_means, level_sums
from .maximal import dyadic_maximal, orlicz_maximal
from .orlicz import EpsBump, LogBump, LogLogBump, Power, ScaledPower, YoungFunction

__all__ = [
    "WeightConstants", "ReverseHolderReport", "CoifmanRochbergReport", "FactorizationReport",
    "a1_constant", "ap_constant", "ainfty_constant", "weight_constants",
    "reverse_holder_ratio", "reverse_holder_check", "coifman_rochberg_check",
    "factorization_check", "DEFAULT_FAMILIES",
]

_TIE = 1e-12


def _argmax_cube(levels: list[np.ndarray]) -> tuple[float, Cube | None]:
    best = max((float(np.max(x)) for x in levels if x.size), default=-math.inf)
    if not best > -math.inf:
        return best, None
    thresh = best if math.isinf(best) else best * (1 - _TIE)
    for k, x in enumerate(levels):
        hits = np.argwhere(x >= thresh)
        if hits.size:
            return best, Cube(k, tuple(int(i) for i in hits[0]))
    return best, None


def _require_weight(w: GridFunction) -> None:
    if np.any(w.values < 0):
        raise ValueError("weights must be nonnegative")
    if not np.any(w.values > 0):
        raise ValueError("weight vanishes identically")


def a1_constant_with_cube(w: GridFunction) -> tuple[float, Cube]:
    _require_weight(w)
    g = w.grid
    M = dyadic_maximal(w).output.values
    with np.errstate(divide="ignore"):
        ratio = np.where(w.values > 0, M / np.where(w.values > 0, w.values, 1.0), math.inf)
    val, Q = _argmax_cube([ratio.reshape(g.shape)])
    return val, Cube(g.depth, Q.index)


def a1_constant(w: GridFunction) -> float:
    """``max_cells M^d w / w``; ``inf`` if ``w`` vanishes on a cell."""
    return a1_constant_with_cube(w)[0]


def ap_constant_with_cube(w: GridFunction, p: float) -> tuple[float, Cube | None]:
    if not p > 1:
        raise ValueError("p must exceed 1")
    _require_weight(w)
    g = w.grid
    if np.any(w.values == 0):
        return math.inf, None
    pp = p / (p - 1)
    mw = level_means(w.values, g)
    md = level_means(w.values ** (1 - pp), g)
    return _argmax_cube([a * b ** (p - 1) for a, b in zip(mw, md)])


def ap_constant(w: GridFunction, p: float) -> float:
    """``max_Q (avg_Q w)(avg_Q w^{1-p'})^{p-1}``."""
    return ap_constant_with_cube(w, p)[0]


def _localized_maximal_integrals(w: GridFunction) -> list[np.ndarray]:
    """Per cube ``Q``, ``sum over cells of Q`` of the maximal function of ``w 1_Q``
    taken over sub-cubes of ``Q`` (in units of cells)."""
    g = w.grid
    means = level_means(w.values, g)
    out = []
    for j in range(g.depth + 1):
        cur = means[j]
        for k in range(j + 1, g.depth + 1):
            cur = np.maximum(expand(cur, g, k - 1, k), means[k])
        out.append(level_sums(cur.reshape(-1), g)[j])
    return out


def ainfty_constant_with_cube(w: GridFunction) -> tuple[float, Cube]:
    _require_weight(w)
    sums = level_sums(w.values, w.grid)
    loc = _localized_maximal_integrals(w)
    ratios = [np.where(s > 0, m / np.where(s > 0, s, 1.0), -math.inf) for s, m in zip(sums, loc)]
    return _argmax_cube(ratios)


def ainfty_constant(w: GridFunction) -> float:
    """Fujii–Wilson constant ``max_Q w(Q)^{-1} int_Q M(w 1_Q)`` (localized dyadic)."""
    return ainfty_constant_with_cube(w)[0]


@dataclass(frozen=True)
class WeightConstants:
    a1: float
    ap: float
    p: float
    ainfty: float
    a1_cube: Cube | None
    ap_cube: Cube | None
    ainfty_cube: Cube | None


def weight_constants(w: GridFunction, p: float = 2.0) -> WeightConstants:
    a1, q1 = a1_constant_with_cube(w)
    ap, qp = ap_constant_with_cube(w, p)
    ai, qi = ainfty_constant_with_cube(w)
    return WeightConstants(a1, ap, p, ai, q1, qp, qi)


# --- reverse Hölder ---------------------------------------------------------------

def reverse_holder_ratio(w: GridFunction, r: float) -> tuple[float, Cube | None]:
    """``max_Q (avg_Q w^r)^{1/r} / avg_Q w`` over cubes with ``w(Q) > 0``."""
    g = w.grid
    top = float(w.values.max())
    mw = level_means(w.values / top, g)
    mr = level_means((w.values / top) ** r, g)
    ratios = [np.where(a > 0, b ** (1 / r) / np.where(a > 0, a, 1.0), -math.inf) for a, b in zip(mw, mr)]
    return _argmax_cube(ratios)


def _sup_over_mean(w: GridFunction) -> float:
    g = w.grid
    mw = level_means(w.values, g)
    cur = w.values.reshape(g.shape)
    best = -math.inf
    for k in range(g.depth, -1, -1):
        if k < g.depth:
            half = 1 << k
            cur = cur.reshape((half, 2) * g.n).max(axis=tuple(range(1, 2 * g.n, 2)))
        a = mw[k]
        best = max(best, float(np.max(np.where(a > 0, cur / np.where(a > 0, a, 1.0), -math.inf))))
    return best


@dataclass(frozen=True)
class ReverseHolderReport:
    tau: float
    ainfty: float
    r: float
    ratio: float
    cube: Cube | None
    passed: bool
    min_tau: float


def _rh_exponent(tau: float, ainfty: float) -> float:
    return 1.0 + 1.0 / (tau * ainfty)


def reverse_holder_check(w: GridFunction, tau: float, bound: float = 2.0) -> ReverseHolderReport:
    """Reverse Hölder at ``r_w = 1 + 1/(tau [w]_{A_infty})`` with constant 2.

    ``min_tau`` is the smallest passing ``tau`` (bisection in ``log tau``,
    relative accuracy 1e-6, rounded up); 0 when every ``tau`` passes.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    _require_weight(w)
    ai = ainfty_constant(w)

    def ok(t):
        return reverse_holder_ratio(w, _rh_exponent(t, ai))[0] <= bound

    r = _rh_exponent(tau, ai)
    ratio, cube = reverse_holder_ratio(w, r)
    # as tau -> 0 the power means tend to max_Q w
    if _sup_over_mean(w) <= bound:
        min_tau = 0.0
    else:
        hi = max(tau, 1.0)
        while not ok(hi):
            hi *= 2
        lo = hi / 2
        while ok(lo) and lo > 1e-12:
            hi, lo = lo, lo / 2
        while hi / lo > 1 + 1e-6:
            mid = math.sqrt(lo * hi)
            lo, hi = (lo, mid) if ok(mid) else (mid, hi)
        min_tau = hi
    return ReverseHolderReport(tau, ai, r, ratio, cube, ratio <= bound, min_tau)


# --- Coifman–Rochberg ---------------------------------------------------------------

DEFAULT_FAMILIES: tuple[YoungFunction, ...] = (
    Power(1.0), Power(2.0), ScaledPower(2.0), LogBump(2.0, 1.5), LogLogBump(2.0, 1.0), EpsBump(0.5),
)


@dataclass(frozen=True)
class CoifmanRochbergReport:
    gamma: float
    a1: float
    envelope: dict = field(default_factory=dict)
    c_gamma: float = math.nan
    spread: float = math.nan
    passed: bool = False


def coifman_rochberg_check(u: GridFunction, A: YoungFunction, gamma: float,
                           families: tuple[YoungFunction, ...] = DEFAULT_FAMILIES) -> CoifmanRochbergReport:
    """A1 constant of ``(M_A u)^gamma`` plus the envelope over ``families``."""
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    if not np.any(u.values != 0):
        raise ValueError("u vanishes identically")

    def one(B):
        M = orlicz_maximal(u, B).output.values
        return a1_constant(GridFunction(u.grid, M ** gamma, weight=True))

    a1 = one(A)
    env = {B.spec: one(B) for B in families}
    env.setdefault(A.spec, a1)
    vals = list(env.values())
    c = max(vals)
    return CoifmanRochbergReport(gamma, a1, env, c, c / min(vals), math.isfinite(c))


# --- factorization -----------------------------------------------------------------

@dataclass(frozen=True)
class FactorizationReport:
    p: float
    ap: float
    bound: float
    passed: bool


def factorization_check(w1: GridFunction, w2: GridFunction, p: float) -> FactorizationReport:
    """``[w1 w2^{1-p}]_{A_p} <= [w1]_{A_1} [w2]_{A_1}^{p-1}``."""
    if w1.grid != w2.grid:
        raise ValueError("weights live on different grids")
    if np.any(w1.values <= 0) or np.any(w2.values <= 0):
        raise ValueError("factorization needs strictly positive weights")
    lhs = ap_constant(GridFunction(w1.grid, w1.values * w2.values ** (1 - p), weight=True), p)
    rhs = a1_constant(w1) * a1_constant(w2) ** (p - 1)
    return FactorizationReport(p, lhs, rhs, lhs <= rhs * (1 + 1e-9))
