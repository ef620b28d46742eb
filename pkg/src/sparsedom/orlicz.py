"""Young functions, Luxemburg norms, tail integrals and O'Neil's Hölder constant.

Every Young function is evaluated in log coordinates: ``log_eval(x)`` returns
``log A(exp(x))`` and ``elasticity(x)`` returns ``t A'(t) / A(t)`` at
``t = exp(x)`` (right derivative at kinks).  Working in ``x = log t`` keeps the
tail integrals and the numeric Legendre transform finite far beyond the range
where ``A`` itself would overflow.

``log+ t = max(0, ln t)`` uses the natural logarithm throughout.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .dyadic import Cube, GridFunction, level_blocks

__all__ = [
    "YoungFunction", "Power", "ScaledPower", "LogBump", "LogLogBump", "EpsBump",
    "Transformed", "NumericConjugate", "LuxemburgResult",
    "evaluate", "inverse", "derivative", "conjugate", "luxemburg_norm", "luxemburg_rows",
    "luxemburg_segments",
    "alpha_p", "beta_p", "holder_kappa", "holder_triple", "is_young",
    "parse_young", "DEFAULT_T_GRID",
]

DEFAULT_T_GRID = np.logspace(-8, 8, 200)
GRID_PER_DECADE = 512
LUX_MAX_ITER = 200
_BIG = 1e300


def _bisect_increasing(fn, target, lo, hi, iters=200, rtol=1e-16):
    """Smallest ``x`` with ``fn(x) >= target`` for a nondecreasing ``fn``.

    Vectorised over ``target``; the bracket ``[lo, hi]`` is widened by
    doubling until ``fn(lo) < target <= fn(hi)``.
    """
    target = np.asarray(target, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), target.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), target.shape).copy()
    with np.errstate(over="ignore", invalid="ignore"):
        return _bisect_body(fn, target, lo, hi, iters, rtol)


def _bisect_body(fn, target, lo, hi, iters, rtol):
    step = np.maximum(hi - lo, 1.0)
    for _ in range(2000):
        bad = fn(lo) >= target
        if not bad.any():
            break
        lo[bad] -= step[bad]
        step[bad] *= 2
    step = np.maximum(hi - lo, 1.0)
    for _ in range(2000):
        bad = fn(hi) < target
        if not bad.any():
            break
        hi[bad] += step[bad]
        step[bad] *= 2
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        up = fn(mid) >= target
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
        if np.all(hi - lo <= rtol * np.maximum(1.0, np.abs(hi))):
            break
    return hi


class YoungFunction:
    """Base class; subclasses are frozen dataclasses and therefore hashable."""

    # -- required in subclasses ------------------------------------------------
    def log_eval(self, x):
        raise NotImplementedError

    def elasticity(self, x):
        raise NotImplementedError

    def growth(self) -> tuple[float, float, float]:
        """Exponents ``(q, a, b)`` with ``A(t) ~ t^q (log t)^a (log log t)^b`` at infinity."""
        raise NotImplementedError

    def near_zero(self) -> tuple[float, float]:
        """``(q0, c0)`` with ``A(t) = c0 t^q0`` for small ``t``."""
        raise NotImplementedError

    @property
    def spec(self) -> str:
        raise NotImplementedError

    # -- derived ---------------------------------------------------------------
    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        pos = t > 0
        with np.errstate(over="ignore", divide="ignore"):
            out[pos] = np.exp(self.log_eval(np.log(np.minimum(t[pos], _BIG))))
        return out if out.ndim else float(out)

    def zero_level(self) -> float:
        """``sup{t : A(t) = 0}``."""
        return 0.0

    def log_inverse(self, y):
        """``log A^{-1}(exp(y))`` for finite ``y``."""
        y = np.asarray(y, dtype=float)
        return _bisect_increasing(self.log_eval, y, np.full(y.shape, -1.0), np.full(y.shape, 1.0))

    def inverse(self, s):
        """Right-continuous generalised inverse."""
        s = np.asarray(s, dtype=float)
        out = np.full(s.shape, self.zero_level())
        pos = s > 0
        if pos.any():
            out[pos] = np.exp(self.log_inverse(np.log(s[pos])))
        return out if out.ndim else float(out)

    def derivative(self, t):
        """Right derivative ``A'(t)``."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        pos = t > 0
        x = np.log(t[pos])
        with np.errstate(over="ignore"):
            out[pos] = np.exp(self.log_eval(x) - x) * self.elasticity(x)
        zero = ~pos
        if zero.any():
            q0, c0 = self.near_zero()
            out[zero] = c0 if q0 == 1 else 0.0
        return out if out.ndim else float(out)

    def log_gap(self, x):
        """``log(1 - 1 / elasticity(x))``."""
        with np.errstate(divide="ignore"):
            return np.log1p(-1.0 / self.elasticity(x))

    def log_derivative(self, x):
        """``log A'(exp(x))`` (right derivative)."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return self.log_eval(x) - x + np.log(self.elasticity(x))

    def __str__(self):
        return self.spec


def _fmt(v: float) -> str:
    return repr(float(v)).rstrip("0").rstrip(".") if float(v) != int(v) else str(int(v))


class _LogPower(YoungFunction):
    """``scale * t^q * (1 + log+ t)^a * (1 + log(1 + log+ t))^b``."""

    def _params(self) -> tuple[float, float, float, float]:
        raise NotImplementedError

    def __call__(self, t):
        q, a, b, c = self._params()
        t = np.minimum(np.asarray(t, dtype=float), _BIG)
        lp = np.log1p(np.log(np.maximum(t, 1.0)))
        out = c * t ** q
        if a:
            out = out * np.exp(a * lp)
        if b:
            out = out * np.exp(b * np.log1p(lp))
        return out if np.ndim(out) else float(out)

    def log_eval(self, x):
        q, a, b, c = self._params()
        x = np.asarray(x, dtype=float)
        xp = np.log1p(np.maximum(x, 0.0))
        out = math.log(c) + q * x
        if a:
            out = out + a * xp
        if b:
            out = out + b * np.log1p(xp)
        return out

    def elasticity(self, x):
        q, a, b, _ = self._params()
        x = np.asarray(x, dtype=float)
        xp = np.minimum(np.maximum(x, 0.0), _BIG)
        extra = a / (1.0 + xp) + b / ((1.0 + xp) * (1.0 + np.log1p(xp)))
        return np.where(x >= 0, q + extra, q)

    def log_gap(self, x):
        q, a, b, _ = self._params()
        x = np.asarray(x, dtype=float)
        xp = np.minimum(np.maximum(x, 0.0), _BIG)
        extra = a / (1.0 + xp) + b / ((1.0 + xp) * (1.0 + np.log1p(xp)))
        excess = np.where(x >= 0, (q - 1.0) + extra, q - 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(excess) - np.log(self.elasticity(x))

    def log_derivative(self, x):
        # written out so that the large-x cancellation log A(t) - log t is avoided
        q, a, b, c = self._params()
        x = np.asarray(x, dtype=float)
        xp = np.log1p(np.maximum(x, 0.0))
        out = math.log(c) + (q - 1.0) * x + np.log(self.elasticity(x))
        if a:
            out = out + a * xp
        if b:
            out = out + b * np.log1p(xp)
        return out

    def log_inverse(self, y):
        q, a, b, c = self._params()
        y = np.asarray(y, dtype=float)
        base = (y - math.log(c)) / q
        if not a and not b:
            return base
        above = base > 0
        if not above.any():
            return base
        out = base.copy()
        out[above] = _bisect_increasing(self.log_eval, y[above], np.zeros(above.sum()),
                                        np.maximum(base[above], 1.0))
        return out

    def growth(self):
        q, a, b, _ = self._params()
        return (q, a, b)

    def near_zero(self):
        q, _, _, c = self._params()
        return (q, c)


@dataclass(frozen=True)
class Power(_LogPower):
    p: float

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError("Power requires p >= 1")

    def _params(self):
        return (self.p, 0.0, 0.0, 1.0)

    @property
    def spec(self):
        return f"power:p={_fmt(self.p)}"


@dataclass(frozen=True)
class ScaledPower(_LogPower):
    p: float

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError("ScaledPower requires p > 1")

    def _params(self):
        return (self.p, 0.0, 0.0, 1.0 / self.p)

    @property
    def spec(self):
        return f"scaledpower:p={_fmt(self.p)}"


@dataclass(frozen=True)
class LogBump(_LogPower):
    """``t^p (1 + log+ t)^a``.  Negative ``a`` gives an increasing but not
    necessarily convex function (used for tail integrals and Hölder factors)."""

    p: float
    a: float

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError("LogBump requires p >= 1")
        if self.p + min(self.a, 0.0) <= 0:
            raise ValueError("LogBump must be increasing: need p + a > 0")

    def _params(self):
        return (self.p, self.a, 0.0, 1.0)

    @property
    def spec(self):
        return f"logbump:p={_fmt(self.p)},a={_fmt(self.a)}"


@dataclass(frozen=True)
class LogLogBump(_LogPower):
    """``t^p (1 + log+ t)^{p-1} (1 + log+(1 + log+ t))^a``."""

    p: float
    a: float

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError("LogLogBump requires p >= 1")

    def _params(self):
        return (self.p, self.p - 1.0, self.a, 1.0)

    @property
    def spec(self):
        return f"loglogbump:p={_fmt(self.p)},a={_fmt(self.a)}"


@dataclass(frozen=True)
class EpsBump(_LogPower):
    """``t (1 + log+ t)^eps``: the Young function of ``L (log L)^eps``."""

    eps: float

    def __post_init__(self):
        if not self.eps >= 0:
            raise ValueError("EpsBump requires eps >= 0")

    def _params(self):
        return (1.0, self.eps, 0.0, 1.0)

    @property
    def spec(self):
        return f"epsbump:eps={_fmt(self.eps)}"


@dataclass(frozen=True)
class Transformed(YoungFunction):
    """``A_p(t) = A(t^{1/p})``."""

    inner: YoungFunction
    p: float

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError("Transformed requires p > 0")

    def log_eval(self, x):
        return self.inner.log_eval(np.asarray(x, dtype=float) / self.p)

    def elasticity(self, x):
        return self.inner.elasticity(np.asarray(x, dtype=float) / self.p) / self.p

    def log_derivative(self, x):
        x = np.asarray(x, dtype=float)
        return self.inner.log_derivative(x / self.p) + (1.0 / self.p - 1.0) * x - math.log(self.p)

    def log_inverse(self, y):
        return self.p * self.inner.log_inverse(y)

    def zero_level(self):
        return self.inner.zero_level() ** self.p

    def growth(self):
        q, a, b = self.inner.growth()
        return (q / self.p, a, b)

    def near_zero(self):
        q0, c0 = self.inner.near_zero()
        return (q0 / self.p, c0)

    @property
    def spec(self):
        return f"ap:inner=({self.inner.spec}),p={_fmt(self.p)}"


@dataclass(frozen=True, eq=False)
class NumericConjugate(YoungFunction):
    """Complementary function ``sup_t (s t - A(t))`` of a convex ``A``.

    The supremiser ``t*`` solves ``A'(t*) = s``; a table of ``log A'`` on a
    log grid (``GRID_PER_DECADE`` points per decade, monotone envelope) gives
    the starting bracket and bisection refines it.  Then
    ``Abar(s) = s t* (1 - A(t*) / (s t*))``.
    """

    inner: YoungFunction
    _ygrid: np.ndarray = field(init=False, repr=False)
    _table: np.ndarray = field(init=False, repr=False)
    _c0: float = field(init=False, repr=False)

    def __post_init__(self):
        q, a, b = self.inner.growth()
        if q < 1 or (q == 1 and a <= 0 and b <= 0):
            raise ValueError(f"conjugate of {self.inner.spec} is degenerate "
                             "(A(t)/t is bounded, so the complementary function is infinite)")
        q0, c0 = self.inner.near_zero()
        y = np.linspace(-20 * math.log(10), 20 * math.log(10), 40 * GRID_PER_DECADE + 1)
        table = np.maximum.accumulate(self.inner.log_derivative(y))
        object.__setattr__(self, "_ygrid", y)
        object.__setattr__(self, "_table", table)
        object.__setattr__(self, "_c0", float(c0) if q0 == 1 else 0.0)

    def __eq__(self, other):
        return isinstance(other, NumericConjugate) and self.inner == other.inner

    def __hash__(self):
        return hash(("conj", self.inner))

    def _supremiser(self, x):
        """``log t*`` for ``x = log s`` (array, all with ``s > c0``)."""
        x = np.asarray(x, dtype=float)
        y, tab = self._ygrid, self._table
        idx = np.searchsorted(tab, x, side="left")
        inside = (idx > 0) & (idx < len(y))
        lo = np.where(inside, y[np.clip(idx - 1, 0, len(y) - 1)], y[0] - 1.0)
        hi = np.where(inside, y[np.clip(idx, 0, len(y) - 1)], y[-1] + 1.0)
        lo = np.where(idx >= len(y), y[-1], lo)
        hi = np.where(idx <= 0, y[0], hi)
        return _bisect_increasing(self.inner.log_derivative, x, lo, hi)

    def _parts(self, x):
        x = np.asarray(x, dtype=float)
        ys = self._supremiser(x)
        # rho = A(t*) / (s t*) = (A'(t*) / s) / elasticity(t*); exact at kinks too
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            rho = np.exp(self.inner.log_derivative(ys) - x - np.log(self.inner.elasticity(ys)))
        return ys, rho

    def _active(self, x):
        return x > (math.log(self._c0) if self._c0 > 0 else -np.inf)

    def _log_gap(self, x):
        """``ys`` and ``log(1 - rho)``; near ``rho = 1`` the gap is read off
        the elasticity at ``t*`` rather than formed by cancellation."""
        ys, rho = self._parts(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            gap = np.log1p(-np.minimum(rho, 1.0))
            near = rho > 1 - 1e-6
            if near.any():
                gap = np.where(near, self.inner.log_gap(ys), gap)
        return ys, gap

    def log_eval(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, -np.inf)
        act = self._active(x)
        if act.any():
            ys, gap = self._log_gap(x[act])
            # a supremiser beyond double range means the value overflows too
            out[act] = np.where(np.isposinf(ys), np.inf, x[act] + ys + gap)
        return out

    def elasticity(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, np.inf)
        act = self._active(x)
        if act.any():
            _, gap = self._log_gap(x[act])
            with np.errstate(over="ignore"):
                out[act] = np.exp(-gap)
        return out

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape)
        pos = s > self._c0
        if pos.any():
            out[pos] = np.exp(self._supremiser(np.log(s[pos])))
        return out if out.ndim else float(out)

    def log_derivative(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, -np.inf)
        act = self._active(x)
        if act.any():
            out[act] = self._supremiser(x[act])
        return out

    def zero_level(self):
        return self._c0

    def log_inverse(self, y):
        y = np.asarray(y, dtype=float)
        start = math.log(self._c0) + 1e-3 if self._c0 > 0 else 0.0
        return _bisect_increasing(self.log_eval, y, np.full(y.shape, start - 1.0),
                                  np.full(y.shape, start + 1.0))

    def growth(self):
        q, a, b = self.inner.growth()
        if q == 1:
            return (math.inf, 0.0, 0.0)
        qc = q / (q - 1)
        return (qc, -a * (qc - 1), -b * (qc - 1))

    def near_zero(self):
        q0, c0 = self.inner.near_zero()
        if q0 == 1:
            return (math.inf, 0.0)
        qc = q0 / (q0 - 1)
        return (qc, (q0 - 1) * q0 ** (-qc) * c0 ** (1 - qc))

    @property
    def spec(self):
        return f"conj:inner=({self.inner.spec})"


# --- spec operations ----------------------------------------------------------

def evaluate(A: YoungFunction, t):
    return A(t)


def inverse(A: YoungFunction, s):
    return A.inverse(s)


def derivative(A: YoungFunction, t):
    return A.derivative(t)


@lru_cache(maxsize=256)
def conjugate(A: YoungFunction) -> YoungFunction:
    """Complementary Young function; closed form for ``ScaledPower``."""
    if isinstance(A, ScaledPower):
        return ScaledPower(A.p / (A.p - 1))
    if isinstance(A, NumericConjugate):
        return A.inner
    return NumericConjugate(A)


def is_young(A: YoungFunction, t_grid=None, tol: float = 1e-9) -> bool:
    """Spot check: A(0)=0, monotone, midpoint convex, A(e t) <= e A(t)."""
    t = DEFAULT_T_GRID if t_grid is None else np.asarray(t_grid)
    if A(0.0) != 0:
        return False
    v = A(t)
    with np.errstate(invalid="ignore"):
        if np.any(np.diff(v) < -tol * np.abs(v[1:])):
            return False
    a, b = np.meshgrid(t, t)
    a, b = a.ravel(), b.ravel()
    mid = A(0.5 * (a + b))
    if np.any(mid > 0.5 * (A(a) + A(b)) * (1 + tol)):
        return False
    for e in (0.1, 0.5, 0.9):
        if np.any(A(e * t) > e * v * (1 + tol)):
            return False
    return True


# --- Luxemburg norms ---------------------------------------------------------

@dataclass(frozen=True)
class LuxemburgResult:
    value: float
    iterations: int
    bracket_width: float


def luxemburg_segments(values: np.ndarray, seg: np.ndarray, nseg: int, A: YoungFunction,
                       rtol: float = 4e-16):
    """Luxemburg norms of ``nseg`` groups of equal-volume cells.

    ``seg[i]`` names the group of ``values[i]``; groups are solved together.
    Returns ``(values, iterations, widths)``.  Solves ``mean A(|f|/lam) = 1``
    by bisection in ``log lam``; the map is strictly decreasing wherever it
    is positive.
    """
    vals = np.abs(np.asarray(values, dtype=float))
    seg = np.asarray(seg, dtype=np.int64)
    counts = np.bincount(seg, minlength=nseg).astype(float)
    peak = np.zeros(nseg)
    np.maximum.at(peak, seg, vals)
    active = peak > 0
    out = np.zeros(nseg)
    widths = np.zeros(nseg)
    if not active.any():
        return out, 0, widths
    # restrict to cells of active groups, relabelled 0..m-1
    keep = active[seg]
    relabel = np.cumsum(active) - 1
    s = relabel[seg[keep]]
    v = vals[keep]
    cnt = counts[active]
    m = int(active.sum())
    pk = peak[active]
    a1 = float(A.inverse(1.0))
    lo = pk / a1 / 2.0 ** 40
    hi = pk * max(1.0, 1.0 / a1) * 2.0

    def phi(lam):
        with np.errstate(over="ignore"):
            return np.bincount(s, A(v / lam[s]), minlength=m) / cnt

    for _ in range(400):
        bad = phi(lo) <= 1.0
        if not bad.any():
            break
        lo[bad] /= 2.0 ** 20
    for _ in range(400):
        bad = phi(hi) > 1.0
        if not bad.any():
            break
        hi[bad] *= 2.0
    it = 0
    while it < LUX_MAX_ITER:
        it += 1
        mid = np.sqrt(lo * hi)
        big = phi(mid) > 1.0
        lo = np.where(big, mid, lo)
        hi = np.where(big, hi, mid)
        if np.all(hi / lo - 1.0 <= rtol):
            break
    else:
        if np.any(hi / lo - 1.0 > 1e-9):
            raise RuntimeError(f"Luxemburg bisection did not converge for {A.spec}")
    out[active] = hi
    widths[active] = hi - lo
    return out, it, widths


def luxemburg_rows(rows: np.ndarray, A: YoungFunction, rtol: float = 4e-16):
    """Luxemburg norms of every row of ``rows`` (rows are equal-volume cells)."""
    rows = np.asarray(rows, dtype=float)
    m, k = rows.shape
    return luxemburg_segments(rows.reshape(-1), np.repeat(np.arange(m), k), m, A, rtol)


def luxemburg_norm(f: GridFunction, Q: Cube, A: YoungFunction) -> LuxemburgResult:
    f.grid.check_cube(Q)
    row = level_blocks(f.values, f.grid, Q.level)[f.grid.flat_index(Q)]
    vals, it, widths = luxemburg_rows(row[None, :], A)
    return LuxemburgResult(float(vals[0]), it, float(widths[0]))


# --- tail integrals ----------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)


def _gauss(g, a: float, b: float, pieces: int) -> float:
    edges = np.linspace(a, b, pieces + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    nodes = (mids + half * _GL_X[None, :]).ravel()
    vals = g(nodes).reshape(pieces, -1)
    return float(np.sum(vals * (half * _GL_W[None, :])))


def _upper_tail_integral(g, x0: float, x_max: float = 1e6) -> float:
    """``int_{x0}^inf g(x) dx`` for ``g`` smooth on ``x > 0`` and ``x < 0``.

    Substitutes ``x = x0 + expm1(v)`` so that both exponential and power-law
    decay are resolved; beyond ``x0 + x_max`` the tail is extrapolated from a
    power law in ``1 + x - x0`` with a first-order correction.
    """
    def h(v):
        return g(x0 + np.expm1(v)) * np.exp(v)

    V = math.log1p(x_max)
    total = 0.0
    if x0 < 0:
        vb = math.log1p(-x0)
        total += _gauss(h, 0.0, vb, max(8, int(4 * vb) + 1))
        total += _gauss(h, vb, V, max(8, int(4 * (V - vb)) + 1))
    else:
        total += _gauss(h, 0.0, V, max(8, int(4 * V) + 1))
    # fit g ~ C L^kappa (1 + d / L), L = 1 + x - x0, at three points; the
    # 1/L correction captures mixed power terms such as L^-a + a L^-a-1
    L = np.array([0.25, 0.5, 1.0]) * x_max + 1.0
    gs = g(x0 + L - 1.0)
    if gs[-1] == 0.0 or not np.all(np.isfinite(gs)):
        return total if np.all(np.isfinite(gs)) else math.inf
    if np.any(gs <= 0):
        return total
    M = np.column_stack([np.ones(3), np.log(L), 1.0 / L])
    lnc, kappa, d = np.linalg.solve(M, np.log(gs))
    if kappa >= -1.0:
        return math.inf
    Lm = L[-1]
    C = math.exp(lnc)
    return total + C * (Lm ** (kappa + 1) / (-kappa - 1.0) + d * Lm ** kappa / (-kappa))


def _lower_tail_integral(g, x1: float) -> float:
    """``int_{-inf}^{x1} g`` for exponentially decaying ``g`` at ``-inf``."""
    a = x1 - 60.0
    body = _gauss(g, a, x1, 60)
    ga, gb = float(g(np.array([a]))[0]), float(g(np.array([a + 1.0]))[0])
    if ga == 0.0:
        return body
    rate = math.log(gb / ga)
    if rate <= 0:
        return math.inf
    return body + ga / rate


def _divergent_at_infinity(growth, p: float) -> bool:
    q, a, b = growth
    if q > p + 1e-12:
        return True
    if abs(q - p) <= 1e-12:
        if a > -1 + 1e-12:
            return True
        if abs(a + 1) <= 1e-12 and b >= -1:
            return True
    return False


@lru_cache(maxsize=512)
def alpha_p(A: YoungFunction, p: float) -> float:
    """``(int_1^inf A(t)/t^p dt/t)^{1/p}``; ``inf`` when the tail diverges."""
    if not p > 1:
        raise ValueError("alpha_p requires p > 1")
    if _divergent_at_infinity(A.growth(), p):
        return math.inf

    def g(x):
        with np.errstate(under="ignore", over="ignore"):
            return np.exp(A.log_eval(x) - p * x)

    val = _upper_tail_integral(g, 0.0)
    return val ** (1.0 / p) if np.isfinite(val) else math.inf


@lru_cache(maxsize=512)
def beta_p(B: YoungFunction, p: float) -> float:
    """``(int_{B(1)}^inf (t / Bbar(t))^p dBbar(t))^{1/p}`` with ``Bbar = conj(B)``.

    With ``t = e^x`` the Stieltjes measure is ``Bbar(t) el(x) dx`` where
    ``el`` is the elasticity of ``Bbar``.
    """
    if not p > 1:
        raise ValueError("beta_p requires p > 1")
    Bbar = conjugate(B)
    q, a, b = Bbar.growth()
    # integrand ~ t^{p - (p-1) q} (log t)^{-(p-1) a} at infinity
    if _divergent_at_infinity((p - (p - 1) * q, -(p - 1) * a, -(p - 1) * b), 0.0):
        return math.inf

    def g(x):
        L = Bbar.log_eval(x)
        with np.errstate(under="ignore", over="ignore", invalid="ignore"):
            out = np.exp(p * x - (p - 1) * L) * Bbar.elasticity(x)
        return np.where(np.isfinite(L), out, 0.0)

    b1 = float(B(1.0))
    if b1 > 0 and b1 <= Bbar.zero_level():
        # Bbar vanishes at the lower limit: the integrand behaves like
        # Bbar^{-p} dBbar there, which is not integrable
        return math.inf
    if b1 > 0:
        val = _upper_tail_integral(g, math.log(b1))
    else:
        val = _lower_tail_integral(g, 0.0) + _upper_tail_integral(g, 0.0)
    return val ** (1.0 / p) if np.isfinite(val) else math.inf


# --- O'Neil Hölder -----------------------------------------------------------

@lru_cache(maxsize=256)
def _holder_kappa_default(A, B, C):
    return holder_kappa(A, B, C, DEFAULT_T_GRID)


def holder_kappa(A: YoungFunction, B: YoungFunction, C: YoungFunction, t_grid=None) -> float:
    """``max_t B^{-1}(t) C^{-1}(t) / A^{-1}(t)`` over a log grid.

    Returns ``inf`` if the log-log slope of the ratio over the last decade
    exceeds 0.01, i.e. the ratio grows like a power of ``t``.
    """
    if t_grid is None:
        return _holder_kappa_default(A, B, C)
    t = np.asarray(t_grid, dtype=float)
    lt = np.log(t)
    lr = B.log_inverse(lt) + C.log_inverse(lt) - A.log_inverse(lt)
    tail = lt >= lt[-1] - math.log(10)
    if tail.sum() >= 2:
        slope = (lr[tail][-1] - lr[tail][0]) / (lt[tail][-1] - lt[tail][0])
        if slope > 0.01:
            return math.inf
    return float(np.exp(lr.max()))


@dataclass(frozen=True)
class HolderTriple:
    A: YoungFunction
    B: YoungFunction
    C: YoungFunction
    eps: float
    eta: float


def holder_triple(p: float, delta: float, eps: float | None = None) -> HolderTriple:
    """Factorisation of ``t (1 + log+ t)^eps`` into a ``p``-bump and its partner.

    ``B = LogBump(p, p - 1 + delta)``, ``C = LogBump(p', -1 - (p' - 1) eta)``
    with ``eta = delta - p eps``; ``eps`` defaults to ``delta / (2p)``.
    """
    eps = delta / (2 * p) if eps is None else eps
    eta = delta - p * eps
    if not eta > 0:
        raise ValueError("need eps < delta / p")
    pc = p / (p - 1)
    return HolderTriple(EpsBump(eps), LogBump(p, p - 1 + delta),
                        LogBump(pc, -1 - (pc - 1) * eta), eps, eta)


# --- CLI / config names --------------------------------------------------------

_SIMPLE = {
    "power": (Power, ("p",)),
    "scaledpower": (ScaledPower, ("p",)),
    "logbump": (LogBump, ("p", "a")),
    "loglogbump": (LogLogBump, ("p", "a")),
    "epsbump": (EpsBump, ("eps",)),
}


def _split_inner(body: str) -> tuple[str, str]:
    """Split ``inner=...`` off ``body``; returns (inner spec, remaining params)."""
    m = re.search(r"(^|,)inner=", body)
    if not m:
        raise ValueError(f"missing inner= in {body!r}")
    before = body[:m.start()]
    rest = body[m.end():]
    if rest.startswith("("):
        depth = 0
        for i, ch in enumerate(rest):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0:
                inner, after = rest[1:i], rest[i + 1:]
                break
        else:
            raise ValueError(f"unbalanced parentheses in {body!r}")
    else:
        tail = re.search(r",p=[^,():]+$", rest)
        if tail and ":" in rest[:tail.start()]:
            inner, after = rest[:tail.start()], rest[tail.start():]
        else:
            inner, after = rest, ""
    params = ",".join(s for s in (before, after.lstrip(",")) if s)
    return inner, params


def _kv(body: str) -> dict[str, float]:
    out = {}
    for part in filter(None, body.split(",")):
        k, sep, v = part.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {part!r}")
        out[k.strip()] = float(v)
    return out


def parse_young(spec: str) -> YoungFunction:
    """Parse names like ``logbump:p=2,a=1.5`` or ``ap:inner=(epsbump:eps=1),p=2``."""
    spec = spec.strip()
    name, _, body = spec.partition(":")
    name = name.lower()
    if name in _SIMPLE:
        cls, keys = _SIMPLE[name]
        kv = _kv(body)
        if set(kv) != set(keys):
            raise ValueError(f"{name} expects parameters {keys}, got {sorted(kv)}")
        return cls(*(kv[k] for k in keys))
    if name == "ap":
        inner, rest = _split_inner(body)
        kv = _kv(rest)
        if set(kv) != {"p"}:
            raise ValueError("ap expects inner=<spec>,p=<real>")
        return Transformed(parse_young(inner), kv["p"])
    if name == "conj":
        inner, rest = _split_inner(body)
        if rest:
            raise ValueError("conj expects only inner=<spec>")
        return conjugate(parse_young(inner))
    raise ValueError(f"unknown Young function family {name!r}")
