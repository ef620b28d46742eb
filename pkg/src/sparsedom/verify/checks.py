"""One verifier per quantitative estimate.

Verifiers whose inequality has an explicit constant fold that constant into
``rhs`` and assert ``ratio <= 1``.  Verifiers whose constant is anonymous
carry ``bound=None`` unless a regression baseline is supplied, in which case
the bound is ``baseline * 1.05``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..dyadic import GridFunction, integrate
from ..maximal import dyadic_maximal, orlicz_maximal, cube_norms, restricted_maximal
from ..orlicz import (EpsBump, LogBump, Power, Transformed, beta_p, alpha_p, conjugate,
                      holder_kappa, holder_triple)
from ..rdf import rdf_build
from ..sparse import (SparseFamily, apply_sparse, carleson_constant, cz_decompose,
                      sparse_from_cz, stopping_cubes)
from ..weights import ainfty_constant, reverse_holder_check
from .norms import lp_norm, weak_norm

__all__ = [
    "VerificationReport", "make_report", "default_family", "endpoint_parameters",
    "verify_lemma41", "verify_carleson", "verify_fs", "verify_endpoint", "verify_lp",
    "verify_cor14", "verify_two_weight_max", "verify_cor16a", "verify_cz",
    "verify_reverse_holder", "verify_rdf", "bump_constant", "VERIFIERS", "Verifier",
    "BASELINE_SLACK", "REL_SLACK",
]

REL_SLACK = 1e-9
BASELINE_SLACK = 1.05


@dataclass(frozen=True)
class VerificationReport:
    id: str
    lhs: float
    rhs: float
    ratio: float
    bound: float | None
    passed: bool
    params: dict = field(default_factory=dict)
    instance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"id": self.id, "lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio,
                "bound": self.bound, "pass": self.passed, "params": self.params,
                "instance": self.instance}


def make_report(id: str, lhs: float, rhs: float, bound: float | None,
                params: dict | None = None, instance: dict | None = None) -> VerificationReport:
    lhs, rhs = float(lhs), float(rhs)
    if rhs > 0:
        ratio = lhs / rhs
    else:
        ratio = 0.0 if lhs == 0 else math.inf
    passed = bound is not None and ratio <= bound * (1 + REL_SLACK)
    return VerificationReport(id, lhs, rhs, ratio, bound, bool(passed), dict(params or {}),
                              dict(instance or {}))


def _baseline_bound(baseline: float | None) -> float | None:
    return None if baseline is None else baseline * BASELINE_SLACK


def default_family(f: GridFunction) -> SparseFamily:
    """Sparse family from the CZ ladder started at ``2^-n avg_root |f|``."""
    lam0 = float(np.abs(f.values).mean()) / 2 ** f.grid.n
    return sparse_from_cz(f, lam0)


def endpoint_parameters(eps: float) -> tuple[float, float]:
    """``(p, delta)`` with ``p - 1 = eps / 2 = delta``."""
    return 1.0 + eps / 2, eps / 2


# --- explicit-constant verifiers -------------------------------------------------

def verify_lemma41(f, w, S, instance=None) -> VerificationReport:
    """``int T^S f w <= 8 [w]_{A_infty} int (M f) w``."""
    if np.any(f.values < 0):
        raise ValueError("lemma41 expects f >= 0")
    lhs = integrate(apply_sparse(S, f), w)
    ai = ainfty_constant(w)
    rhs = 8.0 * ai * integrate(dyadic_maximal(f).output, w)
    return make_report("lemma41", lhs, rhs, 1.0, {"ainfty": ai, "family_size": len(S)}, instance)


def verify_carleson(S, w, instance=None) -> VerificationReport:
    """Carleson constant of ``S`` against ``2 [w]_{A_infty}``."""
    K, R = carleson_constant(S, w)
    ai = ainfty_constant(w)
    return make_report("carleson", K, 2.0 * ai, 1.0,
                       {"ainfty": ai, "argmax_level": R.level, "argmax_index": list(R.index)}, instance)


def verify_fs(f, w, instance=None) -> VerificationReport:
    """``||M f||_{L^{1,oo}(w)} <= int |f| M w`` (dyadic constant 1)."""
    lhs = weak_norm(dyadic_maximal(f).output, w, 1.0)
    rhs = integrate(f.with_values(np.abs(f.values)), dyadic_maximal(w).output)
    return make_report("fs", lhs, rhs, 1.0, {}, instance)


# --- baseline verifiers -------------------------------------------------------------

def verify_endpoint(f, w, eps, S, baseline=None, instance=None) -> VerificationReport:
    """``||T^S f||_{L^{1,oo}(w)}`` against ``(1/eps) int |f| M_{L(log L)^eps} w``."""
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    lhs = weak_norm(apply_sparse(S, f), w, 1.0)
    Mw = orlicz_maximal(w, EpsBump(eps)).output
    rhs = integrate(f.with_values(np.abs(f.values)), Mw) / eps
    return make_report("endpoint", lhs, rhs, _baseline_bound(baseline), {"eps": eps}, instance)


def verify_lp(f, w, p, delta, S, baseline=None, instance=None) -> VerificationReport:
    """``||T^S f||_{L^p(w)}`` against ``p' beta_{p'}(conj A) ||f||_{L^p(M_{A_p} w)}``."""
    if not p > 1 or not 0 < delta <= 1:
        raise ValueError("need p > 1 and delta in (0, 1]")
    pp = p / (p - 1)
    A = LogBump(p, p - 1 + delta)
    beta = beta_p(conjugate(A), pp)
    MA = orlicz_maximal(w, Transformed(A, p)).output
    lhs = lp_norm(apply_sparse(S, f), w, p)
    rhs = pp * beta * lp_norm(f, MA, p)
    return make_report("lp", lhs, rhs, _baseline_bound(baseline),
                       {"p": p, "p_dual": pp, "delta": delta, "beta": beta}, instance)


def cor14_epsilon(ainfty: float) -> float:
    return 1.0 / math.log(math.e + ainfty)


def verify_cor14(f, w, S, tau, baseline=None, instance=None) -> list[VerificationReport]:
    """Main inequality plus the two pointwise steps of its proof.

    With ``eps = 1/log(e + [w]_{A_infty})`` and ``alpha eps = 1/(tau [w]_{A_infty})``,
    ``r = 1 + alpha eps`` equals the reverse Hölder exponent, and
    ``t(1+log+ t)^eps <= t + (e^{alpha eps}/alpha^eps) t^r`` gives
    ``M_{L(log L)^eps} w <= 2 (e^{alpha eps}/alpha^eps)^{1/r} M_{L^r} w``.
    The reverse Hölder step reads ``M_{L^r} w <= 2 M w``.
    """
    ai = ainfty_constant(w)
    eps = cor14_epsilon(ai)
    ae = 1.0 / (tau * ai)
    alpha = ae / eps
    r = 1.0 + ae
    Mw = dyadic_maximal(w).output
    lhs = weak_norm(apply_sparse(S, f), w, 1.0)
    rhs = math.log(math.e + ai) * integrate(f.with_values(np.abs(f.values)), Mw)
    params = {"ainfty": ai, "eps": eps, "alpha": alpha, "r": r, "tau": tau}
    main = make_report("cor14", lhs, rhs, _baseline_bound(baseline), params, instance)

    Meps = orlicz_maximal(w, EpsBump(eps)).output.values
    Mr = orlicz_maximal(w, Power(r)).output.values
    const = 2.0 * (math.exp(ae) / alpha ** eps) ** (1.0 / r)
    pos = Mr > 0
    step1 = make_report("cor14.bump_vs_power", float(np.max(Meps[pos] / (const * Mr[pos]), initial=0.0)),
                        1.0, 1.0, {**params, "constant": const}, instance)
    step2 = make_report("cor14.reverse_holder", float(np.max(Mr[pos] / (2.0 * Mw.values[pos]), initial=0.0)),
                        1.0, 1.0, params, instance)
    return [main, step1, step2]


def bump_constant(big: GridFunction, small: GridFunction, bump, p: float, bump_on_big: bool) -> float:
    """``max_Q ||big^{1/q}||_{bump,Q} (avg_Q small)^{1/q'}`` style testing constants.

    With ``bump_on_big`` the bump norm is taken of ``big^{1/p}`` and the average
    of ``small`` enters with power ``1/p'``; otherwise the average of ``big``
    enters with power ``1/p`` and the bump norm is of ``small^{1/p'}``.
    """
    from ..dyadic import level_means
    g = big.grid
    pp = p / (p - 1)
    if bump_on_big:
        norms = cube_norms(big.with_values(big.values ** (1 / p), weight=False), bump)
        means = level_means(small.values, g)
        terms = [a * b ** (1 / pp) for a, b in zip(norms, means)]
    else:
        norms = cube_norms(small.with_values(small.values ** (1 / pp), weight=False), bump)
        means = level_means(big.values, g)
        terms = [b ** (1 / p) * a for a, b in zip(norms, means)]
    return float(max(np.max(t) for t in terms))


def verify_two_weight_max(f, u, sigma, p, delta, baseline=None, instance=None) -> VerificationReport:
    """``||M(f sigma)||_{L^p(u)}`` against ``K beta_p(conj B) ||f||_{L^p(sigma)}``,
    ``B = LogBump(p', p' - 1 + delta)``."""
    if not p > 1 or not 0 < delta <= 1:
        raise ValueError("need p > 1 and delta in (0, 1]")
    if not np.any(sigma.values > 0):
        raise ValueError("sigma vanishes identically")
    pp = p / (p - 1)
    B = LogBump(pp, pp - 1 + delta)
    K = bump_constant(u, sigma, B, p, bump_on_big=False)
    beta = beta_p(conjugate(B), p)
    lhs = lp_norm(dyadic_maximal(f.with_values(f.values * sigma.values)).output, u, p)
    rhs = K * beta * lp_norm(f, sigma, p)
    return make_report("two_weight_max", lhs, rhs, _baseline_bound(baseline),
                       {"p": p, "delta": delta, "K": K, "beta": beta}, instance)


def verify_cor16a(f, u, sigma, p, delta, S=None, baseline=None, instance=None) -> list[VerificationReport]:
    """Weak-type two-weight bound for ``T^S(f sigma)`` with a log bump on ``u``,
    plus the stopping-cube, Hölder and tail pieces of its proof."""
    if not p > 1 or not 0 < delta <= 1:
        raise ValueError("need p > 1 and delta in (0, 1]")
    if not np.any(sigma.values > 0) or not np.any(u.values > 0):
        raise ValueError("degenerate weights")
    pp = p / (p - 1)
    fs = f.with_values(f.values * sigma.values)
    if not np.any(fs.values != 0):
        raise ValueError("f sigma vanishes identically")
    S = default_family(fs) if S is None else S
    A = LogBump(p, p - 1 + delta)
    K = bump_constant(u, sigma, A, p, bump_on_big=True)
    lhs = weak_norm(apply_sparse(S, fs), u, p)
    rhs = (1 / delta) ** (1 + 1 / pp) * K * lp_norm(f, sigma, p)
    params = {"p": p, "delta": delta, "K": K}
    out = [make_report("cor16a", lhs, rhs, _baseline_bound(baseline), params, instance)]

    tri = holder_triple(p, delta)
    kappa = holder_kappa(tri.A, tri.B, tri.C)
    g1 = fs.with_values(np.abs(fs.values))
    g2 = u.with_values(u.values ** (1 / p), weight=False)
    nA = cube_norms(g1.with_values(g1.values * g2.values), tri.A)
    nB, nC = cube_norms(g1, tri.B), cube_norms(g2, tri.C)
    worst = 0.0
    for a, b, c in zip(nA, nB, nC):
        den = 2 * kappa * b * c
        worst = max(worst, float(np.max(np.where(den > 0, a / np.where(den > 0, den, 1.0),
                                                 np.where(a > 0, math.inf, 0.0)))))
    tparams = {"p": p, "delta": delta, "eps": tri.eps, "eta": tri.eta, "kappa": kappa}
    out.append(make_report("cor16a.holder", worst, 1.0, 1.0, tparams, instance))

    st = stopping_cubes(fs, tri.A, 2 ** (fs.grid.n + 1) + 1)
    out.append(make_report("cor16a.stopping", st.alpha, 1.0, None,
                           {**tparams, "a": st.a, "layers": len(st.layers)}, instance))
    tail = alpha_p(tri.C, pp)
    out.append(make_report("cor16a.c_tail", tail, (1 / tri.eta) ** (1 / pp), None, tparams, instance))
    return out


# --- structural checks ---------------------------------------------------------------

def verify_cz(f, w, lam=None, instance=None) -> list[VerificationReport]:
    """Cancellation ``T^S b_j = 0`` off ``Q_j`` and exact constancy of
    ``M(w 1_{Omega~^c})`` on each parent cube (the parent stands in for ``3Q``)."""
    g = f.grid
    absf = np.abs(f.values)
    lam = max(float(absf.mean()), float(absf.max()) / 4) if lam is None else lam
    cz = cz_decompose(f, lam)
    S = default_family(f)
    leak = 0.0
    for Q, b in zip(cz.cubes, cz.bad):
        Tb = apply_sparse(S, b).values
        leak = max(leak, float(np.max(np.abs(Tb[~g.mask(Q)]), initial=0.0)))
    scale = float(absf.max()) * max(1, len(S)) * 1e-12
    out = [make_report("cz.cancellation", leak, scale, 1.0, {"lambda": lam, "cubes": len(cz.cubes)}, instance)]

    parents = {Q.parent() if Q.level > 0 else Q for Q in cz.cubes}
    omega = np.zeros(g.size, dtype=bool)
    for P in parents:
        omega |= g.mask(P)
    M = restricted_maximal(w, ~omega, Power(1.0)).output.values
    spread = 1.0
    for P in parents:
        v = M[g.mask(P)]
        if v.max() > 0:
            spread = max(spread, float(v.max() / v.min()) if v.min() > 0 else math.inf)
    out.append(make_report("cz.near_constancy", spread, 1.0, 1.0, {"lambda": lam}, instance))
    return out


def verify_reverse_holder(w, tau, instance=None) -> VerificationReport:
    rep = reverse_holder_check(w, tau)
    return make_report("reverse_holder", rep.ratio, 2.0, 1.0,
                       {"tau": tau, "r": rep.r, "ainfty": rep.ainfty, "min_tau": rep.min_tau}, instance)


def verify_rdf(h, v, s, tol=1e-10, instance=None) -> list[VerificationReport]:
    res = rdf_build(h, v, s, tol)
    below = float(np.max(h.values - res.R.values, initial=0.0))
    params = {"s": s, "K": res.K, "s_norm": res.s_norm, "a1": res.a1, "a1_over_s_dual": res.a1_ratio}
    return [
        make_report("rdf.majorant", below, 0.0, 0.0, params, instance),
        make_report("rdf.norm", res.R_norm, 2 * res.h_norm + tol, 1.0, params, instance),
        make_report("rdf.a1", res.a1, res.s_norm, None, params, instance),
    ]


# --- registry ------------------------------------------------------------------------

@dataclass(frozen=True)
class Verifier:
    id: str
    run: Callable
    params: tuple[str, ...]
    asserted: bool


def _ctx_family(inst, cache):
    if "S" not in cache:
        cache["S"] = default_family(inst.f)
    return cache["S"]


def _run_lemma41(inst, prm, cache, baselines):
    return [verify_lemma41(inst.f, inst.w, _ctx_family(inst, cache), inst.descriptor())]


def _run_carleson(inst, prm, cache, baselines):
    return [verify_carleson(_ctx_family(inst, cache), inst.w, inst.descriptor())]


def _run_fs(inst, prm, cache, baselines):
    return [verify_fs(inst.f, inst.w, inst.descriptor())]


def _run_endpoint(inst, prm, cache, baselines):
    return [verify_endpoint(inst.f, inst.w, prm["eps"], _ctx_family(inst, cache),
                            baselines.get("endpoint"), inst.descriptor())]


def _run_lp(inst, prm, cache, baselines):
    return [verify_lp(inst.f, inst.w, prm["p"], prm["delta"], _ctx_family(inst, cache),
                      baselines.get("lp"), inst.descriptor())]


def _run_cor14(inst, prm, cache, baselines):
    return verify_cor14(inst.f, inst.w, _ctx_family(inst, cache), prm["tau"],
                        baselines.get("cor14"), inst.descriptor())


def _run_two_weight(inst, prm, cache, baselines):
    return [verify_two_weight_max(inst.f, inst.u, inst.sigma, prm["p"], prm["delta"],
                                  baselines.get("two_weight_max"), inst.descriptor())]


def _run_cor16a(inst, prm, cache, baselines):
    key = "S_fsigma"
    if key not in cache:
        cache[key] = default_family(inst.f.with_values(inst.f.values * inst.sigma.values))
    return verify_cor16a(inst.f, inst.u, inst.sigma, prm["p"], prm["delta"], cache[key],
                         baselines.get("cor16a"), inst.descriptor())


def _run_cz(inst, prm, cache, baselines):
    return verify_cz(inst.f, inst.w, None, inst.descriptor())


def _run_rh(inst, prm, cache, baselines):
    return [verify_reverse_holder(inst.w, prm["tau"], inst.descriptor())]


def _run_rdf(inst, prm, cache, baselines):
    return verify_rdf(inst.f, inst.sigma, prm["s"], instance=inst.descriptor())


VERIFIERS: dict[str, Verifier] = {v.id: v for v in [
    Verifier("lemma41", _run_lemma41, (), True),
    Verifier("carleson", _run_carleson, (), True),
    Verifier("fs", _run_fs, (), True),
    Verifier("endpoint", _run_endpoint, ("eps",), False),
    Verifier("lp", _run_lp, ("p", "delta"), False),
    Verifier("cor14", _run_cor14, ("tau",), False),
    Verifier("two_weight_max", _run_two_weight, ("p", "delta"), False),
    Verifier("cor16a", _run_cor16a, ("p", "delta"), False),
    Verifier("cz", _run_cz, (), True),
    Verifier("reverse_holder", _run_rh, ("tau",), True),
    Verifier("rdf", _run_rdf, ("s",), True),
]}

BASELINE_IDS = ("endpoint", "lp", "cor14", "two_weight_max", "cor16a")
