import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sparsedom.dyadic import Cube, DyadicGrid, GridFunction
from sparsedom.orlicz import (DEFAULT_T_GRID, EpsBump, LogBump, LogLogBump, NumericConjugate, Power,
                              ScaledPower, Transformed, alpha_p, beta_p, conjugate, derivative,
                              evaluate, holder_kappa, holder_triple, inverse, is_young,
                              luxemburg_norm, parse_young)

from conftest import functions

FAMILIES = [Power(1.5), Power(2.0), Power(4.0), ScaledPower(2.0), ScaledPower(3.0),
            LogBump(2.0, 1.5), LogBump(1.5, 0.6), LogLogBump(2.0, 1.0), EpsBump(0.5), EpsBump(1.0),
            Transformed(EpsBump(1.0), 0.5)]
IDS = [A.spec for A in FAMILIES]


def bisect_oracle(fn, target, lo, hi, iters=400):
    """Plain-float bisection for an increasing map."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def epsbump1(t):
    return t * (1 + max(0.0, math.log(t))) if t > 0 else 0.0


# --- evaluation and inverses ----------------------------------------------------------

def test_power_two_evaluate_and_inverse():
    assert evaluate(Power(2), 3.0) == pytest.approx(9.0, rel=1e-14)
    assert inverse(Power(2), 9.0) == pytest.approx(3.0, rel=1e-14)


@pytest.mark.parametrize("p, a", [(1.5, 0.2), (2, 1), (3, 4), (2, -1.5)])
def test_log_bumps_equal_one_at_one(p, a):
    assert evaluate(LogBump(p, a), 1.0) == pytest.approx(1.0, rel=1e-15)


def test_epsbump_inverse_matches_oracle():
    oracle = bisect_oracle(epsbump1, 2.0, 1.0, 2.0)
    assert oracle == pytest.approx(1.4547, abs=5e-5)
    assert inverse(EpsBump(1.0), 2.0) == pytest.approx(oracle, rel=1e-12)


def test_inverse_of_zero_is_right_endpoint_of_zero_set():
    A = conjugate(LogBump(2.0, 1.5))
    # the conjugate vanishes only at 0 here, but Power(1)'s conjugate is flagged
    assert inverse(A, 0.0) == pytest.approx(A.zero_level(), abs=1e-15)
    with pytest.raises(ValueError):
        conjugate(Power(1.0))


@pytest.mark.parametrize("A", FAMILIES, ids=IDS)
def test_inverse_round_trip(A):
    t = np.logspace(-6, 6, 61)
    assert np.allclose(A.inverse(A(t)), t, rtol=1e-9)


@pytest.mark.parametrize("A", FAMILIES, ids=IDS)
def test_young_axioms(A):
    assert is_young(A)


def test_young_axioms_for_conjugates():
    for A in [LogBump(2.0, 1.5), EpsBump(0.5), LogLogBump(2.0, 1.0)]:
        assert is_young(conjugate(A), np.logspace(-4, 4, 60))


def test_is_young_rejects_concave_function():
    assert not is_young(LogBump(1.0, -0.5), np.logspace(-2, 6, 80))


@pytest.mark.parametrize("A", FAMILIES, ids=IDS)
def test_derivative_dominates_average_slope(A):
    t = np.logspace(-5, 5, 101)
    t = t[np.abs(t - 1) > 1e-9]
    assert np.all(A(t) <= t * derivative(A, t) * (1 + 1e-9))


def test_derivative_is_right_derivative_at_kink():
    A = LogBump(2.0, 1.0)
    # right derivative of t^2 (1 + log t) at 1 is 2 + 1
    assert derivative(A, 1.0) == pytest.approx(3.0, rel=1e-12)
    h = 1e-7
    assert (A(1 + h) - A(1.0)) / h == pytest.approx(3.0, rel=1e-5)


# --- conjugates ---------------------------------------------------------------------------

def test_scaledpower_two_is_self_dual():
    assert conjugate(ScaledPower(2.0)) == ScaledPower(2.0)
    assert conjugate(ScaledPower(3.0)) == ScaledPower(1.5)


def test_numeric_conjugate_of_scaledpower_matches_closed_form():
    s = np.logspace(-3, 3, 40)
    num = NumericConjugate(ScaledPower(3.0))
    assert np.allclose(num(s), ScaledPower(1.5)(s), rtol=1e-9)


@pytest.mark.parametrize("p", [1.25, 2.0, 4.0])
@pytest.mark.parametrize("delta", [0.1, 1.0])
def test_conjugate_of_log_bump_at_one(p, delta):
    pp = p / (p - 1)
    assert conjugate(LogBump(p, p - 1 + delta))(1.0) == pytest.approx((p - 1) * p ** (-pp), rel=1e-6)


def test_conjugate_value_two():
    assert conjugate(LogBump(2.0, 1.5))(1.0) == pytest.approx(0.25, rel=1e-6)


def test_double_conjugate_is_identity():
    A = LogBump(2.0, 1.5)
    assert conjugate(conjugate(A)) == A


@pytest.mark.parametrize("A", FAMILIES, ids=IDS)
def test_inverse_product_sandwich(A):
    t = DEFAULT_T_GRID
    prod = A.inverse(t) * conjugate(A).inverse(t)
    assert np.all(t <= prod * (1 + 1e-9)) and np.all(prod <= 2 * t * (1 + 1e-9))


@pytest.mark.parametrize("A", FAMILIES, ids=IDS)
def test_young_inequality_on_product_grid(A):
    t = np.logspace(-4, 4, 41)
    s, tt = np.meshgrid(t, t)
    B = conjugate(A)
    assert np.all(s * tt <= (A(tt) + B(s)) * (1 + 1e-9))


# --- Luxemburg norms -----------------------------------------------------------------------

def test_luxemburg_power_one_is_average():
    g = DyadicGrid(1, 3)
    f = GridFunction(g, [1, -2, 3, 0, 0, 5, 1, 1])
    assert luxemburg_norm(f, g.root, Power(1.0)).value == pytest.approx(13 / 8, rel=1e-12)
    assert luxemburg_norm(f, Cube(1, (0,)), Power(1.0)).value == pytest.approx(6 / 4, rel=1e-12)


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_luxemburg_power_closed_form(p, rng):
    g = DyadicGrid(2, 3)
    f = GridFunction(g, rng.lognormal(size=g.size))
    Q = Cube(1, (1, 0))
    exact = np.mean(np.abs(f.values[g.mask(Q)]) ** p) ** (1 / p)
    assert luxemburg_norm(f, Q, Power(p)).value == pytest.approx(exact, rel=1e-12)


def test_luxemburg_epsbump_half_indicator():
    g = DyadicGrid(1, 1)
    f = GridFunction(g, [2.0, 0.0])
    oracle = 2.0 / bisect_oracle(epsbump1, 2.0, 1.0, 2.0)
    assert oracle == pytest.approx(1.3749, abs=1e-4)
    res = luxemburg_norm(f, g.root, EpsBump(1.0))
    assert res.value == pytest.approx(oracle, rel=1e-12)
    assert res.iterations > 0 and res.bracket_width >= 0


def test_luxemburg_zero_function():
    g = DyadicGrid(1, 2)
    res = luxemburg_norm(GridFunction(g, np.zeros(4)), g.root, LogBump(2, 1))
    assert res.value == 0.0


@pytest.mark.parametrize("A", FAMILIES, ids=IDS)
def test_luxemburg_defining_equation(A, rng):
    g = DyadicGrid(1, 5)
    f = GridFunction(g, rng.pareto(1.5, g.size))
    lam = luxemburg_norm(f, g.root, A).value
    assert np.mean(A(np.abs(f.values) / lam)) == pytest.approx(1.0, abs=1e-9)


@given(functions(signed=True), st.floats(1e-3, 1e3), st.sampled_from(FAMILIES))
def test_luxemburg_is_homogeneous(f, c, A):
    g = f.grid
    a = luxemburg_norm(f, g.root, A).value
    b = luxemburg_norm(GridFunction(g, c * f.values), g.root, A).value
    assert b == pytest.approx(c * a, rel=1e-9)


@given(functions(signed=True), st.floats(0.05, 20.0), st.sampled_from(FAMILIES))
def test_luxemburg_normalisation_sandwich(f, c, A):
    g = f.grid
    v = c * f.values / np.abs(f.values).max()
    norm = luxemburg_norm(GridFunction(g, v), g.root, A).value
    modular = float(np.mean(A(np.abs(v))))
    if abs(norm - 1) > 1e-9 and abs(modular - 1) > 1e-9:
        assert (norm <= 1) == (modular <= 1)


@given(functions(signed=True), st.integers(0, 2**32 - 1), st.sampled_from(FAMILIES))
def test_integral_holder_with_conjugate(f, seed, A):
    g = f.grid
    other = GridFunction(g, np.random.default_rng(seed).lognormal(0, 2, g.size))
    lhs = float(np.mean(np.abs(f.values * other.values)))
    rhs = 2 * luxemburg_norm(f, g.root, A).value * luxemburg_norm(other, g.root, conjugate(A)).value
    assert lhs <= rhs * (1 + 1e-9)


# --- tail integrals ------------------------------------------------------------------------

@pytest.mark.parametrize("q, p", [(1, 2), (1.5, 2), (1, 3), (2, 4)])
def test_alpha_power_closed_form(q, p):
    assert alpha_p(Power(q), p) == pytest.approx((1 / (p - q)) ** (1 / p), rel=1e-9)


def test_alpha_power_one_at_two_is_one():
    assert alpha_p(Power(1.0), 2.0) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("p", [1.5, 2, 3])
def test_alpha_diverges_at_critical_power(p):
    assert alpha_p(Power(p), p) == math.inf
    assert alpha_p(LogBump(p, -1.0), p) == math.inf


@pytest.mark.parametrize("p, delta", [(2, 0.5), (3, 1.0), (1.5, 0.25)])
def test_alpha_of_log_damped_power(p, delta):
    # int_1^inf (1 + log t)^{-1-delta} dt / t = 1 / delta
    assert alpha_p(LogBump(p, -1 - delta), p) == pytest.approx(delta ** (-1 / p), rel=1e-8)


@pytest.mark.parametrize("delta", [1.0, 0.5, 0.25, 0.0625])
def test_beta_closed_form_for_square_bump(delta):
    # beta^2 = int_{1/4}^1 2 dt / t + int_1^inf d(t^2 L^a) / (t L^a)^2 with a = 1 + delta
    exact = math.sqrt(2 * math.log(4) + 1 + 2 / delta)
    assert beta_p(conjugate(LogBump(2, 1 + delta)), 2) == pytest.approx(exact, rel=1e-9)


def test_beta_divergent_cases():
    assert beta_p(EpsBump(0.5), 2.0) == math.inf
    assert beta_p(LogBump(2.0, 1.0), 2.0) == math.inf


PAIRS = [(Power(1.5), 2.0), (Power(1.5), 3.0), (LogBump(2, 1), 3.0), (Power(2), 3.0),
         (ScaledPower(2), 3.0), (LogLogBump(2, 1), 3.0), (LogBump(2, -1.5), 2.0),
         (conjugate(LogBump(2, 1.5)), 2.0), (conjugate(LogBump(3, 2.5)), 1.5)]


@pytest.mark.parametrize("B, p", PAIRS, ids=[f"{B.spec}@{p}" for B, p in PAIRS])
def test_alpha_below_beta(B, p):
    a, b = alpha_p(B, p), beta_p(B, p)
    if math.isfinite(a) and math.isfinite(b):
        assert a <= b * (1 + 1e-9)
    else:
        assert not math.isfinite(b)


def bump_beta(p, delta):
    return beta_p(conjugate(LogBump(p, p - 1 + delta)), p / (p - 1))


def test_delta_scaling_at_p2_within_factor_four():
    b1 = bump_beta(2.0, 1.0)
    for d in (0.25, 0.0625):
        law = (1 / d) ** 0.5
        assert 0.25 <= (bump_beta(2.0, d) / b1) / law <= 4


@pytest.mark.parametrize("p", [1.25, 1.5, 2.0, 3.0, 4.0])
def test_growth_law_with_constant_fitted_at_delta_one(p):
    pp = p / (p - 1)
    c = bump_beta(p, 1.0) / p ** 2
    for d in (0.5, 0.25, 0.1):
        assert bump_beta(p, d) <= c * p ** 2 * (1 / d) ** (1 / pp) * (1 + 1e-9)


# --- O'Neil Hölder -------------------------------------------------------------------------

@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_kappa_classical_holder_is_one(p):
    assert holder_kappa(Power(1), Power(p), Power(p / (p - 1))) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("delta", [0.1, 0.5, 1.0])
def test_kappa_finite_for_bump_triple(p, delta):
    tr = holder_triple(p, delta)
    assert tr.eps == pytest.approx(delta / (2 * p)) and tr.eta == pytest.approx(delta / 2)
    assert math.isfinite(holder_kappa(tr.A, tr.B, tr.C))


def test_kappa_flags_unbounded_ratio():
    assert holder_kappa(Power(1), Power(2), Power(1.5)) == math.inf


def test_triple_rejects_large_eps():
    with pytest.raises(ValueError):
        holder_triple(2.0, 0.5, eps=0.3)


# --- names ---------------------------------------------------------------------------------

@pytest.mark.parametrize("text, expected", [
    ("power:p=2", Power(2.0)),
    ("scaledpower:p=3", ScaledPower(3.0)),
    ("logbump:p=2,a=1.5", LogBump(2.0, 1.5)),
    ("loglogbump:p=2,a=1.5", LogLogBump(2.0, 1.5)),
    ("epsbump:eps=0.5", EpsBump(0.5)),
    ("ap:inner=epsbump:eps=1,p=2", Transformed(EpsBump(1.0), 2.0)),
    ("conj:inner=logbump:p=2,a=1.5", NumericConjugate(LogBump(2.0, 1.5))),
])
def test_parse_young(text, expected):
    A = parse_young(text)
    assert A == expected
    assert parse_young(A.spec) == A


@pytest.mark.parametrize("text", ["power", "power:q=2", "cubic:p=2", "logbump:p=2", "conj:inner=power:p=2,p=3"])
def test_parse_young_errors(text):
    with pytest.raises(ValueError):
        parse_young(text)
