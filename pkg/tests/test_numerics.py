import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from isocap.numerics import (Grid, NonFiniteIntegrand, QuadratureError, StieltjesWeight,
                             TailTable, UnsupportedIntegrand, classify_improper, classify_sup,
                             fit_endpoint, generalized_left_inverse, integrate_adaptive,
                             stieltjes_integrate)
from isocap.domains import DomainSpec, nu_p


def graded_midpoint(f, a, b, n, grade=4.0):
    """Midpoint rule on a mesh graded towards a: x = a + (b-a) (i/n)^grade."""
    u = np.linspace(0.0, 1.0, n + 1)
    x = a + (b - a) * u ** grade
    mid = 0.5 * (x[:-1] + x[1:])
    return float(np.sum(f(mid) * np.diff(x)))


def test_integrate_constant_and_sqrt():
    assert integrate_adaptive(lambda s: 1.0, 0.0, 1.0, 1e-8) == pytest.approx(1.0, rel=1e-12)
    assert integrate_adaptive(lambda s: s ** -0.5, 0.0, 1.0, 1e-8) == pytest.approx(2.0, rel=1e-8)


def test_integrate_log_singularity_against_graded_oracle():
    f = lambda s: s ** (-1.0 / 3.0) * np.log(1.0 / s)
    oracle = graded_midpoint(f, 0.0, 1.0, 10 ** 6)
    val = integrate_adaptive(lambda s: float(f(s)), 0.0, 1.0, 1e-6)
    assert val == pytest.approx(oracle, rel=1e-5)
    assert val == pytest.approx(2.25, rel=1e-6)  # Gamma(2)/(2/3)^2


def test_integrate_errors():
    with pytest.raises(NonFiniteIntegrand):
        integrate_adaptive(lambda s: math.inf if s > 0.5 else 1.0, 0.0, 1.0)
    with pytest.raises(QuadratureError) as exc:
        integrate_adaptive(lambda s: 1.0 / s, 0.0, 1.0, limit=5)
    assert math.isfinite(exc.value.estimate) or math.isnan(exc.value.estimate)


@given(st.floats(-0.9, 2.0), st.floats(-0.9, 2.0), st.floats(-3, 3), st.floats(-3, 3))
def test_integrate_is_linear(e1, e2, a, b):
    f = lambda s: s ** e1
    g = lambda s: s ** e2
    tol = 1e-8
    lhs = integrate_adaptive(lambda s: a * f(s) + b * g(s), 0.0, 1.0, tol) if (a or b) else 0.0
    rhs = a / (e1 + 1) + b / (e2 + 1)
    scale = abs(a) / (e1 + 1) + abs(b) / (e2 + 1)
    assert abs(lhs - rhs) <= 2 * tol * scale + 1e-13


def test_classify_examples():
    v = classify_improper(lambda s: s ** -0.5, 0.0, 1.0)
    assert v.converges and v.value == pytest.approx(2.0, rel=1e-6)
    v = classify_improper(lambda s: 1.0 / s, 0.0, 1.0)
    assert v.converges is False and v.divergence_rate.startswith("power -1")


def test_classify_log_tail_against_analytic_tail():
    f = lambda s: 1.0 / (s * np.log(1.0 / s) ** 2)
    v = classify_improper(lambda s: float(f(s)), 0.0, 0.5)
    eps = 1e-8
    # fixed panels on (eps, 1/2) in log coordinates plus the closed-form tail 1/log(1/eps)
    x = np.geomspace(eps, 0.5, 10 ** 6 + 1)
    mid = np.sqrt(x[:-1] * x[1:])
    oracle = float(np.sum(f(mid) * np.diff(x))) + 1.0 / math.log(1.0 / eps)
    assert v.converges
    assert v.value == pytest.approx(oracle, rel=1e-5)
    assert v.value == pytest.approx(1.0 / math.log(2.0), rel=1e-6)


@pytest.mark.parametrize("e", [-1.5, -1.2, -1.05, -0.95, -0.5, 0.0])
def test_classify_power_grid(e):
    v = classify_improper(lambda s: s ** e, 0.0, 1.0)
    assert v.converges == (e > -1)
    if v.converges:
        assert v.value == pytest.approx(1.0 / (e + 1), rel=1e-6)


def test_classify_sign_change_unsupported():
    with pytest.raises(UnsupportedIntegrand):
        classify_improper(lambda s: math.sin(1.0 / s) / s, 0.0, 1.0)


def test_classify_sup():
    assert classify_sup(lambda s: s ** 0.3, 0.0, 0.5).bounded
    assert classify_sup(lambda s: s ** -0.3, 0.0, 0.5).bounded is False
    v = classify_sup(lambda s: 2.0 + 0.0 * s, 0.0, 0.5)
    assert v.bounded and v.value == pytest.approx(2.0)


def test_fit_endpoint_recovers_power_log():
    fit = fit_endpoint(lambda s: s ** -0.7 * math.log(1 / s) ** 2, 0.0, 0.5)
    assert fit.joint_exponent == pytest.approx(-0.7, abs=1e-3)
    assert fit.log_exponent == pytest.approx(2.0, abs=1e-2)


def test_stieltjes_examples():
    M, s = 1.0, 0.1
    w = StieltjesWeight(lambda r: 1.0)
    assert stieltjes_integrate(lambda r: r, w, s, M / 2) == pytest.approx(M ** 2 / 8 - s * s / 2)
    th = 0.5
    w = StieltjesWeight(lambda r: th * r ** (-th - 1))
    assert stieltjes_integrate(lambda r: 1.0, w, s, 0.5) == pytest.approx(s ** -th - 2 ** th)


def test_stieltjes_cusp_weight_against_fixed_panels():
    nu = nu_p(DomainSpec.cusp(kappa=1.0, n=2), 3.0)
    a, b = 0.01, nu.half
    val = stieltjes_integrate(lambda r: r ** 0.5, nu.weight, a, b)
    # w(r) = (2r)^(-3/4) for theta(r) = r, n = 2, p = 3
    x = np.linspace(a, b, 10 ** 6 + 1)
    mid = 0.5 * (x[:-1] + x[1:])
    oracle = float(np.sum(mid ** 0.5 * (2 * mid) ** -0.75) * (x[1] - x[0]))
    assert val == pytest.approx(oracle, rel=1e-6)


def test_stieltjes_negative_weight_rejected():
    with pytest.raises(ValueError, match="non-increasing"):
        stieltjes_integrate(lambda r: 1.0, StieltjesWeight(lambda r: -1.0), 0.1, 0.2)


def test_finite_difference_weight():
    w = StieltjesWeight.from_function(lambda r: 0.5 - r * r)
    assert not w.closed_form
    assert w(0.3) == pytest.approx(0.6, rel=1e-8)


@given(st.floats(-0.95, 1.0))
def test_stieltjes_unit_weight_matches_plain_integral(e):
    g = lambda r: r ** e
    w = StieltjesWeight(lambda r: 1.0)
    assert stieltjes_integrate(g, w, 0.0, 0.5) == pytest.approx(
        integrate_adaptive(g, 0.0, 0.5), rel=1e-8)


def test_tail_table_matches_closed_form():
    t = TailTable(lambda r: r ** -1.5, 0.5, 1e-9)
    for s in (1e-12, 1e-6, 0.01, 0.3, 0.5):
        exact = 2 * (s ** -0.5 - 0.5 ** -0.5)
        assert t(s) == pytest.approx(exact, rel=1e-9)


def test_inverse_examples():
    inv = generalized_left_inverse(lambda s: s * s, 0.04, 0.0, 0.5)
    assert inv.value == pytest.approx(0.2, abs=1e-12) and inv.clamped is None
    step = lambda s: 0.0 if s <= 0.3 else 1.0
    assert generalized_left_inverse(step, 0.5, 0.0, 1.0).value == pytest.approx(0.3, abs=1e-12)
    assert generalized_left_inverse(step, -1.0, 0.0, 1.0) == (0.0, "below")
    assert generalized_left_inverse(step, 2.0, 0.0, 1.0) == (1.0, "above")


def test_inverse_of_tabulated_ball_capacity():
    nu = nu_p(DomainSpec.ball(3), 2.0)
    xs = np.linspace(1e-4, 0.499, 5000)
    Fs = np.array([nu(x) for x in xs])
    inv = generalized_left_inverse((xs, Fs), nu(0.1), 0.0, 0.5)
    assert abs(inv.value - 0.1) <= xs[1] - xs[0]


@given(st.floats(0.01, 0.99))
def test_inverse_round_trip(s):
    F = lambda x: x ** 3 + x
    assert generalized_left_inverse(F, F(s), 0.0, 1.0).value == pytest.approx(s, abs=1e-10)


def test_grid_invariants():
    Grid(np.array([0.1, 0.2]), np.zeros(2), 1.0)
    with pytest.raises(ValueError):
        Grid(np.array([0.2, 0.1]), np.zeros(2), 1.0)
    with pytest.raises(ValueError):
        Grid(np.array([0.1, 1.0]), np.zeros(2), 1.0)
    with pytest.raises(ValueError):
        Grid(np.array([0.1]), np.zeros(1), 1.0)
