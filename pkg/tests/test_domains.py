import math
import warnings

import numpy as np
import pytest

from isocap.domains import (EXACT, LOWER_BOUND, TWO_SIDED, DomainError, DomainSpec, IsoperFn,
                            ZeroCapacityWarning, catalog_table, condenser_capacity_1d,
                            condenser_capacity_radial, interval_model, lambda_iso,
                            nu_from_lambda, nu_p, radial_model, theta_inverse, theta_transform,
                            upsilon_inverse, upsilon_transform, ExpProfile)
from isocap.numerics import fit_endpoint


def test_ball_and_nikodym_models():
    nu = nu_p(DomainSpec.ball(3), 2.0)
    assert nu.asymptotic_exponent == pytest.approx(1 / 3)
    assert nu(0.008) == pytest.approx(0.2)
    nu = nu_p(DomainSpec.nikodym(1.7), 2.5)
    assert nu(0.1) == pytest.approx(0.1 ** 1.7)
    assert nu.exactness == TWO_SIDED


def test_ball_borderline_and_large_p():
    nu = nu_p(DomainSpec.ball(2), 2.0)
    assert nu(0.1) == pytest.approx(math.log(10.0) ** -1)
    assert nu_p(DomainSpec.ball(2), 3.0)(0.1) == 1.0


def test_cusp_capacity_against_quadrature():
    nu = nu_p(DomainSpec.cusp(kappa=1.0, n=2), 3.0)
    assert nu.exactness == EXACT
    # Theta(rho) = rho^2/2, |Omega| = 1/2
    rs, rh = math.sqrt(0.02), math.sqrt(0.5)
    x = np.linspace(rs, rh, 10 ** 6 + 1)
    mid = 0.5 * (x[1:] + x[:-1])
    oracle = float(np.sum(mid ** -0.5) * (x[1] - x[0])) ** -2
    assert nu(0.01) == pytest.approx(oracle, rel=1e-6)
    assert nu(0.01) == pytest.approx((2 * (math.sqrt(rh) - math.sqrt(rs))) ** -2, rel=1e-10)


def test_lambda_examples():
    lam = lambda_iso(DomainSpec.ball(2))
    assert lam(0.09) == pytest.approx(0.3)
    lam = lambda_iso(DomainSpec.couhil(2.5))
    assert lam(0.09) == pytest.approx(0.09 ** 1.25)
    lam = lambda_iso(DomainSpec.cusp(kappa=1.0, n=2))
    assert lam(0.08) == pytest.approx(math.sqrt(0.16), rel=1e-12)


def test_nu_from_lambda_closed_forms():
    const = IsoperFn(1.0, lambda s: 1.0, EXACT)
    nu = nu_from_lambda(const, 2.0)
    assert nu.exactness == LOWER_BOUND
    for s in (0.01, 0.2, 0.45):
        assert nu(s) == pytest.approx(1.0 / (0.5 - s), rel=1e-10)
    root = IsoperFn(1.0, lambda s: s ** 0.5, EXACT)
    nu = nu_from_lambda(root, 2.0)
    for s in (1e-6, 0.01, 0.2):
        # lambda^{-2} = 1/r integrates to log(1/(2s))
        assert nu(s) == pytest.approx(1.0 / math.log(0.5 / s), rel=1e-10)
    lin = IsoperFn(1.0, lambda s: s, EXACT)
    nu = nu_from_lambda(lin, 2.0)
    assert nu(0.1) == pytest.approx(1.0 / (1 / 0.1 - 2), rel=1e-10)


def test_nu_from_lambda_divergent_inner_integral_gives_zero():
    flat = IsoperFn(1.0, lambda s: 0.0 if s < 0.1 else 1.0, EXACT)
    assert nu_from_lambda(flat, 2.0).phi_at(0.05) == math.inf
    assert nu_from_lambda(flat, 2.0)(0.05) == 0.0


@pytest.mark.parametrize("kappa,p", [(1.0, 1.5), (1.0, 3.0), (2.0, 1.5), (2.0, 3.0)])
def test_profile_reduction_makes_lambda_bound_an_equality(kappa, p):
    dom = DomainSpec.cusp(kappa=kappa, n=2)
    exact, lower = nu_p(dom, p), nu_from_lambda(lambda_iso(dom), p)
    for s in np.geomspace(1e-6, 0.999 * exact.half, 100):
        assert lower(s) == pytest.approx(exact(s), rel=1e-6)


@pytest.mark.parametrize("alpha", [1.5, 2.0, 2.5])
def test_nikodym_lambda_route_is_weaker(alpha):
    p = 2.0
    dom = DomainSpec.nikodym(alpha)
    nu, lower = nu_p(dom, p), nu_from_lambda(lambda_iso(dom), p)
    e_nu = fit_endpoint(nu, 0.0, nu.half).joint_exponent
    e_lo = fit_endpoint(lower, 0.0, nu.half).joint_exponent
    # the lambda bound decays faster at 0: exponent alpha p - p + 1 > alpha
    assert e_lo == pytest.approx(alpha * p - p + 1, abs=1e-3)
    assert e_lo > e_nu
    assert all(lower(s) <= nu(s) for s in np.geomspace(1e-8, 0.1, 30))


def test_transforms():
    cusp = DomainSpec.cusp(kappa=1.0, n=2)
    assert theta_transform(cusp, 0.3) == pytest.approx(0.045)
    assert theta_inverse(cusp, 0.045) == pytest.approx(0.3)
    f = DomainSpec.funnel(n=2, profile=ExpProfile(1.0))
    assert upsilon_transform(f, 1.3) == pytest.approx(math.exp(-1.3))
    f = DomainSpec.funnel(beta=2.0, n=3)
    assert upsilon_transform(f, 0.7) == pytest.approx(1.7 ** -3 / 3)
    assert upsilon_inverse(f, 1.7 ** -3 / 3) == pytest.approx(0.7)
    generic = DomainSpec.cusp(n=2, profile=lambda r: r * r + r)
    assert theta_transform(generic, 0.5) == pytest.approx(0.5 ** 3 / 3 + 0.125)
    assert theta_inverse(generic, 0.5 ** 3 / 3 + 0.125) == pytest.approx(0.5)


def test_funnel_needs_finite_measure():
    with pytest.raises(DomainError, match="finite"):
        DomainSpec.funnel(beta=0.8, n=2)


def test_condenser_capacity_examples():
    one = lambda t: 1.0
    assert condenser_capacity_1d(one, 2.0, 0.1, 0.5) == pytest.approx(2.5)
    assert condenser_capacity_1d(one, 3.5, 0.1, 0.5) == pytest.approx(0.4 ** -2.5)
    val = condenser_capacity_1d(lambda t: t, 3.0, 0.2, 0.7)
    assert val == pytest.approx((2 * (math.sqrt(0.7) - math.sqrt(0.2))) ** -2)


def test_zero_capacity_flag():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        assert condenser_capacity_1d(lambda t: t, 2.0, 0.0, 0.5) == 0.0
    assert any(issubclass(x.category, ZeroCapacityWarning) for x in w)


def test_capacity_monotone_in_a_and_g():
    A = lambda t: t ** 2
    caps_a = [condenser_capacity_1d(A, 2.0, a, 0.8) for a in (0.1, 0.2, 0.4)]
    caps_g = [condenser_capacity_1d(A, 2.0, 0.1, g) for g in (0.3, 0.5, 0.9)]
    assert caps_a == sorted(caps_a)
    assert caps_g == sorted(caps_g, reverse=True)


def test_radial_capacity():
    r, R = 0.2, 1.5
    assert condenser_capacity_radial(3, 2.0, r, R) == pytest.approx(1 / (1 / r - 1 / R))
    assert condenser_capacity_radial(2, 2.0, r, R) == pytest.approx(1 / math.log(R / r))
    assert condenser_capacity_radial(3, 2.0, 1e-10, R) < 1e-9
    with pytest.raises(ValueError):
        condenser_capacity_radial(2, 3.0, r, R)


@pytest.mark.parametrize("n,p", [(3, 2.0), (4, 2.0), (3, 1.5)])
def test_radial_capacity_slope(n, p):
    rs = np.geomspace(1e-6, 1e-4, 5)
    caps = [condenser_capacity_radial(n, p, r, 1.0) for r in rs]
    mass = rs ** n / n
    slope = np.polyfit(np.log(mass), np.log(caps), 1)[0]
    assert slope == pytest.approx((n - p) / n, abs=0.01)


def _catalog_cases():
    yield DomainSpec.ball(3), 2.0
    yield DomainSpec.ball(2), 2.0
    yield DomainSpec.holder(2, 0.5), 2.0
    yield DomainSpec.john(3, 1.5), 2.0
    yield DomainSpec.john(2, 1.0), 3.0
    yield DomainSpec.cusp(kappa=2.0, n=3), 2.0
    yield DomainSpec.funnel(beta=2.0, n=2), 2.0
    yield DomainSpec.couhil(2.5), 2.0
    yield DomainSpec.nikodym(1.5), 3.0


@pytest.mark.parametrize("dom,p", list(_catalog_cases()))
def test_nu_monotone_and_positive(dom, p):
    nu = nu_p(dom, p)
    s = np.linspace(1e-4, 0.999, 200) * nu.half
    v = np.array([nu(x) for x in s])
    assert np.all(v > 0)
    assert np.all(np.diff(v) >= -1e-12 * np.abs(v[1:]))


def test_profile_nu_blows_up_at_half():
    nu = nu_p(DomainSpec.cusp(kappa=1.0, n=2), 2.0)
    assert nu(nu.half * (1 - 1e-6)) > 1e4 * nu(0.5 * nu.half)


def test_validity_ranges():
    with pytest.raises(DomainError, match="alpha"):
        nu_p(DomainSpec.holder(2, 0.5), 3.5)
    with pytest.raises(DomainError, match="gamma"):
        nu_p(DomainSpec.john(3, 3.0), 2.0)
    with pytest.raises(DomainError, match="1 <= p <= 2"):
        nu_p(DomainSpec.couhil(2.5), 2.5)
    with pytest.raises(DomainError, match="p\\+1"):
        nu_p(DomainSpec.couhil(3.5), 2.0)
    with pytest.raises(DomainError, match="convex"):
        DomainSpec.cusp(n=2, profile=np.sqrt)
    with pytest.raises(DomainError):
        DomainSpec.nikodym(0.5)
    with pytest.raises(DomainError):
        DomainSpec.holder(2, 1.5)
    with pytest.raises(DomainError):
        nu_p(DomainSpec.ball(2), 1.0)


def test_john_exponents():
    nu = nu_p(DomainSpec.john(3, 1.5), 2.0)
    # sigma = np/((n-1)gamma+1-p) = 3, nu ~ s^(p/sigma)
    assert nu.asymptotic_exponent == pytest.approx(2 / 3)
    assert nu.exactness == LOWER_BOUND


def test_models_and_catalog():
    nu = interval_model().nu(2.5)
    assert nu(0.2) == pytest.approx(0.3 ** -1.5)
    m = radial_model(3)
    assert m.measure == pytest.approx(1 / 3)
    fams = {row["family"] for row in catalog_table()}
    assert {"LipschitzBall", "Cusp", "Funnel", "NikodymComb", "CouhilComb"} <= fams
