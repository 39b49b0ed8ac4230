import math

import numpy as np
import pytest

from isocap.criteria import (FAILS, HOLDS, INCONCLUSIVE, CriterionError, conjugate,
                             embedding_condition, gradient_norm_condition,
                             lorentz_gradient_condition, solution_norm_condition, wellposedness,
                             wellposedness_via_lambda)
from isocap.domains import (EXACT, DomainError, DomainSpec, IsoperFn, constant_isocap,
                            interval_model, lambda_iso, nu_p, power_isocap)

THETAS = np.round(np.arange(0.1, 3.0001, 0.1), 10)
BAND = 0.05


def _power(theta, p):
    return power_isocap(theta, p, 1.0)


def _check_threshold(run, threshold, inclusive):
    """Verdicts of ``run(theta)`` against theta < threshold (or <=) outside the band."""
    mismatches = []
    for th in THETAS:
        if abs(th - threshold) < BAND:
            continue
        expect = th <= threshold if inclusive else th < threshold
        got = run(th).verdict
        if got != (HOLDS if expect else FAILS):
            mismatches.append((th, got))
    return mismatches


# thresholds in theta for nu = s^theta, worked out by hand from the integrands
def _wp(p, q):
    qq = conjugate(q)
    if q == 1:
        return lambda th: wellposedness(_power(th, p), 1.0, p, q), 1.0, False
    return lambda th: wellposedness(_power(th, p), 1.0, p, q), 1 + p / qq, False


def _sol(p, q, sigma):
    run = lambda th: solution_norm_condition(_power(th, p), 1.0, p, q, sigma)
    if math.isinf(q):
        return run, 1 + (p - 1) / sigma, False
    if q * (p - 1) <= sigma:
        return run, (p - 1) / sigma + 1 / conjugate(q), True
    e = sigma * q / (q * (p - 1) - sigma)
    return run, 1 + 1 / e, False


def _grad(p, q, sigma):
    run = lambda th: gradient_norm_condition(_power(th, p), 1.0, p, q, sigma)
    if q == 1:
        # (1-th) s/(p(p-1)) - s/(p-1) > -1
        c = sigma / (p * (p - 1))
        return run, 1 + (1 - sigma / (p - 1)) / c, False
    if math.isinf(q):
        return run, 1 + p * (p - 1) / sigma, False
    if q * (p - 1) <= sigma:
        return run, 1 + p * (p - 1) / sigma - p / q, True
    e = sigma * q / (p * (q * (p - 1) - sigma))
    return run, 1 + 1 / e, False


def _lor(p, q, sigma, rho, gamma):
    run = lambda th: lorentz_gradient_condition(_power(th, p), 1.0, p, q, sigma, rho, gamma)
    a = 1 + p * (p - 1) / sigma - p / q
    return run, a, gamma <= rho


def _emb(p, sigma):
    run = lambda th: embedding_condition(_power(th, p), 1.0, p, sigma)
    return run, p / sigma, p <= sigma


ORACLE = {
    "WP_401 p=2 q=2": _wp(2.0, 2.0), "WP_401 p=3 q=inf": _wp(3.0, math.inf),
    "WP_401 p=1.5 q=4": _wp(1.5, 4.0), "WP_402 p=2": _wp(2.0, 1.0),
    "Ci": _sol(2.0, 2.0, 3.0), "Cii": _sol(3.0, 2.0, 1.0), "Ciii": _sol(2.0, math.inf, 0.5),
    "5teri": _grad(2.0, 1.5, 1.0), "5terii": _grad(3.0, 4.0, 2.0),
    "5teriii": _grad(2.0, math.inf, 1.5), "5teriv": _grad(3.0, 1.0, 1.0),
    "624": _lor(2.0, 2.0, 1.0, 2.0, 1.0), "625": _lor(2.0, 3.0, 1.5, 1.0, 2.0),
    "2002": _emb(2.0, 3.0), "2002p": _emb(3.0, 2.0),
}


@pytest.mark.parametrize("label", sorted(ORACLE))
def test_power_law_threshold_oracle(label):
    run, threshold, inclusive = ORACLE[label]
    assert _check_threshold(run, threshold, inclusive) == []


def _lambda_expo(b, p, q):
    qq, pp = conjugate(q), p / (p - 1)
    # s^{q'/p} (int_s r^{-b p'})^{q'/p'}: only b p' > 1 can fail
    return qq / p + (1 - b * pp) * qq / pp if b * pp > 1 else qq / p


LAMBDA_BS = [b for b in np.round(np.arange(0.1, 3.0001, 0.1), 10)
             if abs(_lambda_expo(b, 2.0, 2.0) + 1) >= 0.05 and abs(2 * b - 1) >= 0.05]


@pytest.mark.parametrize("b", LAMBDA_BS)
def test_lambda_route_power_law_oracle(b):
    expo = _lambda_expo(b, 2.0, 2.0)
    rep = wellposedness_via_lambda(IsoperFn(1.0, lambda s: s ** b, EXACT), 1.0, 2.0, 2.0)
    assert rep.verdict == (HOLDS if expo > -1 else FAILS)


def test_constant_nu_quantity():
    c, M, p, q = 2.0, 1.0, 2.0, 3.0
    rep = wellposedness(constant_isocap(c, p, M), M, p, q)
    e = conjugate(q) / p
    assert rep.verdict == HOLDS
    assert rep.quantity == pytest.approx((M / 2) ** (1 + e) * c ** -e / (1 + e), rel=1e-6)


def test_report_fields():
    rep = wellposedness(_power(2.5, 2.0), 1.0, 2.0, 2.0)
    assert rep.criterion_id == "WP_401" and rep.verdict == FAILS
    assert rep.summary == "criterion fails" and rep.quantity is None
    d = rep.to_dict()
    assert d["parameters"] == {"p": 2.0, "q": 2.0}
    rep = wellposedness(_power(0.5, 2.0), 1.0, 2.0, 2.0)
    assert rep.holds and math.isfinite(rep.quantity)


def test_lipschitz_q1():
    for n, p in [(2, 2.0), (3, 2.0), (3, 3.0), (3, 1.5)]:
        rep = wellposedness(nu_p(DomainSpec.ball(n), p), 1.0, p, 1.0)
        assert (rep.criterion_id, rep.verdict) == ("WP_402", HOLDS)


def test_solution_examples():
    ball = nu_p(DomainSpec.ball(3), 2.0)
    rep = solution_norm_condition(ball, 1.0, 2.0, 2.0, 2.0)
    assert (rep.criterion_id, rep.verdict) == ("SOL_Ci", HOLDS)
    rep = solution_norm_condition(_power(1.0, 2.0), 1.0, 2.0, 2.0, 1.0)
    assert (rep.criterion_id, rep.verdict) == ("SOL_Cii", HOLDS)
    rep = solution_norm_condition(_power(2.0, 2.0), 1.0, 2.0, math.inf, 1.0)
    assert (rep.criterion_id, rep.verdict) == ("SOL_Ciii", FAILS)
    with pytest.raises(CriterionError, match="q = 1"):
        solution_norm_condition(ball, 1.0, 2.0, 1.0, 1.0)
    with pytest.raises(CriterionError, match="sigma <= 1"):
        solution_norm_condition(ball, 1.0, 2.0, math.inf, 2.0)


def test_gradient_examples():
    ball = nu_p(DomainSpec.ball(3), 2.0)
    rep = gradient_norm_condition(ball, 1.0, 2.0, 1.0, 1.0)
    assert (rep.criterion_id, rep.verdict) == ("GRAD_5teriv", HOLDS)
    for alpha in (1.0, 1.5, 2.5):
        for sigma in (1.0, 1.5, 2.0):  # sigma >= p - 1
            rep = gradient_norm_condition(nu_p(DomainSpec.nikodym(alpha), 2.0), 1.0, 2.0, 1.0, sigma)
            assert rep.verdict == FAILS
    for p in (1.5, 2.0, 3.0):
        rep = gradient_norm_condition(interval_model().nu(p), 1.0, p, math.inf, p)
        assert (rep.criterion_id, rep.verdict) == ("GRAD_5teriii", HOLDS)
    with pytest.raises(CriterionError):
        gradient_norm_condition(ball, 1.0, 2.0, 2.0, 2.5)


def test_lorentz_examples():
    ball = nu_p(DomainSpec.ball(3), 2.0)
    rep = lorentz_gradient_condition(ball, 1.0, 2.0, 2.0, 1.0, 1.0, 1.0)
    assert (rep.criterion_id, rep.verdict) == ("LOR_624", HOLDS)
    rep = lorentz_gradient_condition(_power(2.6, 2.0), 1.0, 2.0, 2.0, 1.0, 1.0, 1.0)
    assert rep.verdict == FAILS  # theta >= 1 + 2 - 1 = 2
    with pytest.raises(CriterionError):
        lorentz_gradient_condition(ball, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(CriterionError):
        lorentz_gradient_condition(ball, 1.0, 2.0, 2.0, 2.0, 1.0, 1.0)


def test_embedding_examples():
    ball = nu_p(DomainSpec.ball(3), 2.0)
    assert embedding_condition(ball, 1.0, 2.0, 6.0).verdict == HOLDS
    assert embedding_condition(_power(2 / 3, 2.0), 1.0, 2.0, 3.0).verdict == HOLDS
    assert embedding_condition(_power(4 / 3, 2.0), 1.0, 2.0, 3.0).verdict == FAILS


def test_lambda_examples():
    rep = wellposedness_via_lambda(IsoperFn(1.0, lambda s: 1.0, EXACT), 1.0, 2.0, 1.0)
    assert (rep.criterion_id, rep.verdict) == ("ISO_302", HOLDS)
    for q in (1.5, 2.0, 4.0):
        for alpha in (1.2, 1.4, 1.8, 2.2):
            if abs(alpha - (2 - 1 / q)) < 0.05:
                continue
            rep = wellposedness_via_lambda(lambda_iso(DomainSpec.nikodym(alpha)), 1.0, 2.0, q)
            assert rep.holds == (alpha < 2 - 1 / q)


@pytest.mark.parametrize("p", [1.5, 2.0])
def test_couhil_lambda_route(p):
    for alpha in (2.2, 2.4):
        for q in (1.2, 1.5, 2.0, 3.0, 5.0):
            thr = 2 / (4 - alpha)
            if abs(q - thr) < 0.05:
                continue
            rep = wellposedness_via_lambda(lambda_iso(DomainSpec.couhil(alpha)), 1.0, p, q)
            assert rep.holds == (q > thr)


def test_lower_bound_divergence_is_inconclusive():
    nu = nu_p(DomainSpec.holder(2, 0.9), 1.5)
    rep = wellposedness(nu, 1.0, 1.5, 1.0)  # exponent 1 - 1.35/1.9 < 1, WP_402 holds
    assert rep.verdict == HOLDS
    lb = power_isocap(2.5, 2.0, 1.0, exactness="lower_bound_only")
    rep = wellposedness(lb, 1.0, 2.0, 2.0)
    assert rep.verdict == INCONCLUSIVE and rep.summary == "inconclusive"


def test_near_threshold_is_inconclusive():
    rep = wellposedness(_power(2.0 + 0.001, 2.0), 1.0, 2.0, 2.0)
    assert rep.verdict == INCONCLUSIVE


def _nu_grids():
    for alpha in np.arange(1.1, 3.01, 0.3):
        yield "nikodym", DomainSpec.nikodym(float(alpha))
    for beta in (0.8, 1.5, 3.0):
        yield "funnel", DomainSpec.funnel(beta=beta, n=3)


@pytest.mark.parametrize("label,dom", list(_nu_grids()))
def test_monotone_in_q(label, dom):
    p = 2.0
    nu = nu_p(dom, p)
    held = False
    for q in (1.2, 1.5, 2.0, 3.0, 6.0, math.inf):
        rep = wellposedness(nu, dom.measure, p, q)
        if held:
            assert rep.verdict == HOLDS
        held = held or rep.verdict == HOLDS


def test_lambda_route_implies_nu_route():
    for p in (1.5, 2.0):
        for q in (1.5, 2.0, 4.0):
            for alpha in np.round(np.arange(1.1, 3.01, 0.1), 10):
                dom = DomainSpec.nikodym(float(alpha))
                if wellposedness_via_lambda(lambda_iso(dom), 1.0, p, q).holds:
                    assert wellposedness(nu_p(dom, p), 1.0, p, q).verdict == HOLDS
            for alpha in (1.5, 2.0, 2.4):
                if alpha > p + 1:
                    continue
                dom = DomainSpec.couhil(alpha)
                if wellposedness_via_lambda(lambda_iso(dom), 1.0, p, q).holds:
                    assert wellposedness(nu_p(dom, p), 1.0, p, q).verdict == HOLDS


def test_precondition_errors():
    nu = _power(0.5, 2.0)
    with pytest.raises(CriterionError, match="p must exceed 1"):
        wellposedness(nu, 1.0, 1.0, 2.0)
    with pytest.raises(CriterionError, match="q must lie"):
        wellposedness(nu, 1.0, 2.0, 0.5)
    with pytest.raises(CriterionError, match="sigma >= 1"):
        embedding_condition(nu, 1.0, 2.0, 0.5)
    with pytest.raises(DomainError):
        nu_p(DomainSpec.couhil(2.5), 3.0)
