"""Isocapacitary conditions for well-posedness and norm estimates.

Every condition is either the finiteness of an integral over (0, |Omega|/2)
or the finiteness of a supremum there; both are decided at the singular end
s -> 0 through the endpoint exponent classifiers of ``numerics``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .domains import LOWER_BOUND, IsocapFn, IsoperFn, nu_from_lambda
from .numerics import NonFiniteIntegrand, classify_improper, classify_sup

CRITERIA = ("WP_401", "WP_402", "SOL_Ci", "SOL_Cii", "SOL_Ciii", "GRAD_5teri",
            "GRAD_5terii", "GRAD_5teriii", "GRAD_5teriv", "LOR_624", "LOR_625",
            "ISO_301", "ISO_302", "EMB_2002", "EMB_2002p")

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"


class CriterionError(ValueError):
    """Parameters outside every case of a criterion."""


@dataclass(frozen=True)
class CriterionReport:
    criterion_id: str
    parameters: dict
    verdict: str
    quantity: Optional[float]
    notes: tuple = ()
    exponent: float = math.nan
    log_exponent: float = 0.0

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    @property
    def summary(self) -> str:
        # a failing sufficient condition says nothing about ill-posedness
        return {HOLDS: "holds", FAILS: "criterion fails", INCONCLUSIVE: "inconclusive"}[self.verdict]

    def to_dict(self) -> dict:
        return {"criterion_id": self.criterion_id, "parameters": dict(self.parameters),
                "verdict": self.verdict, "summary": self.summary, "quantity": self.quantity,
                "notes": list(self.notes), "exponent": self.exponent,
                "log_exponent": self.log_exponent}


def conjugate(q: float) -> float:
    if q == 1:
        return math.inf
    if math.isinf(q):
        return 1.0
    return q / (q - 1.0)


def _notes(nu: IsocapFn) -> tuple:
    if nu.exactness == LOWER_BOUND:
        return ("isocapacitary function is a lower bound: a divergent test is inconclusive",)
    return ()


def _nu_value(nu: IsocapFn) -> Callable[[float], float]:
    ev = nu.evaluate

    def f(s):
        v = float(ev(s))
        if v == 0.0:
            raise NonFiniteIntegrand("isocapacitary function vanishes")
        return v

    return f


def _negative(nu: IsocapFn, notes: tuple) -> str:
    return INCONCLUSIVE if nu.exactness == LOWER_BOUND else FAILS


def _integral_report(cid, params, nu: IsocapFn, integrand) -> CriterionReport:
    notes = _notes(nu)
    try:
        v = classify_improper(integrand, 0.0, nu.half, "left")
    except NonFiniteIntegrand:
        return CriterionReport(cid, params, _negative(nu, notes), None,
                               notes + ("integrand not finite (zero capacity)",))
    if v.converges is None:
        return CriterionReport(cid, params, INCONCLUSIVE, None,
                               notes + ("endpoint exponent within the numerical margin of the threshold",),
                               v.exponent, v.log_exponent)
    if v.converges:
        return CriterionReport(cid, params, HOLDS, v.value, notes, v.exponent, v.log_exponent)
    return CriterionReport(cid, params, _negative(nu, notes), None,
                           notes + (f"integral diverges ({v.divergence_rate})",),
                           v.exponent, v.log_exponent)


def _sup_report(cid, params, nu: IsocapFn, g) -> CriterionReport:
    notes = _notes(nu)
    try:
        v = classify_sup(g, 0.0, nu.half, "left")
    except NonFiniteIntegrand:
        return CriterionReport(cid, params, _negative(nu, notes), None,
                               notes + ("quantity not finite (zero capacity)",))
    if v.bounded is None:
        return CriterionReport(cid, params, INCONCLUSIVE, None,
                               notes + ("endpoint exponent within the numerical margin of the threshold",),
                               v.exponent, v.log_exponent)
    if v.bounded:
        return CriterionReport(cid, params, HOLDS, v.value, notes, v.exponent, v.log_exponent)
    return CriterionReport(cid, params, _negative(nu, notes), None,
                           notes + ("supremum is infinite",), v.exponent, v.log_exponent)


def _check_p(p):
    if not p > 1:
        raise CriterionError("p must exceed 1")


def _check_q(q):
    if not 1 <= q <= math.inf:
        raise CriterionError("q must lie in [1, inf]")


# ---------------------------------------------------------------------------


def wellposedness(nu: IsocapFn, measure: float, p: float, q: float) -> CriterionReport:
    """Existence and uniqueness condition: WP_401 for q > 1, WP_402 for q = 1."""
    _check_p(p)
    _check_q(q)
    nv = _nu_value(nu)
    params = {"p": p, "q": q}
    if q == 1:
        e = 1.0 / p
        return _integral_report("WP_402", params, nu, lambda s: (s / nv(s)) ** e / s)
    e = conjugate(q) / p
    return _integral_report("WP_401", params, nu, lambda s: (s / nv(s)) ** e)


def solution_norm_condition(nu: IsocapFn, measure: float, p: float, q: float,
                            sigma: float) -> CriterionReport:
    """Condition for ||u||_sigma <= C ||f||_q^{1/(p-1)} (cases i, ii, iii)."""
    _check_p(p)
    _check_q(q)
    if sigma <= 0:
        raise CriterionError("sigma must be positive")
    nv = _nu_value(nu)
    params = {"p": p, "q": q, "sigma": sigma}
    if q == 1:
        raise CriterionError("no case applies to q = 1 (cases: i 1<q<inf, q(p-1)<=sigma; "
                             "ii 1<q<inf, sigma<q(p-1); iii q=inf, 0<sigma<=1)")
    if math.isinf(q):
        if sigma > 1:
            raise CriterionError("q = inf is covered only for 0 < sigma <= 1 (case iii)")
        e = sigma / (p - 1.0)
        return _integral_report("SOL_Ciii", params, nu, lambda s: (s / nv(s)) ** e)
    if q * (p - 1) <= sigma:
        a = (p - 1.0) / sigma + 1.0 / conjugate(q)
        return _sup_report("SOL_Ci", params, nu, lambda s: s ** a / nv(s))
    e = sigma * q / (q * (p - 1.0) - sigma)
    return _integral_report("SOL_Cii", params, nu, lambda s: (s / nv(s)) ** e)


def gradient_norm_condition(nu: IsocapFn, measure: float, p: float, q: float,
                            sigma: float) -> CriterionReport:
    """Condition for ||grad u||_sigma <= C ||f||_q^{1/(p-1)}, 0 < sigma <= p."""
    _check_p(p)
    _check_q(q)
    if not 0 < sigma <= p:
        raise CriterionError("gradient estimates need 0 < sigma <= p")
    nv = _nu_value(nu)
    params = {"p": p, "q": q, "sigma": sigma}
    e = sigma / (p * (p - 1.0))
    if q == 1:
        c = sigma / (p - 1.0)
        return _integral_report("GRAD_5teriv", params, nu, lambda s: (s / nv(s)) ** e / s ** c)
    if math.isinf(q):
        return _integral_report("GRAD_5teriii", params, nu, lambda s: (s / nv(s)) ** e)
    if q * (p - 1) <= sigma:
        a = 1.0 + p * (p - 1.0) / sigma - p / q
        return _sup_report("GRAD_5teri", params, nu, lambda s: s ** a / nv(s))
    e = sigma * q / (p * (q * (p - 1.0) - sigma))
    return _integral_report("GRAD_5terii", params, nu, lambda s: (s / nv(s)) ** e)


def lorentz_gradient_condition(nu: IsocapFn, measure: float, p: float, q: float,
                               sigma: float, rho: float, gamma: float) -> CriterionReport:
    """Condition for the Lorentz L^{sigma,rho} gradient estimate, datum in L^{q, gamma/(p-1)}."""
    _check_p(p)
    if not 0 < sigma < p:
        raise CriterionError("Lorentz gradient estimate needs 0 < sigma < p")
    if not 1 < q < math.inf:
        raise CriterionError("Lorentz gradient estimate needs 1 < q < inf")
    if gamma <= 0 or rho <= 0:
        raise CriterionError("gamma and rho must be positive")
    nv = _nu_value(nu)
    params = {"p": p, "q": q, "sigma": sigma, "rho": rho, "gamma": gamma}
    a = 1.0 + p * (p - 1.0) / sigma - p / q
    if gamma <= rho:
        return _sup_report("LOR_624", params, nu, lambda s: s ** a / nv(s))
    e = rho * gamma / (p * (gamma - rho) * (p - 1.0))
    return _integral_report("LOR_625", params, nu, lambda s: (s ** a / nv(s)) ** e / s)


def wellposedness_via_lambda(lam: IsoperFn, measure: float, p: float,
                             q: float) -> CriterionReport:
    """The isoperimetric route: the well-posedness test on the lower bound built from lambda."""
    _check_p(p)
    _check_q(q)
    nu = nu_from_lambda(lam, p, measure)
    inner = nu.phi_at
    params = {"p": p, "q": q}
    notes = ("isocapacitary lower bound derived from the isoperimetric function",)
    pp = p / (p - 1.0)

    def wrap(rep: CriterionReport, cid: str) -> CriterionReport:
        return CriterionReport(cid, params, rep.verdict, rep.quantity, notes + rep.notes,
                               rep.exponent, rep.log_exponent)

    # evaluate s^{a} (int_s^{M/2} lambda^{-p'})^{b} directly
    def checked(s):
        v = inner(s)
        if not math.isfinite(v):
            raise NonFiniteIntegrand("int lambda^{-p'} diverges")
        return v

    # the integral is the criterion itself, so a divergent test is a definite failure
    exact = IsocapFn(p=p, measure=nu.measure, evaluate=nu.evaluate, weight=nu.weight,
                     exactness="exact", phi=nu.phi)
    if q == 1:
        rep = _integral_report("ISO_302", params, exact,
                               lambda s: s ** (1.0 / p) * checked(s) ** (1.0 / pp) / s)
        return wrap(rep, "ISO_302")
    qq = conjugate(q)
    rep = _integral_report("ISO_301", params, exact,
                           lambda s: s ** (qq / p) * checked(s) ** (qq / pp))
    return wrap(rep, "ISO_301")


def embedding_condition(nu: IsocapFn, measure: float, p: float, sigma: float) -> CriterionReport:
    """Condition for V^{1,p} -> L^sigma: sup form for p <= sigma, integral form for sigma < p."""
    _check_p(p)
    if sigma < 1:
        raise CriterionError("embedding condition needs sigma >= 1")
    nv = _nu_value(nu)
    params = {"p": p, "sigma": sigma}
    a = p / sigma
    if p <= sigma:
        return _sup_report("EMB_2002", params, nu, lambda s: s ** a / nv(s))
    e = sigma / (p - sigma)
    return _integral_report("EMB_2002p", params, nu, lambda s: (s ** a / nv(s)) ** e / s)
