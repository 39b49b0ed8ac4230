"""Pointwise a-priori bounds for rearrangements of solutions and gradients.

With phi = nu_p^{1/(1-p)} and w = -phi' the Stieltjes density,

    u_pm^*(s)        <= int_s^{M/2} F(r)^{1/(p-1)} w(r) dr,
    |grad u_pm|^*(s) <= ((2/s) int_{s/2}^{M/2} F(r)^{p'} w(r) dr)^{1/p},

where F(r) = int_0^r f_pm^*.  Curves are evaluated by Gauss-Legendre panels
summed from the right end, with panel edges at the grid points and at the
kinks of F; ``method="adaptive"`` recomputes each point independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import EXACT, IsocapFn
from .numerics import QuadratureError, integrate_adaptive, panel_integrals, weight_sample
from .rearrange import RearrangedDatum

THM_A = "THM_A"
THM_CONFRGRAD = "THM_CONFRGRAD"
PROP_540 = "PROP_540"


@dataclass(frozen=True)
class BoundCurve:
    s_grid: np.ndarray
    values: np.ndarray
    provenance: str
    constants_known: bool
    sign: str = "plus"
    notes: tuple = ()

    def __call__(self, s):
        return np.interp(s, self.s_grid, self.values)

    def rows(self):
        return [(float(s), float(b), self.provenance) for s, b in zip(self.s_grid, self.values)]


@dataclass(frozen=True)
class StabilityExponents:
    r: float
    exp_diff: float
    exp_sum: float


def stability_exponents(p: float) -> StabilityExponents:
    if p <= 1:
        raise ValueError("p must exceed 1")
    r = max(p, 2.0)
    return StabilityExponents(r, 1.0 / r, 1.0 / (p - 1.0) - 1.0 / r)


def flux_majorant(f: RearrangedDatum, mass: float, sign: str = "plus") -> float:
    """int_0^mass f_pm^*."""
    if mass < 0:
        raise ValueError("mass must be non-negative")
    return float(f.part(sign).cumulative(min(mass, f.measure)))


def _density(nu: IsocapFn):
    w = nu.weight
    return np.vectorize(lambda r: weight_sample(w, float(r)), otypes=[float])


def _tail_integrals(h, points: np.ndarray, upper: float, kinks: np.ndarray,
                    per_decade: int = 60, n_linear: int = 400) -> np.ndarray:
    """int_x^upper h for each x in points (all < upper), by right-to-left panel sums."""
    lo = float(points.min())
    base = [points, kinks[(kinks > lo) & (kinks < upper)], [upper],
            np.linspace(lo, upper, n_linear)]
    if upper / lo > 1.0001:
        base.append(np.geomspace(lo, upper, max(2, int(per_decade * math.log10(upper / lo)) + 1)))
    edges = np.unique(np.concatenate(base))
    panels = panel_integrals(h, edges)
    tail = np.concatenate([np.cumsum(panels[::-1])[::-1], [0.0]])
    idx = np.searchsorted(edges, points)
    return tail[idx]


def _check_grid(s_grid, hi, name):
    s = np.asarray(s_grid, dtype=float)
    if s.ndim != 1 or len(s) == 0 or np.any(s <= 0) or np.any(s >= hi):
        raise ValueError(f"{name} grid must lie in (0, {hi:g})")
    return s


def solution_rearrangement_bound(nu: IsocapFn, f: RearrangedDatum, sign: str, s_grid,
                                 method: str = "panel") -> BoundCurve:
    """Upper bound for u_pm^* on (0, M/2)."""
    half = nu.half
    s = _check_grid(s_grid, half, "solution bound")
    part = f.part(sign)
    e = 1.0 / (nu.p - 1.0)
    if method == "adaptive":
        vals = np.array([_adaptive(lambda r: float(part.cumulative(r)) ** e, nu, x, half,
                                   part.kinks()) for x in s])
    else:
        w = _density(nu)
        vals = _tail_integrals(lambda r: np.asarray(part.cumulative(r)) ** e * w(r),
                               s, half, part.kinks())
    notes = () if np.all(np.isfinite(vals)) else ("divergent Stieltjes integral: infinite bound",)
    return BoundCurve(s, vals, THM_A, nu.exactness == EXACT, sign, notes)


def gradient_rearrangement_bound(nu: IsocapFn, f: RearrangedDatum, sign: str, s_grid,
                                 method: str = "panel") -> BoundCurve:
    """Upper bound for |grad u_pm|^* on (0, M); zero where s/2 >= M/2."""
    half = nu.half
    s = _check_grid(s_grid, nu.measure, "gradient bound")
    part = f.part(sign)
    pp = nu.p / (nu.p - 1.0)
    inside = s / 2 < half
    integrals = np.zeros_like(s)
    if inside.any():
        x = s[inside] / 2
        if method == "adaptive":
            integrals[inside] = [_adaptive(lambda r: float(part.cumulative(r)) ** pp, nu, xi,
                                           half, part.kinks()) for xi in x]
        else:
            w = _density(nu)
            integrals[inside] = _tail_integrals(
                lambda r: np.asarray(part.cumulative(r)) ** pp * w(r), x, half, part.kinks())
    vals = (2.0 / s * integrals) ** (1.0 / nu.p)
    notes = []
    if not inside.all():
        notes.append("empty integral for s >= M: bound set to 0")
    if not np.all(np.isfinite(vals)):
        notes.append("divergent Stieltjes integral: infinite bound")
    return BoundCurve(s, vals, THM_CONFRGRAD, nu.exactness == EXACT, sign, tuple(notes))


def _adaptive(g, nu, a, b, kinks):
    if a >= b:
        return 0.0
    pts = [k for k in kinks if a < k < b][:100]
    w = nu.weight

    def h(r):
        return g(r) * weight_sample(w, r)

    try:
        return integrate_adaptive(h, a, b, points=pts or None)
    except QuadratureError as exc:
        return exc.estimate if abs(exc.error) <= 1e-6 * abs(exc.estimate) else math.inf


def omega_p(nu: IsocapFn, s: float) -> float:
    """(s nu_p(s/2)^{1/(p-1)})^{1/p}; infinite where s/2 >= M/2."""
    phi = nu.phi_at(s / 2)
    if phi == 0:
        return math.inf
    return (s / phi) ** (1.0 / nu.p)


def marcinkiewicz_gradient_bound(nu: IsocapFn, f: RearrangedDatum, s: float,
                                 sign: str = "plus") -> float:
    """Pointwise bound 2^{1/p} ||f_pm||_1^{1/(p-1)} (nu_p^{1/(1-p)}(s/2)/s)^{1/p}."""
    if not 0 < s < nu.measure:
        raise ValueError("s must lie in (0, M)")
    p = nu.p
    norm1 = f.norm_1(sign)
    return 2.0 ** (1.0 / p) * norm1 ** (1.0 / (p - 1.0)) * (nu.phi_at(s / 2) / s) ** (1.0 / p)


def marcinkiewicz_curve(nu: IsocapFn, f: RearrangedDatum, sign: str, s_grid) -> BoundCurve:
    s = _check_grid(s_grid, nu.measure, "gradient bound")
    vals = np.array([marcinkiewicz_gradient_bound(nu, f, x, sign) for x in s])
    return BoundCurve(s, vals, PROP_540, nu.exactness == EXACT, sign)
