"""Rearrangements of sampled functions on a weighted mass axis.

A sampled function is piecewise constant on cells carrying masses m_i.  Its
decreasing rearrangement is an exact step function on (0, M): the value v_k
is taken on (S_{k-1}, S_k], so u* is left-continuous, in agreement with
u*(s) = sup{t >= 0 : mu(t) >= s}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .numerics import (classify_improper, generalized_left_inverse, integrate_adaptive,
                       log_grid, panel_integrals)

HL_SLACK = 1e-10
COMPAT_TOL = 1e-10


@dataclass(frozen=True)
class SampledFn:
    """Cell values ``values`` with cell masses ``masses`` (A_i * dt_i)."""

    values: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        m = np.asarray(self.masses, dtype=float)
        if v.shape != m.shape or v.ndim != 1:
            raise ValueError("values and masses must be 1D arrays of equal length")
        if np.any(m < 0):
            raise ValueError("cell masses must be non-negative")
        if m.sum() <= 0:
            raise ValueError("total mass must be positive")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "masses", m)

    @property
    def measure(self) -> float:
        return float(self.masses.sum())

    @classmethod
    def from_function(cls, f: Callable, T: float = 1.0, n: int = 1000,
                      weight: Optional[Callable] = None) -> "SampledFn":
        """Midpoint samples of f on n uniform cells of (0, T), masses int_cell A."""
        edges = np.linspace(0.0, T, n + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        vals = np.asarray(f(mid), dtype=float) * np.ones_like(mid)
        if weight is None:
            masses = np.diff(edges)
        else:
            masses = panel_integrals(lambda x: np.asarray(weight(x), dtype=float) * np.ones_like(x), edges)
        return cls(vals, masses)

    def with_values(self, values) -> "SampledFn":
        return SampledFn(np.asarray(values, dtype=float), self.masses)

    def integral(self) -> float:
        return float(np.dot(self.values, self.masses))

    def lq_norm(self, q: float) -> float:
        a = np.abs(self.values)
        if math.isinf(q):
            return float(a[self.masses > 0].max(initial=0.0))
        return float(np.dot(a ** q, self.masses) ** (1.0 / q))


class StepFunction:
    """Non-increasing step function: ``values[k]`` on (breaks[k], breaks[k+1]]."""

    def __init__(self, breaks, values):
        b = np.asarray(breaks, dtype=float)
        v = np.asarray(values, dtype=float)
        if b.ndim != 1 or len(b) != len(v) + 1:
            raise ValueError("need len(breaks) == len(values) + 1")
        if np.any(np.diff(b) < 0):
            raise ValueError("breaks must be non-decreasing")
        self.breaks = b
        self.values = v
        self._cum = np.concatenate([[0.0], np.cumsum(v * np.diff(b))])

    @property
    def measure(self) -> float:
        return float(self.breaks[-1])

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=float)
        k = np.searchsorted(self.breaks, s_arr, side="left") - 1
        k = np.clip(k, 0, len(self.values) - 1)
        out = np.where(s_arr > self.measure, 0.0, self.values[k] if len(self.values) else 0.0)
        return float(out) if out.ndim == 0 else out

    def cumulative(self, r):
        """int_0^r, exact (piecewise linear in r)."""
        r_arr = np.clip(np.asarray(r, dtype=float), 0.0, self.measure)
        k = np.searchsorted(self.breaks, r_arr, side="right") - 1
        k = np.clip(k, 0, len(self.values) - 1)
        out = self._cum[k] + self.values[k] * (r_arr - self.breaks[k])
        return float(out) if out.ndim == 0 else out

    def scaled(self, t: float) -> "StepFunction":
        return StepFunction(self.breaks, t * self.values)

    def power_integral(self, q: float) -> float:
        return float(np.dot(self.values ** q, np.diff(self.breaks)))

    def sup(self) -> float:
        return float(self.values.max(initial=0.0))

    def kinks(self) -> np.ndarray:
        return self.breaks


class AnalyticDecreasing:
    """A non-increasing function on (0, measure) given in closed form."""

    def __init__(self, fn: Callable, measure: float, cumulative: Optional[Callable] = None,
                 breaks=(), sup: Optional[float] = None):
        self.fn = fn
        self._measure = float(measure)
        self._cumulative = cumulative
        self._breaks = np.unique(np.concatenate([[0.0, self._measure], np.asarray(breaks, dtype=float)]))
        self._sup = sup

    @property
    def measure(self) -> float:
        return self._measure

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=float)
        out = np.where(s_arr > self._measure, 0.0, np.asarray(self.fn(np.minimum(s_arr, self._measure)), dtype=float))
        return float(out) if out.ndim == 0 else out

    def cumulative(self, r):
        if np.ndim(r) > 0:
            return np.array([self.cumulative(float(x)) for x in np.ravel(r)]).reshape(np.shape(r))
        r = min(max(float(r), 0.0), self._measure)
        if self._cumulative is not None:
            return float(self._cumulative(r))
        if r == 0:
            return 0.0
        pts = self._breaks[(self._breaks > 0) & (self._breaks < r)]
        return integrate_adaptive(lambda x: float(self.fn(x)), 0.0, r,
                                  points=list(pts) if len(pts) else None)

    def scaled(self, t: float) -> "AnalyticDecreasing":
        c = self._cumulative
        return AnalyticDecreasing(lambda s: t * np.asarray(self.fn(s)), self._measure,
                                  None if c is None else (lambda r: t * c(r)),
                                  self._breaks[1:-1], None if self._sup is None else t * self._sup)

    def power_integral(self, q: float) -> float:
        return integrate_adaptive(lambda x: float(self.fn(x)) ** q, 0.0, self._measure,
                                  points=list(self._breaks[1:-1]) or None)

    def sup(self) -> float:
        if self._sup is not None:
            return self._sup
        return float(self.fn(0.0))

    def kinks(self) -> np.ndarray:
        return self._breaks


def constant_rearrangement(c: float, support: float) -> StepFunction:
    """c times the indicator of (0, support)."""
    return StepFunction([0.0, support], [c])


Decreasing = Union[StepFunction, AnalyticDecreasing]


# ---------------------------------------------------------------------------
# distribution function and rearrangements


def distribution_function(u: SampledFn, t: float) -> float:
    """Mass of {|u| >= t}."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return float(u.masses[np.abs(u.values) >= t].sum())


def decreasing_rearrangement(u: SampledFn) -> StepFunction:
    """u* by a weighted sort of (|value|, mass) pairs."""
    a = np.abs(u.values)
    order = np.argsort(-a, kind="stable")
    v = a[order]
    m = u.masses[order]
    keep = m > 0
    v, m = v[keep], m[keep]
    # merge equal values so that breaks are the distinct distribution jumps
    distinct = np.concatenate([[True], v[1:] != v[:-1]])
    idx = np.cumsum(distinct) - 1
    vals = v[distinct]
    mass = np.bincount(idx, weights=m)
    return StepFunction(np.concatenate([[0.0], np.cumsum(mass)]), vals)


def rearrangement_by_inversion(u: SampledFn) -> StepFunction:
    """u* by inverting the tabulated distribution function at its jumps.

    Independent of the sort: mu is summed directly at each distinct level and
    u*(s) = sup{t : mu(t) >= s} is read off with the generalized inverse.
    """
    a = np.abs(u.values)
    levels = np.unique(a[u.masses > 0])[::-1]           # descending
    mu = np.array([u.masses[a >= t].sum() for t in levels])  # non-decreasing
    idx = np.arange(len(levels), dtype=float)
    vals = []
    for k in range(len(levels)):
        # the first level index j with mu_j >= s for s just above mu_{k-1}
        y = mu[k]
        inv = generalized_left_inverse((idx, mu), y, 0.0, float(len(levels) - 1))
        j = 0 if inv.clamped == "below" else int(inv.value) + 1
        vals.append(levels[min(j, len(levels) - 1)])
    return StepFunction(np.concatenate([[0.0], mu]), np.array(vals))


def increasing_rearrangement(u: SampledFn) -> Callable:
    """u_*(s) = u*(M - s)."""
    star = decreasing_rearrangement(u)
    M = star.measure

    def lower(s):
        s_arr = np.asarray(s, dtype=float)
        # reflection of a left-continuous step function is right-continuous;
        # evaluate from the reflected breaks directly
        k = np.searchsorted(M - star.breaks[::-1], s_arr, side="right") - 1
        k = np.clip(k, 0, len(star.values) - 1)
        out = star.values[::-1][k]
        return float(out) if np.ndim(out) == 0 else out

    return lower


def median(u: SampledFn) -> float:
    """sup{t : mass{u > t} >= M/2} on the discrete model."""
    order = np.argsort(-u.values, kind="stable")
    v = u.values[order]
    cm = np.cumsum(u.masses[order])
    half = 0.5 * u.measure
    last_of_value = np.concatenate([v[1:] != v[:-1], [True]])
    ok = last_of_value & (cm >= half * (1 - 1e-12))
    return float(v[np.nonzero(ok)[0][0]])


def pos_neg_split(u: SampledFn) -> tuple[SampledFn, SampledFn]:
    a = np.abs(u.values)
    return u.with_values((a + u.values) / 2), u.with_values((a - u.values) / 2)


# ---------------------------------------------------------------------------
# norms


def _as_star(u) -> Decreasing:
    if isinstance(u, SampledFn):
        return decreasing_rearrangement(u)
    return u


def lorentz_norm(u, sigma: float, rho: float) -> float:
    """(int_0^M (s^{1/sigma} u*(s))^rho ds/s)^{1/rho}; inf when divergent.

    ``u`` is a SampledFn, a StepFunction u*, or an AnalyticDecreasing u*.
    """
    if sigma <= 0 or rho <= 0:
        raise ValueError("sigma and rho must be positive")
    star = _as_star(u)
    e = rho / sigma
    if isinstance(star, StepFunction):
        b = star.breaks
        terms = star.values ** rho * (sigma / rho) * (b[1:] ** e - b[:-1] ** e)
        return float(terms.sum() ** (1.0 / rho))
    M = star.measure
    verdict = classify_improper(lambda s: s ** (e - 1.0) * float(star(s)) ** rho, 0.0, M)
    if not verdict.converges:
        return math.inf
    return verdict.value ** (1.0 / rho)


def marcinkiewicz_norm(u, omega: Callable) -> float:
    """sup_s omega(s) u*(s) for non-decreasing omega."""
    star = _as_star(u)
    if isinstance(star, StepFunction):
        ends = star.breaks[1:]
        w = np.array([float(omega(s)) for s in ends])
        return float(np.max(w * star.values, initial=0.0))
    M = star.measure
    s = np.concatenate([log_grid(1e-12 * M, M, 2000)])
    return float(max(float(omega(x)) * float(star(x)) for x in s))


def lq_norm(u, q: float) -> float:
    if isinstance(u, SampledFn):
        return u.lq_norm(q)
    if math.isinf(q):
        return u.sup()
    return u.power_integral(q) ** (1.0 / q)


# ---------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class RearrangedDatum:
    """A datum through the rearrangements of its positive and negative parts."""

    f_plus_star: Decreasing
    f_minus_star: Decreasing
    q: float
    measure: float
    f_star: Optional[Decreasing] = None

    def __post_init__(self):
        if not 1 <= self.q <= math.inf:
            raise ValueError("q must lie in [1, inf]")
        ip = self.f_plus_star.cumulative(self.f_plus_star.measure)
        im = self.f_minus_star.cumulative(self.f_minus_star.measure)
        scale = max(ip + im, 1e-300)
        if abs(ip - im) > COMPAT_TOL * scale:
            raise ValueError(f"compatibility condition violated: int f_+ = {ip!r}, int f_- = {im!r}")

    def part(self, sign: str) -> Decreasing:
        if sign in ("plus", "+"):
            return self.f_plus_star
        if sign in ("minus", "-"):
            return self.f_minus_star
        raise ValueError("sign must be 'plus' or 'minus'")

    @property
    def norm_q(self) -> float:
        q = self.q
        if math.isinf(q):
            return max(self.f_plus_star.sup(), self.f_minus_star.sup())
        return (self.f_plus_star.power_integral(q) + self.f_minus_star.power_integral(q)) ** (1.0 / q)

    def norm_1(self, sign: Optional[str] = None) -> float:
        if sign is None:
            return self.norm_1("plus") + self.norm_1("minus")
        part = self.part(sign)
        return part.cumulative(part.measure)

    def scaled(self, t: float) -> "RearrangedDatum":
        return RearrangedDatum(self.f_plus_star.scaled(t), self.f_minus_star.scaled(t), self.q,
                               self.measure, None if self.f_star is None else self.f_star.scaled(t))

    @classmethod
    def from_sampled(cls, f: SampledFn, q: float = 2.0) -> "RearrangedDatum":
        fp, fm = pos_neg_split(f)
        return cls(decreasing_rearrangement(fp), decreasing_rearrangement(fm), q,
                   f.measure, decreasing_rearrangement(f))


# ---------------------------------------------------------------------------
# classical inequalities


def _merged_integral(f: StepFunction, g: Callable, lo_breaks=None) -> float:
    """int_0^M f g for step f and step (or reflected step) g, exact on merged breaks."""
    b = np.unique(np.concatenate([f.breaks, lo_breaks if lo_breaks is not None else []]))
    mid = 0.5 * (b[1:] + b[:-1])
    return float(np.sum(np.asarray(f(mid)) * np.asarray(g(mid)) * np.diff(b)))


@dataclass(frozen=True)
class HLReport:
    lower: float
    middle: float
    upper: float
    passed: bool


def check_hardy_littlewood(u: SampledFn, v: SampledFn) -> HLReport:
    """int u* v_*  <=  int |u v|  <=  int u* v*."""
    if not np.array_equal(u.masses, v.masses):
        raise ValueError("u and v must share the grid and weight")
    us, vs = decreasing_rearrangement(u), decreasing_rearrangement(v)
    M = us.measure
    v_low = increasing_rearrangement(v)
    upper = _merged_integral(us, vs, vs.breaks)
    lower = _merged_integral(us, v_low, M - vs.breaks)
    middle = float(np.dot(np.abs(u.values * v.values), u.masses))
    slack = HL_SLACK * max(1.0, abs(upper))
    return HLReport(lower, middle, upper, lower <= middle + slack and middle <= upper + slack)


@dataclass(frozen=True)
class SubadditivityReport:
    sum_margin: float      # min over s of u*(s/2)+v*(s/2) - (u+v)*(s)
    product_margin: float  # min over s of u*(s/2)v*(s/2) - (uv)*(s)
    passed: bool


def _check_points(*stars: StepFunction) -> np.ndarray:
    """Points where every side of the surrogates is constant in between."""
    b = np.unique(np.concatenate([stars[0].breaks] + [2 * s.breaks for s in stars[1:]]))
    b = b[b <= stars[0].measure]
    mid = 0.5 * (b[1:] + b[:-1])
    pts = np.concatenate([b[1:], mid])
    return pts[pts > 0]


def check_subadditivity_surrogates(u: SampledFn, v: SampledFn) -> SubadditivityReport:
    """(u+v)*(s) <= u*(s/2)+v*(s/2) and (uv)*(s) <= u*(s/2) v*(s/2)."""
    if not np.array_equal(u.masses, v.masses):
        raise ValueError("u and v must share the grid and weight")
    us, vs = decreasing_rearrangement(u), decreasing_rearrangement(v)
    ss = decreasing_rearrangement(u.with_values(u.values + v.values))
    ps = decreasing_rearrangement(u.with_values(u.values * v.values))
    s = _check_points(ss, us, vs)
    sum_margin = float(np.min(us(s / 2) + vs(s / 2) - ss(s)))
    s = _check_points(ps, us, vs)
    prod_margin = float(np.min(us(s / 2) * vs(s / 2) - ps(s)))
    tol = -HL_SLACK * max(1.0, us.sup() + vs.sup(), us.sup() * vs.sup())
    return SubadditivityReport(sum_margin, prod_margin, sum_margin >= tol and prod_margin >= tol)
