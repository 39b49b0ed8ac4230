"""Weighted one-dimensional p-Laplace Neumann oracle and inequality checks.

On (0, T) with cross-section weight A, the problem

    -(A |u'|^{p-2} u')' = A f,    A |u'|^{p-2} u' = 0 at both ends,

integrates once to A |u'|^{p-2} u' = -F with F(t) = int_0^t A f, so

    u'(t) = -sign(F) |F / A|^{1/(p-1)}.

Balls, cusps, funnels and intervals all reduce to this form for data that
depend on the profile coordinate only.  Cell integrals use 8-point
Gauss-Legendre rules split at the jumps of the datum, so nodal values are
accurate to high order; the piecewise-constant cell representation handed to
the rearrangement tools is first-order accurate in the grid step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .bounds import (PROP_540, THM_A, THM_CONFRGRAD, BoundCurve, flux_majorant,
                     stability_exponents)
from .domains import IsocapFn
from .numerics import integrate_adaptive
from .rearrange import (AnalyticDecreasing, RearrangedDatum, SampledFn, StepFunction,
                        decreasing_rearrangement)

COMPAT_TOL = 1e-10
STRICT_SLACK = 1e-3
DEFAULT_CELLS = 10_000

_GX, _GW = np.polynomial.legendre.leggauss(8)


class IncompatibleDatum(ValueError):
    """int A f != 0: the Neumann problem has no solution."""


def _vectorized(fn: Callable) -> Callable:
    probe = np.array([0.25, 0.5, 0.75])
    try:
        out = np.asarray(fn(probe), dtype=float)
        if out.shape == probe.shape:
            return lambda x: np.asarray(fn(x), dtype=float) * np.ones_like(x, dtype=float)
        if out.ndim == 0:
            return lambda x: np.asarray(fn(x), dtype=float) * np.ones_like(x, dtype=float)
    except Exception:
        pass
    return np.vectorize(lambda x: float(fn(x)), otypes=[float])


def _gl(fn, lo, hi):
    """Gauss-Legendre integrals of fn over each [lo_i, hi_i] (arrays)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    x = mid[..., None] + half[..., None] * _GX
    return half * (fn(x) @ _GW)


@dataclass(frozen=True)
class NeumannSolution:
    t: np.ndarray                 # nodes, uniform on [0, T]
    u: np.ndarray                 # nodal solution (median removed)
    du: np.ndarray                # nodal derivative
    F: np.ndarray                 # nodal flux primitive int_0^t A f (drift corrected)
    p: float
    A: Callable
    f: Callable
    breaks: tuple
    compatibility_residual: float
    median_normalized: bool
    median_shift: float
    pieces: np.ndarray = field(repr=False)     # cell edges refined at the datum breaks
    cum_af: np.ndarray = field(repr=False)     # int_0^{pieces_j} A f, drift corrected
    cum_mass: np.ndarray = field(repr=False)   # int_0^{pieces_j} A
    drift: float = 0.0
    u_pieces: Optional[np.ndarray] = field(repr=False, default=None)  # u at the piece edges

    @property
    def T(self) -> float:
        return float(self.t[-1])

    @property
    def measure(self) -> float:
        return float(self.cum_mass[-1])

    @property
    def cells(self) -> int:
        return len(self.t) - 1

    # pointwise evaluation -------------------------------------------------
    def _piece(self, x):
        j = np.searchsorted(self.pieces, x, side="right") - 1
        return np.clip(j, 0, len(self.pieces) - 2)

    def F_at(self, x):
        x = np.asarray(x, dtype=float)
        j = self._piece(x)
        lo = self.pieces[j]
        af = _gl(lambda y: self.A(y) * self.f(y), lo, x)
        m = _gl(self.A, lo, x)
        return self.cum_af[j] + af - self.drift * m

    def mass_at(self, x):
        x = np.asarray(x, dtype=float)
        j = self._piece(x)
        return self.cum_mass[j] + _gl(self.A, self.pieces[j], x)

    def du_at(self, x):
        x = np.asarray(x, dtype=float)
        Fx = self.F_at(x)
        Ax = self.A(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(Ax > 0, np.abs(Fx) / np.where(Ax > 0, Ax, 1.0), 0.0)
        return -np.sign(Fx) * r ** (1.0 / (self.p - 1.0))

    def u_at(self, x):
        """Piecewise-linear interpolant of the nodal values."""
        return np.interp(x, self.t, self.u)

    def u_exact(self, x):
        """u from its piece-edge value plus a Gauss-Legendre integral of u'."""
        x = np.asarray(x, dtype=float)
        j = self._piece(x)
        return self.u_pieces[j] + _gl(self.du_at, self.pieces[j], x)

    # discrete models ------------------------------------------------------
    def subcells(self, refine: int = 8):
        """Sub-cell edges, midpoints and masses (A-weighted)."""
        e = np.linspace(0.0, self.T, self.cells * refine + 1)
        return e, 0.5 * (e[1:] + e[:-1]), _gl(self.A, e[:-1], e[1:])

    def sampled_u(self, refine: int = 8, sign: Optional[str] = None) -> SampledFn:
        _, mid, m = self.subcells(refine)
        v = self.u_at(mid)
        if sign == "plus":
            v = np.maximum(v, 0.0)
        elif sign == "minus":
            v = np.maximum(-v, 0.0)
        return SampledFn(v, m)

    def sampled_gradient(self, refine: int = 8, sign: Optional[str] = None) -> SampledFn:
        _, mid, m = self.subcells(refine)
        g = np.abs(self.du_at(mid))
        if sign is not None:
            uv = self.u_at(mid)
            g = np.where((uv > 0) if sign == "plus" else (uv < 0), g, 0.0)
        return SampledFn(g, m)

    def cell_values(self) -> np.ndarray:
        """Piecewise-constant representation: the interpolant at cell midpoints."""
        return 0.5 * (self.u[1:] + self.u[:-1])

    def cell_error(self, exact: Callable) -> float:
        """Sup-norm distance between the cell representation and an exact u.

        Within a cell u is monotone for fine grids, so the sup is attained at
        one of the two cell ends.
        """
        ex = np.asarray(exact(self.t), dtype=float)
        c = self.cell_values()
        return float(max(np.max(np.abs(c - ex[:-1])), np.max(np.abs(c - ex[1:]))))

    # level sets -----------------------------------------------------------
    def mass_where(self, c: float, above: bool = True) -> float:
        """Mass of {u > c} (or {u < c}) for the piecewise-linear interpolant."""
        v = self.u - c if above else c - self.u
        return _positive_mass(self, v)

    def crossings(self, level: float) -> np.ndarray:
        """Points where u crosses ``level`` transversally."""
        return self.crossings_many(np.array([float(level)]))[1]

    def crossings_many(self, levels: np.ndarray):
        """(level index, crossing point) pairs for many levels at once.

        Crossings of the nodal interpolant are polished by Newton steps on the
        exact u, kept inside the bracketing cell.
        """
        levels = np.asarray(levels, dtype=float)
        a = self.u[None, :-1] - levels[:, None]
        b = self.u[None, 1:] - levels[:, None]
        li, k = np.nonzero(((a > 0) & (b <= 0)) | ((a <= 0) & (b > 0)))
        ak, bk = a[li, k], b[li, k]
        x = self.t[k] + ak / (ak - bk) * (self.t[k + 1] - self.t[k])
        if self.u_pieces is not None and len(x):
            lo, hi, lev = self.t[k], self.t[k + 1], levels[li]
            for _ in range(3):
                d = self.du_at(x)
                step = np.where(d != 0, (self.u_exact(x) - lev) / np.where(d != 0, d, 1.0), 0.0)
                x = np.clip(x - step, lo, hi)
        return li, x

    def refined(self, factor: int = 2) -> "NeumannSolution":
        return solve_weighted_neumann(self.A, self.p, self.f, self.T, self.cells * factor,
                                      self.breaks, self.median_normalized)


def _positive_mass(sol: NeumannSolution, v: np.ndarray) -> float:
    t = sol.t
    a, b = v[:-1], v[1:]
    full = (a > 0) & (b > 0)
    total = float(np.sum(np.diff(sol.mass_at(t))[full])) if full.any() else 0.0
    part = (a > 0) != (b > 0)
    if part.any():
        k = np.nonzero(part)[0]
        ak, bk = a[k], b[k]
        tc = t[k] + ak / (ak - bk) * (t[k + 1] - t[k])
        lo = np.where(ak > 0, t[k], tc)
        hi = np.where(ak > 0, tc, t[k + 1])
        total += float(np.sum(_gl(sol.A, lo, hi)))
    return total


def _median_shift(sol_u, sol: NeumannSolution) -> float:
    """sup{c : mass{u > c} >= M/2} for the piecewise-linear interpolant."""
    half = 0.5 * sol.measure
    lo, hi = float(sol_u.min()), float(sol_u.max())
    if hi == lo:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _positive_mass(sol, sol_u - mid) >= half:
            lo = mid
        else:
            hi = mid
    return lo


def solve_weighted_neumann(A: Callable, p: float, f: Callable, T: float = 1.0,
                           cells: int = DEFAULT_CELLS, breaks: Sequence[float] = (),
                           normalize: bool = True) -> NeumannSolution:
    """Solve the weighted Neumann problem on a uniform grid of ``cells`` cells.

    ``A`` and ``f`` are vectorised callables; ``breaks`` lists the jumps of f.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    if cells < 2:
        raise ValueError("need at least two cells")
    A = _vectorized(A)
    f = _vectorized(f)
    breaks = tuple(sorted(float(b) for b in breaks if 0 < b < T))
    t = np.linspace(0.0, T, cells + 1)
    probe = A(0.5 * (t[1:] + t[:-1]))
    if np.any(probe <= 0) or np.any(A(t[1:-1]) < 0):
        raise ValueError("weight A must be positive inside (0, T) (a vanishing A disconnects the domain)")

    pts = list(breaks) or None
    # positive and negative parts separately: relative tolerances stay meaningful
    pos = integrate_adaptive(lambda x: max(float(A(np.array(x)) * f(np.array(x))), 0.0), 0.0, T,
                             rel_tol=1e-13, limit=500, points=pts)
    neg = integrate_adaptive(lambda x: max(-float(A(np.array(x)) * f(np.array(x))), 0.0), 0.0, T,
                             rel_tol=1e-13, limit=500, points=pts)
    total, scale = pos - neg, pos + neg
    residual = abs(total) / scale if scale > 0 else 0.0
    if residual > COMPAT_TOL:
        raise IncompatibleDatum(
            f"compatibility condition int A f = 0 violated (relative residual {residual:.3e})")

    pieces = np.unique(np.concatenate([t, breaks]))
    af = _gl(lambda y: A(y) * f(y), pieces[:-1], pieces[1:])
    mass = _gl(A, pieces[:-1], pieces[1:])
    cum_af = np.concatenate([[0.0], np.cumsum(af)])
    cum_mass = np.concatenate([[0.0], np.cumsum(mass)])
    # remove the discrete drift so that F(T) = 0 exactly (f -> f - const)
    drift = cum_af[-1] / cum_mass[-1]
    cum_af = cum_af - drift * cum_mass

    base = NeumannSolution(t=t, u=np.zeros_like(t), du=np.zeros_like(t), F=np.zeros_like(t),
                           p=p, A=A, f=f, breaks=breaks, compatibility_residual=residual,
                           median_normalized=False, median_shift=0.0, pieces=pieces,
                           cum_af=cum_af, cum_mass=cum_mass, drift=drift)
    node_idx = np.searchsorted(pieces, t)
    F = cum_af[node_idx]
    F[0] = 0.0
    F[-1] = 0.0
    Ax = A(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        du = -np.sign(F) * np.where(Ax > 0, np.abs(F) / np.where(Ax > 0, Ax, 1.0), 0.0) ** (1.0 / (p - 1.0))
    if Ax[0] <= 0:
        du[0] = du[1]  # one-sided value at the degenerate end (zero measure)
    if Ax[-1] <= 0:
        du[-1] = du[-2]
    incr = _gl(base.du_at, pieces[:-1], pieces[1:])
    u_pieces = np.concatenate([[0.0], np.cumsum(incr)])
    u = u_pieces[node_idx]

    base = NeumannSolution(t=t, u=u, du=du, F=F, p=p, A=A, f=f, breaks=breaks,
                           compatibility_residual=residual, median_normalized=False,
                           median_shift=0.0, pieces=pieces, cum_af=cum_af, cum_mass=cum_mass,
                           drift=drift, u_pieces=u_pieces)
    if not normalize:
        return base
    c = _median_shift(u, base)
    return NeumannSolution(t=t, u=u - c, du=du, F=F, p=p, A=A, f=f, breaks=breaks,
                           compatibility_residual=residual, median_normalized=True,
                           median_shift=c, pieces=pieces, cum_af=cum_af, cum_mass=cum_mass,
                           drift=drift, u_pieces=u_pieces - c)


# ---------------------------------------------------------------------------
# rearrangement-level quantities


def weighted_gradient_rearrangement(sol: NeumannSolution, sign: Optional[str] = None,
                                    refine: int = 8) -> StepFunction:
    """|u'|^* (or |(u_pm)'|^*) with respect to the measure A dt."""
    return decreasing_rearrangement(sol.sampled_gradient(refine, sign))


def solution_rearrangement(sol: NeumannSolution, sign: str, refine: int = 8) -> StepFunction:
    return decreasing_rearrangement(sol.sampled_u(refine, sign))


def level_fluxes(sol: NeumannSolution, levels, sign: str = "plus", chunk: int = 256) -> np.ndarray:
    """Sum over crossings of {u_pm = level} of A |u'|^{p-1} (= |F| there), per level."""
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    c = levels if sign == "plus" else -levels
    out = np.zeros(len(levels))
    for start in range(0, len(levels), chunk):
        li, x = sol.crossings_many(c[start:start + chunk])
        if len(x):
            np.add.at(out, start + li, np.abs(sol.F_at(x)))
    return out


def level_flux(sol: NeumannSolution, level: float, sign: str = "plus") -> float:
    return float(level_fluxes(sol, [level], sign)[0])


def level_mass(sol: NeumannSolution, level: float, sign: str = "plus") -> float:
    """mu_{u_pm}(level) = |{u_pm >= level}| for level > 0."""
    if sign == "plus":
        return sol.mass_where(level, above=True)
    return sol.mass_where(-level, above=False)


def _level_extent(sol, sign):
    return float(sol.u.max()) if sign == "plus" else float(-sol.u.min())


def _level_integrals(sol: NeumannSolution, t_grid, sign: str, g: Callable[[float], float],
                     sub: int = 4) -> np.ndarray:
    """int_0^t g(flux(tau)) dtau at each t of t_grid, by cumulative Gauss-Legendre panels."""
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    knots = np.unique(np.concatenate([[0.0], t[t > 0]]))
    edges = [knots[0]]
    for lo, hi in zip(knots[:-1], knots[1:]):
        edges.extend(np.linspace(lo, hi, sub + 1)[1:])
    edges = np.array(edges)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
    x = mid[:, None] + half[:, None] * _GX
    vals = np.array([g(v) for v in level_fluxes(sol, x.ravel(), sign)]).reshape(x.shape)
    cum = np.concatenate([[0.0], np.cumsum(half * (vals @ _GW))])
    out = cum[np.searchsorted(edges, np.maximum(t, 0.0))]
    return np.where(t > 0, out, 0.0)


def psi_function(sol: NeumannSolution, t_grid, sign: str = "plus", sub: int = 4) -> np.ndarray:
    """psi(t) = int_0^t dtau / flux(tau)^{1/(p-1)} at each t of t_grid.

    Levels with zero flux (flat pieces) are excluded from the integral.
    """
    e = 1.0 / (sol.p - 1.0)
    return _level_integrals(sol, t_grid, sign, lambda fl: fl ** (-e) if fl > 0 else 0.0, sub)


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    worst_at: Optional[float]
    worst_excess: float
    lhs: np.ndarray = field(repr=False, default=None)
    rhs: np.ndarray = field(repr=False, default=None)
    grid: np.ndarray = field(repr=False, default=None)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"name": self.name, "passed": bool(self.passed), "worst_at": self.worst_at,
             "worst_excess": self.worst_excess}
        d.update(self.details)
        return d


def _compare(name, grid, lhs, rhs, slack_abs, details=None) -> CheckReport:
    excess = lhs - rhs - slack_abs
    k = int(np.argmax(excess)) if len(excess) else 0
    worst = float(excess[k]) if len(excess) else -math.inf
    return CheckReport(name, bool(worst <= 0), float(grid[k]) if len(grid) else None, worst,
                       lhs, rhs, np.asarray(grid), details or {})


def verify_bound(sol: NeumannSolution, curve: BoundCurve, mode: str = "strict",
                 refine: int = 8) -> CheckReport:
    """Compare u_pm^* (THM_A) or |grad u_pm|^* (gradient curves) against a bound curve.

    strict: LHS <= B + 1e-3 max B at every grid point.
    fitted_constant: K = sup LHS/B, required stable within 10% under grid doubling.
    """
    s = curve.s_grid

    def lhs_for(solution):
        if curve.provenance == THM_A:
            star = solution_rearrangement(solution, curve.sign, refine)
        elif curve.provenance in (THM_CONFRGRAD, PROP_540):
            star = weighted_gradient_rearrangement(solution, curve.sign, refine)
        else:
            raise ValueError(f"unknown provenance {curve.provenance!r}")
        return np.asarray(star(s))

    lhs = lhs_for(sol)
    B = curve.values
    name = f"{curve.provenance}[{curve.sign}]"
    if mode == "strict":
        if not curve.constants_known:
            raise ValueError("strict mode needs a bound with known constants (exact nu_p)")
        top = float(np.max(B[np.isfinite(B)], initial=0.0))
        return _compare(name, s, lhs, B, STRICT_SLACK * top, {"mode": "strict"})
    if mode != "fitted_constant":
        raise ValueError("mode must be 'strict' or 'fitted_constant'")
    pos = B > 0
    K = float(np.max(lhs[pos] / B[pos], initial=0.0))
    K2 = float(np.max(lhs_for(sol.refined(2))[pos] / B[pos], initial=0.0))
    stable = K == K2 or (K > 0 and abs(K2 - K) <= 0.1 * K)
    return CheckReport(name, stable, None, K2 - K, lhs, B, s,
                       {"mode": "fitted_constant", "K": K, "K_refined": K2})


def verify_flux_inequality(sol: NeumannSolution, f: RearrangedDatum, t_grid,
                           sign: str = "plus") -> CheckReport:
    """Level flux <= int_0^{mu(t)} f_pm^* at the sampled levels."""
    t = np.asarray(t_grid, dtype=float)
    lhs = level_fluxes(sol, t, sign)
    rhs = np.array([flux_majorant(f, level_mass(sol, x, sign), sign) for x in t])
    top = float(np.max(rhs, initial=0.0))
    return _compare(f"flux[{sign}]", t, lhs, rhs, STRICT_SLACK * top, {"levels": len(t)})


def verify_isocap_levelset(sol: NeumannSolution, nu: IsocapFn, t_grid,
                           sign: str = "plus") -> CheckReport:
    """nu_p(|{u_pm >= t}|) <= psi(t)^{1-p} at the sampled levels (relative slack)."""
    t = np.asarray(t_grid, dtype=float)
    if _level_extent(sol, sign) <= 0:
        return CheckReport(f"levelset[{sign}]", True, None, 0.0, details={"skipped": "constant u"})
    psi = psi_function(sol, t, sign)
    mu = np.array([level_mass(sol, x, sign) for x in t])
    lhs = np.array([nu(m) if m < nu.half else math.inf for m in mu])
    rhs = psi ** (1.0 - sol.p)
    return _compare(f"levelset[{sign}]", t, lhs, rhs, 0.0 * rhs + STRICT_SLACK * rhs,
                    {"levels": len(t)})


def verify_coarea(sol: NeumannSolution, t_grid=None, sign: str = "plus") -> CheckReport:
    """int_{0<u_pm<=t} A |u'|^p = int_0^t flux(tau) dtau at each sampled level."""
    top = _level_extent(sol, sign)
    if top <= 0:
        return CheckReport(f"coarea[{sign}]", True, None, 0.0, details={"skipped": "u_pm = 0"})
    if t_grid is None:
        t_grid = np.linspace(0.1, 0.9, 9) * top
    t_grid = np.asarray(t_grid, dtype=float)
    rhs = _level_integrals(sol, t_grid, sign, lambda fl: fl, sub=8)
    lhs = [_energy_between(sol, 0.0, tt, sign) for tt in t_grid]
    lhs, rhs = np.array(lhs), np.array(rhs)
    rel = np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1e-300)
    k = int(np.argmax(rel))
    return CheckReport(f"coarea[{sign}]", bool(rel.max() <= 1e-6), float(t_grid[k]),
                       float(rel.max()), lhs, rhs, np.asarray(t_grid), {"rel_tol": 1e-6})


def _energy_between(sol: NeumannSolution, lo: float, hi: float, sign: str) -> float:
    """int over {lo < u_pm <= hi} of A |u'|^p, pieces cut at the interpolant crossings."""
    v = sol.u if sign == "plus" else -sol.u
    sg = 1.0 if sign == "plus" else -1.0
    cuts = np.concatenate([sol.t, sol.crossings(sg * lo), sol.crossings(sg * hi)])
    cuts = np.unique(cuts)
    mid = 0.5 * (cuts[1:] + cuts[:-1])
    vm = np.interp(mid, sol.t, v)
    keep = (vm > lo) & (vm <= hi)
    if not keep.any():
        return 0.0
    a, b = cuts[:-1][keep], cuts[1:][keep]
    return float(np.sum(_gl(lambda y: sol.A(y) * np.abs(sol.du_at(y)) ** sol.p, a, b)))


# ---------------------------------------------------------------------------
# stability


def weighted_norm(values_fn: Callable, A: Callable, T: float, q: float, breaks=()) -> float:
    A = _vectorized(A)
    g = _vectorized(values_fn)
    if math.isinf(q):
        x = np.linspace(0.0, T, 200_001)
        return float(np.max(np.abs(g(x))))
    pts = list(breaks) or None
    val = integrate_adaptive(lambda x: float(A(np.array(x)) * abs(g(np.array(x))) ** q), 0.0, T,
                             points=pts)
    return val ** (1.0 / q)


def gradient_difference_norm(s1: NeumannSolution, s2: NeumannSolution) -> float:
    """||u_1' - u_2'||_{L^{p-1}(A dt)}."""
    r = s1.p - 1.0
    e = np.unique(np.concatenate([s1.pieces, s2.pieces]))
    val = np.sum(_gl(lambda y: s1.A(y) * np.abs(s1.du_at(y) - s2.du_at(y)) ** r, e[:-1], e[1:]))
    return float(val ** (1.0 / r))


@dataclass(frozen=True)
class StabilityReport:
    p: float
    q: float
    homogeneity_error: float
    homogeneity_ok: bool
    K: float
    K_refined: float
    refinement_ok: bool
    eps: tuple
    K_eps: tuple
    eps_bounded: bool

    @property
    def passed(self) -> bool:
        return self.homogeneity_ok and self.refinement_ok and self.eps_bounded

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()} | {
            "passed": self.passed}


def _stability_sides(A, p, f, g, T, cells, q, breaks):
    sf = solve_weighted_neumann(A, p, f, T, cells, breaks)
    sg = solve_weighted_neumann(A, p, g, T, cells, breaks)
    lhs = gradient_difference_norm(sf, sg)
    ex = stability_exponents(p)
    d = weighted_norm(lambda x: f(x) - g(x), A, T, q, breaks)
    nf = weighted_norm(f, A, T, q, breaks)
    ng = weighted_norm(g, A, T, q, breaks)
    rhs = d ** ex.exp_diff * (nf + ng) ** ex.exp_sum
    return lhs, rhs


def verify_stability(A: Callable, p: float, f: Callable, g: Callable, T: float = 1.0,
                     cells: int = 2000, q: float = 2.0, breaks=(),
                     perturbation: Optional[Callable] = None,
                     eps: Sequence[float] = (0.2, 0.1, 0.05, 0.025, 0.0125),
                     scales: Sequence[float] = (0.5, 2.0, 3.0)) -> StabilityReport:
    """Structure of the stability estimate with a fitted constant K.

    (a) homogeneity: (f, g) -> (t f, t g) scales both sides by t^{1/(p-1)};
    (b) K = LHS/RHS stable within 10% under grid doubling;
    (c) along g = f + eps h, eps -> 0, K does not grow beyond 10% of its first value.
    """
    fv, gv = _vectorized(f), _vectorized(g)
    lhs, rhs = _stability_sides(A, p, fv, gv, T, cells, q, breaks)
    herr = 0.0
    for t in scales:
        l2, r2 = _stability_sides(A, p, lambda x: t * fv(x), lambda x: t * gv(x), T, cells, q, breaks)
        expect = t ** (1.0 / (p - 1.0))
        if lhs > 0:
            herr = max(herr, abs(l2 / lhs / expect - 1.0))
        if rhs > 0:
            herr = max(herr, abs(r2 / rhs / expect - 1.0))
    K = lhs / rhs if rhs > 0 else 0.0
    l2, r2 = _stability_sides(A, p, fv, gv, T, 2 * cells, q, breaks)
    K2 = l2 / r2 if r2 > 0 else 0.0
    ref_ok = (K == K2) or (K > 0 and abs(K2 - K) <= 0.1 * K)
    Ks = []
    if perturbation is not None:
        hv = _vectorized(perturbation)
        for e in eps:
            le, re = _stability_sides(A, p, fv, lambda x, e=e: fv(x) + e * hv(x), T, cells, q, breaks)
            Ks.append(le / re)
    bounded = (not Ks) or max(Ks) <= 1.1 * Ks[0]
    return StabilityReport(p, q, herr, herr <= 1e-8, K, K2, ref_ok, tuple(eps) if Ks else (),
                           tuple(Ks), bounded)


# ---------------------------------------------------------------------------
# test data with closed-form rearrangements


@dataclass(frozen=True)
class Datum:
    name: str
    f: Callable
    breaks: tuple
    plus: Callable[[], object]
    minus: Callable[[], object]

    def rearranged(self, q: float = 2.0, measure: float = 1.0) -> RearrangedDatum:
        return RearrangedDatum(self.plus(), self.minus(), q, measure)


def _cos_star(c, support, freq):
    # c cos(freq pi s) on (0, support)
    return AnalyticDecreasing(lambda s: c * np.cos(freq * np.pi * np.asarray(s)), support,
                              cumulative=lambda r: c * math.sin(freq * math.pi * r) / (freq * math.pi),
                              sup=c)


def interval_data() -> dict:
    """Five compatible data on (0, 1) with A = 1 and their exact f_pm^*."""
    half_lin = lambda: AnalyticDecreasing(lambda s: 0.5 - np.asarray(s), 0.5,
                                          cumulative=lambda r: 0.5 * r - 0.5 * r * r, sup=0.5)
    return {
        "cos2pi": Datum("cos2pi", lambda t: np.cos(2 * np.pi * t), (),
                        lambda: _cos_star(1.0, 0.5, 1.0), lambda: _cos_star(1.0, 0.5, 1.0)),
        "sign": Datum("sign", lambda t: np.where(np.asarray(t) < 0.5, 1.0, -1.0), (0.5,),
                      lambda: StepFunction([0.0, 0.5], [1.0]),
                      lambda: StepFunction([0.0, 0.5], [1.0])),
        "cospi": Datum("cospi", lambda t: np.cos(np.pi * t), (),
                       lambda: _cos_star(1.0, 0.5, 1.0), lambda: _cos_star(1.0, 0.5, 1.0)),
        "step": Datum("step", lambda t: np.where(np.asarray(t) < 0.25, 3.0, -1.0), (0.25,),
                      lambda: StepFunction([0.0, 0.25], [3.0]),
                      lambda: StepFunction([0.0, 0.75], [1.0])),
        "linear": Datum("linear", lambda t: np.asarray(t) - 0.5, (), half_lin, half_lin),
    }


def ball_data(n: int = 3) -> dict:
    """Compatible data for the radial model A = t^(n-1) on (0, 1), measure 1/n."""
    a = 0.5 ** (1.0 / n)
    M = 1.0 / n
    m_lin = n / (n + 1.0)  # weighted mean of t
    top = (1.0 - m_lin ** n) / n
    bottom = m_lin ** n / n

    def lin_plus():
        return AnalyticDecreasing(
            lambda s: (1.0 - n * np.asarray(s)) ** (1.0 / n) - m_lin, top,
            cumulative=lambda r: (1.0 - (1.0 - n * r) ** ((n + 1.0) / n)) / (n + 1.0) - m_lin * r,
            sup=1.0 - m_lin)

    def lin_minus():
        return AnalyticDecreasing(
            lambda s: m_lin - (n * np.asarray(s)) ** (1.0 / n), bottom,
            cumulative=lambda r: m_lin * r - n ** (1.0 / n) * r ** (1.0 + 1.0 / n) / (1.0 + 1.0 / n),
            sup=m_lin)

    return {
        "sign": Datum("sign", lambda t: np.where(np.asarray(t) < a, 1.0, -1.0), (a,),
                      lambda: StepFunction([0.0, M / 2], [1.0]),
                      lambda: StepFunction([0.0, M / 2], [1.0])),
        "linear": Datum("linear", lambda t: np.asarray(t) - m_lin, (), lin_plus, lin_minus),
    }
