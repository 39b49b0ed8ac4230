"""Quadrature, endpoint-asymptotics classification, Stieltjes integrals and
generalized inverses.

Everything here is a pure function of its inputs.  The adaptive integrator is a
thin layer over QUADPACK (``scipy.integrate.quad``) that adds geometric panel
splitting for integrands spanning many decades and a logarithmic substitution
fallback for slowly convergent endpoint singularities.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import mpmath
import numpy as np
from scipy import integrate as _integrate

RealFn = Callable[[float], float]

#: default relative tolerances
PROPER_REL_TOL = 1e-8
IMPROPER_REL_TOL = 1e-6

#: exponent fitting: r_k = b * 2**-k for k in FIT_RANGE
FIT_RANGE = (10, 40)
EXPONENT_MARGIN = 0.02
#: a joint (power, log) fit is trusted to resolve the power this finely
JOINT_EXPONENT_TOL = 2e-3
#: a jointly fitted power within this of the threshold counts as "exactly" on it
EXACT_EXPONENT_TOL = 1e-6


class QuadratureError(RuntimeError):
    """Adaptive quadrature missed its tolerance; ``estimate`` holds the best value."""

    def __init__(self, message: str, estimate: float = math.nan, error: float = math.nan):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NonFiniteIntegrand(ValueError):
    pass


class UnsupportedIntegrand(ValueError):
    """Integrand outside the power/log class (e.g. changes sign near the endpoint)."""


@dataclass(frozen=True)
class Grid:
    """Strictly increasing nodes inside (0, mass) with sampled values."""

    nodes: np.ndarray
    values: np.ndarray
    mass: float

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("grid needs at least two nodes")
        if values.shape != nodes.shape:
            raise ValueError("values must match nodes")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("grid nodes must be strictly increasing")
        if nodes[0] <= 0 or nodes[-1] >= self.mass:
            raise ValueError(f"grid nodes must lie in (0, {self.mass})")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)


def log_grid(lo: float, hi: float, n: int) -> np.ndarray:
    return np.geomspace(lo, hi, n)


# ---------------------------------------------------------------------------
# adaptive quadrature


def _checked(f: RealFn) -> RealFn:
    def g(x):
        y = float(f(x))
        if not math.isfinite(y):
            raise NonFiniteIntegrand(f"integrand is not finite at x={x!r}")
        return y

    return g


def _quad(g, a, b, rel_tol, limit, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        kw = {}
        if points is not None and math.isfinite(a) and math.isfinite(b):
            inside = [x for x in points if a < x < b]
            if inside:
                kw["points"] = inside
        out = _integrate.quad(g, a, b, epsabs=0.0, epsrel=rel_tol, limit=limit,
                              full_output=1, **kw)
    value, err = out[0], out[1]
    ok = len(out) == 3 or err <= rel_tol * abs(value) or (value == 0.0 and err == 0.0)
    return value, err, ok


def _geometric_panels(a, b, ratio=10.0):
    n = max(1, math.ceil(math.log(b / a) / math.log(ratio)))
    edges = np.geomspace(a, b, n + 1)
    edges[0], edges[-1] = a, b
    return edges


def integrate_adaptive(f: RealFn, a: float, b: float, rel_tol: float = PROPER_REL_TOL,
                       limit: int = 200, points: Optional[Sequence[float]] = None) -> float:
    """Integrate ``f`` over (a, b) to relative accuracy ``rel_tol``.

    Integrable power/log singularities at either endpoint are fine.  Ranges with
    ``b/a`` above 1e3 are split into geometric panels so that integrands varying
    over many decades are resolved near the small end.  For ``a == 0`` a failed
    direct attempt is retried after the substitution ``s = exp(x)``.

    Raises NonFiniteIntegrand on a non-finite sample and QuadratureError (with
    the best estimate attached) when the tolerance cannot be met.
    """
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    g = _checked(f)

    if a > 0 and math.isfinite(b) and b / a > 1e3:
        edges = _geometric_panels(a, b)
        total, total_err, all_ok = 0.0, 0.0, True
        for lo, hi in zip(edges[:-1], edges[1:]):
            v, e, ok = _quad(g, lo, hi, rel_tol, limit, points)
            total += v
            total_err += e
            all_ok &= ok
        if all_ok or total_err <= rel_tol * abs(total):
            return total
        raise QuadratureError("panelled quadrature did not converge", total, total_err)

    value, err, ok = _quad(g, a, b, rel_tol, limit, points)
    if ok:
        return value
    if a == 0 and math.isfinite(b) and b > 0:
        lb = math.log(b)

        def h(x):
            s = math.exp(x)
            if s < 1e-280:
                return 0.0
            return g(s) * s

        v2, e2, ok2 = _quad(h, -math.inf, lb, rel_tol, 4 * limit)
        if ok2:
            return v2
        if e2 < err:
            value, err = v2, e2
    raise QuadratureError(f"quadrature on ({a}, {b}) missed rel_tol={rel_tol}", value, err)


# ---------------------------------------------------------------------------
# endpoint asymptotics


@dataclass(frozen=True)
class EndpointFit:
    """Least-squares description of ``|f| ~ C d^e (log 1/d)^beta`` as d -> 0."""

    d: np.ndarray
    y: np.ndarray
    exponent: float
    joint_exponent: float
    log_exponent: float
    log_coefficient: float
    log_scale: float = 1.0  # L = log(log_scale / d)

    def model(self, d):
        d = np.asarray(d, dtype=float)
        L = np.log(self.log_scale / d)
        return np.exp(self.log_coefficient + self.joint_exponent * np.log(d)
                      + self.log_exponent * np.log(L))

    def tail_integral(self, dc: float) -> float:
        """Integral of the fitted model over (0, dc)."""
        e, beta, S = self.joint_exponent, self.log_exponent, self.log_scale
        Lc = math.log(S / dc)
        pref = math.exp(self.log_coefficient) * S ** (e + 1)
        a = e + 1.0
        if abs(a) < EXACT_EXPONENT_TOL:
            if beta >= -1:
                return math.inf
            return pref * Lc ** (beta + 1) / (-(beta + 1))
        if a < 0:
            return math.inf
        return pref * float(mpmath.gammainc(beta + 1, a * Lc)) / a ** (beta + 1)


def _to_distance(f, a, b, singular_end):
    if singular_end == "left":
        return lambda d: f(a + d)
    if singular_end == "right":
        return lambda d: f(b - d)
    raise ValueError("singular_end must be 'left' or 'right'")


def fit_endpoint(f: RealFn, a: float, b: float, singular_end: str = "left",
                 k_range: tuple[int, int] = FIT_RANGE) -> Optional[EndpointFit]:
    """Fit the local exponent of ``f`` on d_k = (b - a) 2^-k approaching the endpoint.

    Returns None when ``f`` vanishes identically on the sample points.
    Raises UnsupportedIntegrand on a sign change.
    """
    h = _to_distance(f, a, b, singular_end)
    ks = np.arange(k_range[0], k_range[1] + 1)
    width = b - a
    d = width * np.exp2(-ks.astype(float))
    y = np.array([float(h(x)) for x in d])
    if not np.all(np.isfinite(y)):
        raise NonFiniteIntegrand("non-finite integrand sample near the endpoint")
    if np.any(y > 0) and np.any(y < 0):
        raise UnsupportedIntegrand("integrand changes sign near the singular endpoint")
    y = np.abs(y)
    keep = y > 0
    if keep.sum() < 3:
        return None
    d, y = d[keep], y[keep]
    X = np.log(d)
    Y = np.log(y)
    e_ls = float(np.polyfit(X, Y, 1)[0])
    scale = 1.0 if np.all(d < 1) else math.e * width
    L = np.log(scale / d)
    design = np.column_stack([np.ones_like(X), X, np.log(L)])
    coef, *_ = np.linalg.lstsq(design, Y, rcond=None)
    return EndpointFit(d=d, y=y, exponent=e_ls, joint_exponent=float(coef[1]),
                       log_exponent=float(coef[2]), log_coefficient=float(coef[0]),
                       log_scale=scale)


def _threshold_side(fit: EndpointFit, threshold: float, margin: float,
                    log_rule: Callable[[float], Optional[bool]]) -> Optional[bool]:
    """True when the endpoint behaviour lies on the 'good' (larger exponent) side."""
    # the joint power/log exponent is used throughout: a log factor biases the
    # plain power fit by roughly beta / log(1/d)
    ej = fit.joint_exponent
    if ej > threshold + margin:
        return True
    if ej < threshold - margin:
        return False
    if abs(ej - threshold) >= JOINT_EXPONENT_TOL:
        return ej > threshold
    if abs(ej - threshold) <= EXACT_EXPONENT_TOL:
        return log_rule(fit.log_exponent)
    return None


@dataclass(frozen=True)
class IntegralVerdict:
    converges: Optional[bool]
    value: float
    divergence_rate: Optional[str]
    tolerance_used: float
    exponent: float = math.nan
    log_exponent: float = 0.0

    @property
    def status(self) -> str:
        if self.converges is None:
            return "indeterminate"
        return "converges" if self.converges else "diverges"


def _integrable_log(beta, margin):
    if beta < -1 - margin:
        return True
    if beta > -1 + margin:
        return False
    return None


def classify_improper(f: RealFn, a: float, b: float, singular_end: str = "left",
                      rel_tol: float = IMPROPER_REL_TOL, margin: float = EXPONENT_MARGIN,
                      k_range: tuple[int, int] = FIT_RANGE) -> IntegralVerdict:
    """Decide whether the improper integral of a one-signed ``f`` over (a, b) is finite.

    The verdict comes from the fitted endpoint exponent compared with -1; inside
    ``margin`` a joint power/log fit decides, and a genuinely ambiguous case is
    returned with ``converges=None``.
    """
    fit = fit_endpoint(f, a, b, singular_end, k_range)
    if fit is None:
        return IntegralVerdict(True, _improper_value(f, a, b, singular_end, rel_tol, None),
                               None, rel_tol, exponent=math.inf)
    side = _threshold_side(fit, -1.0, margin, lambda beta: _integrable_log(beta, margin))
    if side is None:
        return IntegralVerdict(None, math.nan, "near threshold", rel_tol,
                               fit.joint_exponent, fit.log_exponent)
    if not side:
        if abs(fit.joint_exponent + 1.0) <= JOINT_EXPONENT_TOL:
            rate = f"power -1, log {fit.log_exponent:.4g}"
        else:
            rate = f"power {fit.exponent:.4g}"
        return IntegralVerdict(False, math.inf, rate, rel_tol, fit.exponent, fit.log_exponent)
    value = _improper_value(f, a, b, singular_end, rel_tol, fit)
    return IntegralVerdict(True, value, None, rel_tol, fit.exponent, fit.log_exponent)


def _improper_value(f, a, b, singular_end, rel_tol, fit):
    if fit is None:
        return integrate_adaptive(f, a, b, rel_tol)
    # proper part down to the deepest fit point, fitted model below it
    dc = float(fit.d[-1])
    h = _to_distance(f, a, b, singular_end)
    sign = 1.0 if float(h(dc)) >= 0 else -1.0
    proper = integrate_adaptive(h, dc, b - a, rel_tol)
    return proper + sign * fit.tail_integral(dc)


@dataclass(frozen=True)
class SupVerdict:
    bounded: Optional[bool]
    value: float
    exponent: float
    log_exponent: float = 0.0


def classify_sup(g: RealFn, a: float, b: float, singular_end: str = "left",
                 margin: float = EXPONENT_MARGIN, k_range: tuple[int, int] = FIT_RANGE,
                 n_grid: int = 400) -> SupVerdict:
    """Decide whether sup of a positive ``g`` over (a, b) is finite.

    ``g`` is assumed bounded away from the singular endpoint.  The reported
    value is the maximum over a log grid reaching the deepest fit point.
    """
    fit = fit_endpoint(g, a, b, singular_end, k_range)
    width = b - a
    d = np.geomspace(width * 2.0 ** -k_range[1], width * (1 - 1e-9), n_grid)
    h = _to_distance(g, a, b, singular_end)
    vals = np.array([abs(float(h(x))) for x in d])
    top = float(np.max(vals[np.isfinite(vals)])) if np.any(np.isfinite(vals)) else math.inf
    if fit is None:
        return SupVerdict(True, top, math.inf)

    def log_rule(beta):
        if abs(beta) <= EXACT_EXPONENT_TOL or beta < -margin:
            return True
        if beta > margin:
            return False
        return None

    side = _threshold_side(fit, 0.0, margin, log_rule)
    return SupVerdict(side, top if side else (math.inf if side is False else math.nan),
                      fit.exponent, fit.log_exponent)


# ---------------------------------------------------------------------------
# Stieltjes integrals against d(-D phi) for non-increasing phi


@dataclass(frozen=True)
class StieltjesWeight:
    """Density ``w = -phi'`` of the measure d(-D phi), phi non-increasing."""

    density: RealFn
    closed_form: bool = True

    @classmethod
    def from_function(cls, phi: RealFn, rel_step: float = 1e-6) -> "StieltjesWeight":
        """Centered finite differences with step h = r * rel_step."""

        def w(r):
            h = r * rel_step
            return -(phi(r + h) - phi(r - h)) / (2 * h)

        return cls(w, closed_form=False)

    def __call__(self, r):
        return self.density(r)


def weight_sample(weight: StieltjesWeight, r: float) -> float:
    w = float(weight(r))
    if not math.isfinite(w):
        raise ValueError(f"weight density is not finite at r={r!r}: atoms are unsupported")
    if w < 0:
        if weight.closed_form or w < -1e-7 * max(1.0, abs(w)):
            raise ValueError(f"negative weight density {w!r} at r={r!r}: "
                             "nu_p^(1/(1-p)) must be non-increasing")
        w = 0.0
    return w


def stieltjes_integrate(g: RealFn, weight: StieltjesWeight, a: float, b: float,
                        rel_tol: float = PROPER_REL_TOL) -> float:
    """Integral of g(r) w(r) dr over (a, b)."""
    return integrate_adaptive(lambda r: g(r) * weight_sample(weight, r), a, b, rel_tol)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def panel_integrals(h: Callable[[np.ndarray], np.ndarray], edges: np.ndarray) -> np.ndarray:
    """8-point Gauss-Legendre integral of a vectorised ``h`` over each panel."""
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = mid[:, None] + half[:, None] * _GL_X[None, :]
    vals = h(x)
    return half * (vals @ _GL_W)


_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)


def _gl(h, lo, hi, x, w):
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return half * sum(wi * h(mid + half * xi) for xi, wi in zip(x, w))


class TailTable:
    """Fast evaluation of T(s) = int_s^b h for s in (0, b).

    Panel integrals over a log-spaced partition of [lo, b] are computed once
    (8- vs 16-point Gauss-Legendre, panels bisected until they agree to
    ``rel_tol``); T(s) is then a suffix sum plus one partial panel.  Below
    ``lo`` the adaptive integrator takes over.
    """

    def __init__(self, h: RealFn, b: float, lo: float, per_decade: int = 12,
                 rel_tol: float = 1e-12, max_depth: int = 30):
        if not 0 < lo < b:
            raise ValueError("need 0 < lo < b")
        self.h = _checked(h)
        self.b, self.lo = float(b), float(lo)
        n = max(1, math.ceil(per_decade * math.log10(b / lo)))
        stack = list(zip(np.geomspace(lo, b, n + 1)[:-1], np.geomspace(lo, b, n + 1)[1:]))
        stack[-1] = (stack[-1][0], self.b)
        panels = []
        depth = {p: 0 for p in stack}
        while stack:
            a_, b_ = stack.pop()
            v8 = _gl(self.h, a_, b_, _GL_X, _GL_W)
            v16 = _gl(self.h, a_, b_, _GL16_X, _GL16_W)
            if abs(v16 - v8) <= rel_tol * abs(v16) or depth[(a_, b_)] >= max_depth:
                panels.append((a_, b_, v16))
            else:
                m = 0.5 * (a_ + b_)
                for pr in ((a_, m), (m, b_)):
                    depth[pr] = depth[(a_, b_)] + 1
                    stack.append(pr)
        panels.sort()
        self.edges = np.array([p[0] for p in panels] + [panels[-1][1]])
        vals = np.array([p[2] for p in panels])
        self.suffix = np.concatenate([np.cumsum(vals[::-1])[::-1], [0.0]])

    def __call__(self, s: float) -> float:
        if s >= self.b:
            return 0.0
        if s < self.lo:
            return float(self.suffix[0]) + integrate_adaptive(self.h, s, self.lo)
        k = int(np.searchsorted(self.edges, s, side="right")) - 1
        k = min(k, len(self.edges) - 2)
        hi = self.edges[k + 1]
        part = _gl(self.h, s, hi, _GL16_X, _GL16_W) if hi > s else 0.0
        return float(self.suffix[k + 1] + part)


# ---------------------------------------------------------------------------
# generalized inverse


class Inverse(NamedTuple):
    value: float
    clamped: Optional[str]  # None, "below" or "above"


def generalized_left_inverse(F, y: float, lo: float, hi: float,
                             tol: float = 1e-13) -> Inverse:
    """sup{s in [lo, hi] : F(s) < y} for non-decreasing F.

    ``F`` is either a callable (bisection) or a pair of arrays ``(xs, Fs)``
    describing F on a table.  Out-of-range ``y`` returns the nearer endpoint
    with the ``clamped`` flag set.
    """
    if isinstance(F, tuple):
        xs, Fs = (np.asarray(v, dtype=float) for v in F)
        below = Fs < y
        if not below.any():
            return Inverse(float(lo), "below")
        if below.all():
            return Inverse(float(hi), "above")
        return Inverse(float(xs[np.nonzero(below)[0][-1]]), None)

    if F(lo) >= y:
        return Inverse(float(lo), "below")
    if F(hi) < y:
        return Inverse(float(hi), "above")
    a, b = float(lo), float(hi)
    while b - a > tol * max(1.0, abs(a), abs(b)):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        if F(m) < y:
            a = m
        else:
            b = m
    return Inverse(0.5 * (a + b), None)
