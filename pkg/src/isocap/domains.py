"""Domain catalog: isocapacitary and isoperimetric functions.

Each family returns model functions with all multiplicative constants set to
one.  The profile families (cusp, funnel, and the weighted one-dimensional
models used as ground truth) are computed exactly from the 1D condenser
capacity

    nu_p(s) = ( int_a^g A(t)^{-1/(p-1)} dt )^{1-p},

where A is the cross-section weight, a the profile coordinate carrying mass s
at the thin end and g the coordinate carrying mass |Omega|/2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .numerics import (NonFiniteIntegrand, QuadratureError, StieltjesWeight, TailTable,
                       classify_improper, integrate_adaptive)

FAMILIES = ("LipschitzBall", "Holder", "GammaJohn", "Cusp", "Funnel",
            "CouhilComb", "NikodymComb", "Custom")

EXACT = "exact"
TWO_SIDED = "two_sided"
LOWER_BOUND = "lower_bound_only"


class DomainError(ValueError):
    """Parameters outside a family's validity range."""


class ZeroCapacityWarning(RuntimeWarning):
    pass


# ---------------------------------------------------------------------------
# profiles


class PowerProfile:
    """theta(r) = scale * r**kappa."""

    def __init__(self, kappa: float, scale: float = 1.0):
        self.kappa = float(kappa)
        self.scale = float(scale)

    def __call__(self, r):
        return self.scale * np.power(r, self.kappa)

    def head_moment(self, rho, k):
        """int_0^rho theta^k."""
        e = self.kappa * k + 1.0
        return self.scale ** k * np.power(rho, e) / e

    def head_moment_inverse(self, m, k):
        e = self.kappa * k + 1.0
        return np.power(m * e / self.scale ** k, 1.0 / e)

    def __repr__(self):
        return f"PowerProfile(kappa={self.kappa}, scale={self.scale})"


class DecayProfile:
    """zeta(r) = (1 + r)**-beta."""

    def __init__(self, beta: float):
        self.beta = float(beta)

    def __call__(self, r):
        return np.power(1.0 + np.asarray(r, dtype=float), -self.beta)

    def tail_moment(self, rho, k):
        """int_rho^inf zeta^k (finite iff beta*k > 1)."""
        e = self.beta * k - 1.0
        if e <= 0:
            return math.inf
        return np.power(1.0 + np.asarray(rho, dtype=float), -e) / e

    def tail_moment_inverse(self, m, k):
        e = self.beta * k - 1.0
        return np.power(m * e, -1.0 / e) - 1.0

    def __repr__(self):
        return f"DecayProfile(beta={self.beta})"


class ExpProfile:
    """zeta(r) = exp(-rate * r)."""

    def __init__(self, rate: float = 1.0):
        self.rate = float(rate)

    def __call__(self, r):
        return np.exp(-self.rate * np.asarray(r, dtype=float))

    def tail_moment(self, rho, k):
        return np.exp(-self.rate * k * np.asarray(rho, dtype=float)) / (self.rate * k)

    def tail_moment_inverse(self, m, k):
        return -np.log(m * self.rate * k) / (self.rate * k)

    def __repr__(self):
        return f"ExpProfile(rate={self.rate})"


class PowerLaw:
    """delta(s) = s**alpha, the corridor profile of the comb examples."""

    def __init__(self, alpha: float):
        self.alpha = float(alpha)

    def __call__(self, s):
        return np.power(s, self.alpha)

    def __repr__(self):
        return f"PowerLaw(alpha={self.alpha})"


# ---------------------------------------------------------------------------
# model functions


@dataclass(frozen=True)
class IsocapFn:
    """s -> nu_p(s) on (0, measure/2), with the Stieltjes weight of nu_p^(1/(1-p))."""

    p: float
    measure: float
    evaluate: Callable[[float], float]
    weight: StieltjesWeight
    exactness: str
    phi: Optional[Callable[[float], float]] = None  # nu_p^(1/(1-p)) when known directly
    asymptotic_exponent: Optional[float] = None
    log_exponent: float = 0.0
    label: str = ""
    notes: tuple = ()

    @property
    def half(self) -> float:
        return 0.5 * self.measure

    def __call__(self, s):
        if np.ndim(s) == 0:
            return float(self.evaluate(float(s)))
        return np.array([float(self.evaluate(float(x))) for x in np.ravel(s)]).reshape(np.shape(s))

    def phi_at(self, s: float) -> float:
        """nu_p(s)^(1/(1-p)); zero at and beyond measure/2."""
        if s >= self.half:
            return 0.0
        if self.phi is not None:
            return float(self.phi(s))
        v = float(self.evaluate(s))
        return math.inf if v == 0 else v ** (1.0 / (1.0 - self.p))


@dataclass(frozen=True)
class IsoperFn:
    measure: float
    evaluate: Callable[[float], float]
    exactness: str
    asymptotic_exponent: Optional[float] = None
    label: str = ""

    @property
    def half(self) -> float:
        return 0.5 * self.measure

    def __call__(self, s):
        if np.ndim(s) == 0:
            return float(self.evaluate(float(s)))
        return np.array([float(self.evaluate(float(x))) for x in np.ravel(s)]).reshape(np.shape(s))


def power_isocap(theta: float, p: float, measure: float, exactness: str = TWO_SIDED,
                 label: str = "") -> IsocapFn:
    """nu_p(s) = s**theta with closed-form weight."""
    if theta < 0:
        raise DomainError("isocapacitary exponent must be non-negative (nu_p non-decreasing)")
    k = theta / (1.0 - p)
    return IsocapFn(
        p=p, measure=measure,
        evaluate=lambda s: s ** theta,
        weight=StieltjesWeight(lambda r: theta / (p - 1.0) * r ** (k - 1.0)),
        exactness=exactness, phi=lambda s: s ** k,
        asymptotic_exponent=theta, label=label or f"s^{theta:g}")


def constant_isocap(c: float, p: float, measure: float, exactness: str = TWO_SIDED,
                    label: str = "") -> IsocapFn:
    return IsocapFn(p=p, measure=measure, evaluate=lambda s: c,
                    weight=StieltjesWeight(lambda r: 0.0), exactness=exactness,
                    phi=lambda s: c ** (1.0 / (1.0 - p)), asymptotic_exponent=0.0,
                    label=label or f"{c:g}")


# ---------------------------------------------------------------------------
# one-dimensional capacities


def capacity_integral(A: Callable[[float], float], p: float, a: float, g: float) -> float:
    """int_a^g A^{-1/(p-1)}; inf when divergent at a = 0."""
    e = -1.0 / (p - 1.0)

    def h(t):
        return float(A(t)) ** e

    if a == 0:
        verdict = classify_improper(h, 0.0, g)
        if verdict.converges:
            return verdict.value
        return math.inf
    return integrate_adaptive(h, a, g)


def condenser_capacity_1d(A: Callable[[float], float], p: float, a: float, g: float) -> float:
    """Capacity of the condenser ([0, a], [0, g]) for the energy int A |u'|^p.

    A divergent integral of A^{-1/(p-1)} (a point of zero capacity) returns 0.0
    and emits ZeroCapacityWarning.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    if not 0 <= a < g:
        raise ValueError(f"need 0 <= a < g, got a={a}, g={g}")
    I = capacity_integral(A, p, a, g)
    if not math.isfinite(I):
        warnings.warn("zero capacity: integral of A^(-1/(p-1)) diverges", ZeroCapacityWarning)
        return 0.0
    return I ** (1.0 - p)


def condenser_capacity_radial(n: int, p: float, r: float, R: float, c0: float = 1.0) -> float:
    """Capacity of concentric balls (B_r, B_R) through the weight c0 t^(n-1)."""
    if p > n:
        raise ValueError(f"radial capacity needs 1 < p <= n (got p={p}, n={n})")
    if p <= 1:
        raise ValueError("p must exceed 1")
    if not 0 <= r < R:
        raise ValueError("need 0 <= r < R")
    return condenser_capacity_1d(lambda t: c0 * t ** (n - 1), p, r, R)


# ---------------------------------------------------------------------------
# weighted one-dimensional models (profile domains)


@dataclass(frozen=True)
class WeightedInterval:
    """The interval (0, length) with measure A(t) dt, thin end at t = 0.

    For an unbounded funnel the thin end is at infinity; ``reversed`` marks
    that orientation and ``length`` is inf.
    """

    weight: Callable[[float], float]
    length: float
    mass_fn: Callable[[float], float]          # mass of the thin-end piece
    mass_inverse: Callable[[float], float]
    measure: float
    reversed: bool = False
    label: str = ""

    def A(self, t):
        return self.weight(t)

    def thin_coordinate(self, s: float) -> float:
        """Profile coordinate cutting off mass s at the thin end."""
        return float(self.mass_inverse(s))

    def half_coordinate(self) -> float:
        return self.thin_coordinate(0.5 * self.measure)

    def capacity_phi(self, s: float, p: float) -> float:
        """nu_p(s)^(1/(1-p)) = int between the s-cut and the half-mass cut of A^{-1/(p-1)}."""
        a = self.thin_coordinate(s)
        g = self.half_coordinate()
        lo, hi = (g, a) if self.reversed else (a, g)
        if hi <= lo:
            return 0.0
        return capacity_integral(self.weight, p, lo, hi)

    def nu(self, p: float) -> IsocapFn:
        half = 0.5 * self.measure
        pp = p / (p - 1.0)

        def ev(s):
            if s >= half:
                return math.inf
            if self.reversed:
                a = self.thin_coordinate(s)
                return condenser_capacity_1d_between(self.weight, p, self.half_coordinate(), a)
            return condenser_capacity_1d(self.weight, p, self.thin_coordinate(s),
                                         self.half_coordinate())

        def w(s):
            return float(self.weight(self.thin_coordinate(s))) ** (-pp)

        return IsocapFn(p=p, measure=self.measure, evaluate=ev,
                        weight=StieltjesWeight(w), exactness=EXACT,
                        phi=lambda s: self.capacity_phi(s, p),
                        label=f"{self.label} exact 1D capacity")

    def lam(self) -> IsoperFn:
        return IsoperFn(measure=self.measure,
                        evaluate=lambda s: float(self.weight(self.thin_coordinate(s))),
                        exactness=EXACT, label=f"{self.label} 1D perimeter")


def condenser_capacity_1d_between(A, p, lo, hi):
    """Capacity across (lo, hi) for the weighted energy, lo > 0."""
    return integrate_adaptive(lambda t: float(A(t)) ** (-1.0 / (p - 1.0)), lo, hi) ** (1.0 - p)


def interval_model(measure: float = 1.0) -> WeightedInterval:
    """(0, M) with A = 1: nu_p(s) = (M/2 - s)^(1-p)."""
    return WeightedInterval(weight=lambda t: 1.0 + 0.0 * np.asarray(t, dtype=float),
                            length=measure, mass_fn=lambda t: t,
                            mass_inverse=lambda s: s, measure=measure, label="interval")


def radial_model(n: int, radius: float = 1.0, c0: float = 1.0) -> WeightedInterval:
    """Radial reduction of the n-ball: A(t) = c0 t^(n-1) on (0, R)."""
    return WeightedInterval(
        weight=lambda t: c0 * np.power(t, n - 1),
        length=radius,
        mass_fn=lambda t: c0 * np.power(t, n) / n,
        mass_inverse=lambda s: np.power(n * np.asarray(s, dtype=float) / c0, 1.0 / n),
        measure=c0 * radius ** n / n, label=f"radial n={n}")


# ---------------------------------------------------------------------------
# catalog entries


def _local_slopes(fn, lo=1e-8, hi=1e-1, n=200):
    s = np.geomspace(lo, hi, n)
    v = np.array([float(fn(x)) for x in s])
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise DomainError("profile must be positive and finite near 0")
    return np.diff(np.log(v)) / np.diff(np.log(s))


@dataclass(frozen=True)
class DomainSpec:
    family: str
    n: int = 2
    alpha: Optional[float] = None      # Holder exponent
    gamma: Optional[float] = None      # gamma-John exponent
    profile: Optional[Callable] = None  # theta (cusp), zeta (funnel), delta (combs)
    length: float = 1.0                # cusp height L
    c0: float = 1.0
    measure_: Optional[float] = None
    nu_custom: Optional[Callable] = None
    lam_custom: Optional[Callable] = None
    custom_exactness: str = TWO_SIDED
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.n < 2:
            raise DomainError("dimension n must be at least 2")
        if self.family in ("CouhilComb", "NikodymComb") and self.n != 2:
            raise DomainError(f"{self.family} is planar (n = 2)")
        if self.family == "Holder" and not (self.alpha is not None and 0 < self.alpha < 1):
            raise DomainError("Holder exponent alpha must lie in (0, 1)")
        if self.family == "GammaJohn" and not (self.gamma is not None and self.gamma >= 1):
            raise DomainError("gamma-John domains need gamma >= 1")
        if self.family == "Cusp":
            _check_cusp(self.profile, self.length)
        if self.family == "Funnel":
            _check_funnel(self.profile, self.n)
        if self.family == "NikodymComb":
            _check_nikodym(self.profile)
        if self.family == "CouhilComb" and self.profile is None:
            raise DomainError("CouhilComb needs a corridor profile delta")
        if self.family == "Custom" and (self.nu_custom is None or self.measure_ is None):
            raise DomainError("Custom domains need an explicit nu_p and |Omega|")

    # constructors -------------------------------------------------------
    @classmethod
    def ball(cls, n: int, measure: float = 1.0):
        return cls("LipschitzBall", n=n, measure_=measure, params={"n": n})

    @classmethod
    def holder(cls, n: int, alpha: float, measure: float = 1.0):
        return cls("Holder", n=n, alpha=alpha, measure_=measure, params={"n": n, "alpha": alpha})

    @classmethod
    def john(cls, n: int, gamma: float, measure: float = 1.0):
        return cls("GammaJohn", n=n, gamma=gamma, measure_=measure, params={"n": n, "gamma": gamma})

    @classmethod
    def cusp(cls, kappa: float = 1.0, n: int = 2, length: float = 1.0, c0: float = 1.0,
             profile=None):
        prof = profile if profile is not None else PowerProfile(kappa)
        return cls("Cusp", n=n, profile=prof, length=length, c0=c0,
                   params={"n": n, "kappa": kappa, "length": length, "c0": c0})

    @classmethod
    def funnel(cls, beta: float = 2.0, n: int = 2, c0: float = 1.0, profile=None):
        prof = profile if profile is not None else DecayProfile(beta)
        return cls("Funnel", n=n, profile=prof, c0=c0, params={"n": n, "beta": beta, "c0": c0})

    @classmethod
    def couhil(cls, alpha: float = None, profile=None, measure: float = 1.0):
        prof = profile if profile is not None else PowerLaw(alpha)
        return cls("CouhilComb", n=2, profile=prof, measure_=measure, params={"alpha": alpha})

    @classmethod
    def nikodym(cls, alpha: float = None, profile=None, measure: float = 1.0):
        prof = profile if profile is not None else PowerLaw(alpha)
        return cls("NikodymComb", n=2, profile=prof, measure_=measure, params={"alpha": alpha})

    @classmethod
    def custom(cls, nu: Callable, measure: float, lam: Callable = None,
               exactness: str = TWO_SIDED):
        return cls("Custom", nu_custom=nu, lam_custom=lam, measure_=measure,
                   custom_exactness=exactness)

    # derived ------------------------------------------------------------
    @property
    def measure(self) -> float:
        if self.family == "Cusp":
            return theta_transform(self, self.length)
        if self.family == "Funnel":
            return upsilon_transform(self, 0.0)
        return float(self.measure_ if self.measure_ is not None else 1.0)

    def profile_model(self) -> WeightedInterval:
        """The weighted 1D reduction of a cusp or funnel."""
        k = self.n - 1
        prof, c0 = self.profile, self.c0
        if self.family == "Cusp":
            return WeightedInterval(
                weight=lambda t: c0 * np.power(prof(t), k),
                length=self.length,
                mass_fn=lambda t: theta_transform(self, t),
                mass_inverse=lambda s: theta_inverse(self, s),
                measure=self.measure, label=f"cusp {prof!r}")
        if self.family == "Funnel":
            return WeightedInterval(
                weight=lambda t: c0 * np.power(prof(t), k),
                length=math.inf,
                mass_fn=lambda t: upsilon_transform(self, t),
                mass_inverse=lambda s: upsilon_inverse(self, s),
                measure=self.measure, reversed=True, label=f"funnel {prof!r}")
        raise DomainError(f"{self.family} has no one-dimensional profile reduction")


def _check_cusp(theta, length):
    if theta is None:
        raise DomainError("Cusp needs a profile theta")
    if abs(float(theta(0.0))) > 1e-14:
        raise DomainError("cusp profile must satisfy theta(0) = 0")
    r = np.linspace(0.0, length, 201)
    v = np.array([float(theta(x)) for x in r])
    if np.any(v[1:] <= 0):
        raise DomainError("cusp profile must be positive on (0, L]")
    second = v[2:] - 2 * v[1:-1] + v[:-2]
    if np.any(second < -1e-12 * max(1.0, np.max(np.abs(v)))):
        raise DomainError("cusp profile theta must be convex")


def _check_funnel(zeta, n):
    if zeta is None:
        raise DomainError("Funnel needs a profile zeta")
    r = np.concatenate([np.linspace(0, 10, 101), np.geomspace(10, 1e6, 50)])
    v = np.array([float(zeta(x)) for x in r])
    # far out a positive profile may underflow to 0
    if np.any(v[:101] <= 0) or np.any(v < 0):
        raise DomainError("funnel profile zeta must be positive")
    if v[-1] > 1e-3 * v[0]:
        raise DomainError("funnel profile must tend to 0 at infinity")
    if hasattr(zeta, "tail_moment"):
        total = zeta.tail_moment(0.0, n - 1)
    else:
        try:
            total = integrate_adaptive(lambda x: float(zeta(x)) ** (n - 1), 0.0, math.inf, 1e-8)
        except QuadratureError:
            total = math.inf
    if not math.isfinite(float(total)):
        raise DomainError("funnel needs int_0^inf zeta^(n-1) < inf (finite measure)")


def _check_nikodym(delta):
    if delta is None:
        raise DomainError("NikodymComb needs a corridor profile delta")
    sl = _local_slopes(delta)
    if np.any(sl <= 0):
        raise DomainError("Nikodym corridor profile delta must be increasing")
    if np.min(sl) < 1 - 1e-9:
        raise DomainError("Nikodym profile needs delta(s) <= c' s near 0 (delta(2s) <= c delta(s) <= c' s)")


def _check_couhil(delta, p):
    if not 1 <= p <= 2:
        raise DomainError(f"CouhilComb capacity asymptotics hold only for 1 <= p <= 2 (got p={p})")
    sl = _local_slopes(delta)
    if np.min(sl) <= 1 + 1e-9:
        raise DomainError("CouhilComb needs s^(1+eps)/delta(s) non-increasing for some eps > 0")
    if np.max(sl) > p + 1 + 1e-9:
        raise DomainError(f"CouhilComb needs s^(p+1)/delta(s) non-decreasing (p={p})")


# ---------------------------------------------------------------------------
# volume transforms


def theta_transform(domain: DomainSpec, rho: float) -> float:
    """c0 int_0^rho theta^(n-1): mass of the cusp below height rho."""
    if domain.family != "Cusp":
        raise DomainError("theta_transform is defined for cusps")
    prof, k = domain.profile, domain.n - 1
    if hasattr(prof, "head_moment"):
        return domain.c0 * float(prof.head_moment(rho, k))
    if rho == 0:
        return 0.0
    return domain.c0 * integrate_adaptive(lambda r: float(prof(r)) ** k, 0.0, rho)


def theta_inverse(domain: DomainSpec, s: float) -> float:
    prof, k = domain.profile, domain.n - 1
    if hasattr(prof, "head_moment_inverse"):
        return float(prof.head_moment_inverse(s / domain.c0, k))
    return brentq(lambda r: theta_transform(domain, r) - s, 0.0, domain.length,
                  xtol=1e-15, rtol=1e-13)


def upsilon_transform(domain: DomainSpec, rho: float) -> float:
    """c0 int_rho^inf zeta^(n-1): mass of the funnel beyond rho."""
    if domain.family != "Funnel":
        raise DomainError("upsilon_transform is defined for funnels")
    prof, k = domain.profile, domain.n - 1
    if hasattr(prof, "tail_moment"):
        val = float(prof.tail_moment(rho, k))
    else:
        try:
            val = integrate_adaptive(lambda r: float(prof(r)) ** k, rho, math.inf)
        except QuadratureError:
            val = math.inf
    if not math.isfinite(val):
        raise DomainError("funnel tail int zeta^(n-1) is not finite (finite-measure condition)")
    return domain.c0 * val


def upsilon_inverse(domain: DomainSpec, s: float) -> float:
    prof, k = domain.profile, domain.n - 1
    if hasattr(prof, "tail_moment_inverse"):
        return float(prof.tail_moment_inverse(s / domain.c0, k))
    hi = 1.0
    while upsilon_transform(domain, hi) > s:
        hi *= 2.0
    return brentq(lambda r: upsilon_transform(domain, r) - s, 0.0, hi, xtol=1e-14, rtol=1e-13)


# ---------------------------------------------------------------------------
# catalog


def nu_p(domain: DomainSpec, p: float) -> IsocapFn:
    """Model isocapacitary function of a catalog domain."""
    if p <= 1:
        raise DomainError("p must exceed 1")
    fam, n, M = domain.family, domain.n, domain.measure

    if fam == "LipschitzBall":
        if p < n:
            return power_isocap((n - p) / n, p, M, TWO_SIDED, f"s^((n-p)/n), n={n}")
        if p == n:
            # log(M/s) keeps the model positive on (0, M/2) for any measure
            e = (n - 1.0) / (p - 1.0)
            return IsocapFn(
                p=p, measure=M, evaluate=lambda s: math.log(M / s) ** (1 - n),
                weight=StieltjesWeight(lambda r: e * math.log(M / r) ** (e - 1.0) / r),
                exactness=TWO_SIDED, phi=lambda s: math.log(M / s) ** e,
                asymptotic_exponent=0.0, log_exponent=1.0 - n,
                label=f"(log 1/s)^(1-n), n={n}")
        return constant_isocap(1.0, p, M, TWO_SIDED, "constant (p > n)")

    if fam == "Holder":
        a = domain.alpha
        if not p < (n - 1) / a + 1:
            raise DomainError(f"Holder domains need p < (n-1)/alpha + 1 = {(n - 1) / a + 1:g}")
        return power_isocap(1 - a * p / (n - 1 + a), p, M, LOWER_BOUND, "Holder lower bound")

    if fam == "GammaJohn":
        g = domain.gamma
        if g > p / (n - 1) + 1:
            raise DomainError(f"gamma-John embedding needs 1 <= gamma <= p/(n-1) + 1 = {p / (n - 1) + 1:g}")
        if g > (p - 1) / (n - 1):
            sigma = n * p / ((n - 1) * g + 1 - p)
            theta = p / sigma
        else:
            theta = 0.0  # every sigma > 0 is admissible
        return power_isocap(theta, p, M, LOWER_BOUND, "gamma-John lower bound")

    if fam in ("Cusp", "Funnel"):
        fn = domain.profile_model().nu(p)
        return fn

    if fam == "CouhilComb":
        delta = domain.profile
        _check_couhil(delta, p)
        if isinstance(delta, PowerLaw):
            return power_isocap((delta.alpha + 1 - p) / 2, p, M, TWO_SIDED, "Couhil comb")

        def ev(s):
            return float(delta(math.sqrt(s))) * s ** ((1 - p) / 2)

        phi = lambda s: ev(s) ** (1.0 / (1.0 - p))
        return IsocapFn(p=p, measure=M, evaluate=ev, weight=StieltjesWeight.from_function(phi),
                        exactness=TWO_SIDED, phi=phi, label="Couhil comb")

    if fam == "NikodymComb":
        delta = domain.profile
        if isinstance(delta, PowerLaw):
            return power_isocap(delta.alpha, p, M, TWO_SIDED, "Nikodym comb")
        phi = lambda s: float(delta(s)) ** (1.0 / (1.0 - p))
        return IsocapFn(p=p, measure=M, evaluate=lambda s: float(delta(s)),
                        weight=StieltjesWeight.from_function(phi), exactness=TWO_SIDED,
                        phi=phi, label="Nikodym comb")

    # Custom
    f = domain.nu_custom
    phi = lambda s: float(f(s)) ** (1.0 / (1.0 - p))
    return IsocapFn(p=p, measure=M, evaluate=lambda s: float(f(s)),
                    weight=StieltjesWeight.from_function(phi),
                    exactness=domain.custom_exactness, phi=phi, label="custom")


def lambda_iso(domain: DomainSpec) -> IsoperFn:
    """Model isoperimetric function of a catalog domain."""
    fam, n, M = domain.family, domain.n, domain.measure
    if fam == "LipschitzBall":
        e = (n - 1) / n
        return IsoperFn(M, lambda s: s ** e, TWO_SIDED, e, "s^(1/n')")
    if fam == "Holder":
        e = (n - 1) / (n - 1 + domain.alpha)
        return IsoperFn(M, lambda s: s ** e, LOWER_BOUND, e, "Holder")
    if fam == "GammaJohn":
        e = (n - 1) * domain.gamma / n
        return IsoperFn(M, lambda s: s ** e, LOWER_BOUND, e, "gamma-John")
    if fam in ("Cusp", "Funnel"):
        return domain.profile_model().lam()
    if fam == "CouhilComb":
        delta = domain.profile
        e = delta.alpha / 2 if isinstance(delta, PowerLaw) else None
        return IsoperFn(M, lambda s: float(delta(math.sqrt(s))), TWO_SIDED, e, "Couhil comb")
    if fam == "NikodymComb":
        delta = domain.profile
        e = delta.alpha if isinstance(delta, PowerLaw) else None
        return IsoperFn(M, lambda s: float(delta(s)), TWO_SIDED, e, "Nikodym comb")
    if domain.lam_custom is None:
        raise DomainError("custom domain has no isoperimetric function")
    return IsoperFn(M, lambda s: float(domain.lam_custom(s)), domain.custom_exactness, None, "custom")


def nu_from_lambda(lam: IsoperFn, p: float, measure: Optional[float] = None) -> IsocapFn:
    """Lower bound (int_s^{M/2} lambda^{-p'})^{1-p} for nu_p.

    A divergent inner integral gives the value 0 (no information).  The inner
    integral is tabulated once on log-spaced Gauss-Legendre panels.
    """
    M = lam.measure if measure is None else measure
    half = 0.5 * M
    pp = p / (p - 1.0)

    def h(r):
        v = float(lam(r))
        return v ** (-pp) if v > 0 else math.inf

    table = []

    def phi(s):
        if s >= half:
            return 0.0
        try:
            if not table:
                table.append(TailTable(h, half, half * 2.0 ** -46))
            return table[0](s)
        except QuadratureError as exc:
            return exc.estimate if math.isfinite(exc.estimate) else math.inf
        except NonFiniteIntegrand:
            return math.inf

    def ev(s):
        v = phi(s)
        if not math.isfinite(v):
            return 0.0
        return math.inf if v == 0 else v ** (1.0 - p)

    return IsocapFn(p=p, measure=M, evaluate=ev,
                    weight=StieltjesWeight(lambda r: float(lam(r)) ** (-pp)),
                    exactness=LOWER_BOUND, phi=phi, label=f"from lambda ({lam.label})")


def catalog_table() -> list[dict]:
    """Families with their parameters and validity ranges."""
    return [
        {"family": "LipschitzBall", "parameters": "n >= 2",
         "validity": "1 < p <= n (p > n: constant model)", "nu_p": "s^((n-p)/n); p=n: (log 1/s)^(1-n)",
         "exactness": TWO_SIDED},
        {"family": "Holder", "parameters": "n >= 2, alpha in (0,1)",
         "validity": "1 < p < (n-1)/alpha + 1", "nu_p": ">= s^(1 - alpha p/(n-1+alpha))",
         "exactness": LOWER_BOUND},
        {"family": "GammaJohn", "parameters": "n >= 2, gamma >= 1",
         "validity": "gamma <= p/(n-1) + 1", "nu_p": ">= s^(p/sigma), sigma = np/((n-1)gamma+1-p)",
         "exactness": LOWER_BOUND},
        {"family": "Cusp", "parameters": "n, theta convex with theta(0)=0, L, c0",
         "validity": "p > 1", "nu_p": "(int_{Theta^-1(s)}^{Theta^-1(|Omega|/2)} theta^((1-n)/(p-1)))^(1-p)",
         "exactness": EXACT},
        {"family": "Funnel", "parameters": "n, zeta convex decreasing to 0, c0",
         "validity": "p > 1, int zeta^(n-1) < inf", "nu_p": "(int_{Upsilon^-1(|Omega|/2)}^{Upsilon^-1(s)} zeta^((1-n)/(p-1)))^(1-p)",
         "exactness": EXACT},
        {"family": "CouhilComb", "parameters": "delta doubling, 1 < slope(delta) <= p+1",
         "validity": "1 < p <= 2", "nu_p": "delta(s^(1/2)) s^((1-p)/2)", "exactness": TWO_SIDED},
        {"family": "NikodymComb", "parameters": "delta increasing, Lipschitz, delta(2s) <= c delta(s) <= c' s",
         "validity": "p > 1", "nu_p": "delta(s)", "exactness": TWO_SIDED},
        {"family": "Custom", "parameters": "explicit nu_p and |Omega|", "validity": "p > 1",
         "nu_p": "user supplied", "exactness": "user supplied"},
    ]
