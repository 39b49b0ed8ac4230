"""Command-line front end.

    isocap {catalog,analyze,bound,verify,sweep} --config run.json [--out DIR]
           [--threads N] [--format json|csv|table]

Config schema (JSON object; q may be the string "inf"):

    command    optional, must agree with the subcommand when present
    domain     {"family": ..., family parameters}; families:
                 ball (n), holder (n, alpha), john (n, gamma),
                 cusp (kappa, n, length, c0), funnel (beta | rate, n, c0),
                 couhil (alpha), nikodym (alpha), interval (measure)
               ball/holder/john/couhil/nikodym/interval accept "measure" (default 1)
    p, q, sigma, rho, gamma    exponents
    criteria   subset of wellposedness, lambda, solution_norm, gradient_norm,
               lorentz, embedding (default: wellposedness plus every criterion
               whose exponents are all given)
    datum      {"name": id} for the closed-form verification data, or
               {"csv": path, "csv_minus": path} for tabulated f* (two columns
               s, f*(s); csv_minus defaults to csv)
    grid       {"cells": 10000, "points": 200, "levels": 50}
    sweep      {"axes": {name: [values] | {"start", "stop", "step"}},
                "criterion": "wellposedness"}; axis names are domain
               parameters or p, q, sigma, rho, gamma

Errors exit with status 2 (invalid configuration, message names the violated
condition) or 3 (numerical failure or failed verification, message names the
criterion or check).
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import bounds, criteria, domains, solver
from .numerics import NonFiniteIntegrand, QuadratureError, UnsupportedIntegrand
from .rearrange import RearrangedDatum, StepFunction

COMMANDS = ("catalog", "analyze", "bound", "verify", "sweep")
FORMATS = ("json", "csv", "table")
CRITERION_KINDS = ("wellposedness", "lambda", "solution_norm", "gradient_norm", "lorentz",
                   "embedding")
_NEEDS = {"wellposedness": ("p", "q"), "lambda": ("p", "q"),
          "solution_norm": ("p", "q", "sigma"), "gradient_norm": ("p", "q", "sigma"),
          "lorentz": ("p", "q", "sigma", "rho", "gamma"), "embedding": ("p", "sigma")}
_EXPONENTS = ("p", "q", "sigma", "rho", "gamma")

_FAMILY_ALIASES = {
    "ball": "LipschitzBall", "lipschitzball": "LipschitzBall",
    "holder": "Holder", "john": "GammaJohn", "gammajohn": "GammaJohn",
    "cusp": "Cusp", "funnel": "Funnel", "couhil": "CouhilComb", "couhilcomb": "CouhilComb",
    "nikodym": "NikodymComb", "nikodymcomb": "NikodymComb", "interval": "Interval",
}
_FAMILY_KEYS = {
    "LipschitzBall": {"n", "measure"}, "Holder": {"n", "alpha", "measure"},
    "GammaJohn": {"n", "gamma", "measure"}, "Cusp": {"kappa", "n", "length", "c0"},
    "Funnel": {"beta", "rate", "n", "c0"}, "CouhilComb": {"alpha", "measure"},
    "NikodymComb": {"alpha", "measure"}, "Interval": {"measure"},
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the violated condition."""


class NumericalFailure(RuntimeError):
    """A computation failed; the message names the criterion or check."""


# ---------------------------------------------------------------------------
# configuration


def parse_exponent(name, v) -> Optional[float]:
    if v is None:
        return None
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "infinity"):
            return math.inf
        raise ConfigError(f"{name} must be a number or \"inf\", got {v!r}")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name} must be a number or \"inf\", got {v!r}")
    return float(v)


@dataclass(frozen=True)
class GridConfig:
    cells: int = solver.DEFAULT_CELLS
    points: int = 200
    levels: int = 50

    def __post_init__(self):
        for k in ("cells", "points", "levels"):
            v = getattr(self, k)
            if isinstance(v, bool) or not isinstance(v, int) or v < 2:
                raise ConfigError(f"grid.{k} must be an integer >= 2")


@dataclass(frozen=True)
class RunConfig:
    command: str
    domain: dict = field(default_factory=dict)
    p: Optional[float] = None
    q: Optional[float] = None
    sigma: Optional[float] = None
    rho: Optional[float] = None
    gamma: Optional[float] = None
    criteria: tuple = ()
    datum: Optional[dict] = None
    grid: GridConfig = GridConfig()
    sweep: Optional[dict] = None
    base_dir: str = "."

    @classmethod
    def from_dict(cls, raw: dict, command: str, base_dir: str = ".") -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = {"command", "domain", "criteria", "datum", "grid", "sweep", *_EXPONENTS}
        extra = sorted(set(raw) - known)
        if extra:
            raise ConfigError(f"unknown config keys {extra}")
        if command not in COMMANDS:
            raise ConfigError(f"command must be one of {COMMANDS}")
        if raw.get("command", command) != command:
            raise ConfigError(f"config command {raw['command']!r} disagrees with subcommand {command!r}")
        ex = {k: parse_exponent(k, raw.get(k)) for k in _EXPONENTS}
        grid = raw.get("grid", {})
        if not isinstance(grid, dict) or set(grid) - {"cells", "points", "levels"}:
            raise ConfigError("grid accepts only cells, points, levels")
        crit = raw.get("criteria", ())
        if isinstance(crit, str):
            crit = (crit,)
        bad = [c for c in crit if c not in CRITERION_KINDS]
        if bad:
            raise ConfigError(f"unknown criteria {bad}; expected a subset of {CRITERION_KINDS}")
        cfg = cls(command=command, domain=dict(raw.get("domain", {})), criteria=tuple(crit),
                  datum=raw.get("datum"), grid=GridConfig(**grid), sweep=raw.get("sweep"),
                  base_dir=base_dir, **ex)
        cfg.validate()
        return cfg

    def exponents(self) -> dict:
        return {k: getattr(self, k) for k in _EXPONENTS if getattr(self, k) is not None}

    def validate(self):
        if self.command == "catalog":
            return
        if not self.domain:
            raise ConfigError(f"{self.command} needs a domain")
        family_of(self.domain)
        if self.command != "sweep":
            validate_exponents(self.exponents())
        if self.command in ("bound", "verify"):
            if self.p is None:
                raise ConfigError(f"{self.command} needs p > 1")
            if self.datum is None:
                raise ConfigError(f"{self.command} needs a datum")
        if self.command == "verify" and family_of(self.domain) not in ("Interval", "LipschitzBall"):
            raise ConfigError("verify runs on the exactly reducible models: interval or ball")
        if self.command == "sweep":
            if not isinstance(self.sweep, dict) or not isinstance(self.sweep.get("axes"), dict) \
                    or not self.sweep["axes"]:
                raise ConfigError("sweep needs sweep.axes, a non-empty object of parameter grids")
            kind = self.sweep.get("criterion", "wellposedness")
            if kind not in CRITERION_KINDS:
                raise ConfigError(f"sweep.criterion must be one of {CRITERION_KINDS}")


def validate_exponents(ex: dict):
    p, q, sigma = ex.get("p"), ex.get("q"), ex.get("sigma")
    if p is not None and not (p > 1 and math.isfinite(p)):
        raise ConfigError("p must satisfy 1 < p < inf")
    if q is not None and not 1 <= q <= math.inf:
        raise ConfigError("q must lie in [1, inf]")
    if sigma is not None and not sigma > 0:
        raise ConfigError("sigma must be positive")
    for k in ("rho", "gamma"):
        if ex.get(k) is not None and not ex[k] > 0:
            raise ConfigError(f"{k} must be positive")


def family_of(dom: dict) -> str:
    name = str(dom.get("family", "")).lower()
    if name not in _FAMILY_ALIASES:
        raise ConfigError(f"unknown domain family {dom.get('family')!r}; "
                          f"expected one of {sorted(set(_FAMILY_ALIASES))}")
    fam = _FAMILY_ALIASES[name]
    extra = sorted(set(dom) - {"family"} - _FAMILY_KEYS[fam])
    if extra:
        raise ConfigError(f"{fam} does not take parameters {extra}")
    return fam


@dataclass(frozen=True)
class Domain:
    """A resolved domain: model functions plus the 1D reduction when one exists."""

    family: str
    spec: Optional[domains.DomainSpec]
    model: Optional[domains.WeightedInterval]
    measure: float

    def nu(self, p):
        return self.model.nu(p) if self.spec is None else domains.nu_p(self.spec, p)

    def lam(self):
        return self.model.lam() if self.spec is None else domains.lambda_iso(self.spec)


def build_domain(dom: dict) -> Domain:
    fam = family_of(dom)
    g = dom.get
    try:
        if fam == "Interval":
            m = domains.interval_model(float(g("measure", 1.0)))
            return Domain(fam, None, m, m.measure)
        if fam == "LipschitzBall":
            spec = domains.DomainSpec.ball(int(g("n", 2)), float(g("measure", 1.0)))
        elif fam == "Holder":
            spec = domains.DomainSpec.holder(int(g("n", 2)), _req(dom, "alpha"), float(g("measure", 1.0)))
        elif fam == "GammaJohn":
            spec = domains.DomainSpec.john(int(g("n", 2)), _req(dom, "gamma"), float(g("measure", 1.0)))
        elif fam == "Cusp":
            spec = domains.DomainSpec.cusp(float(g("kappa", 1.0)), int(g("n", 2)),
                                           float(g("length", 1.0)), float(g("c0", 1.0)))
        elif fam == "Funnel":
            if "rate" in dom and "beta" in dom:
                raise ConfigError("Funnel takes either beta (power decay) or rate (exponential)")
            prof = domains.ExpProfile(float(dom["rate"])) if "rate" in dom else None
            spec = domains.DomainSpec.funnel(float(g("beta", 2.0)), int(g("n", 2)),
                                             float(g("c0", 1.0)), profile=prof)
        elif fam == "CouhilComb":
            spec = domains.DomainSpec.couhil(_req(dom, "alpha"), measure=float(g("measure", 1.0)))
        else:
            spec = domains.DomainSpec.nikodym(_req(dom, "alpha"), measure=float(g("measure", 1.0)))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{fam}: {exc}") from exc
    model = spec.profile_model() if fam in ("Cusp", "Funnel") else None
    if fam == "LipschitzBall":
        n = spec.n
        # radius with c0 = 1 so that the radial model has the requested measure
        model = domains.radial_model(n, (n * spec.measure) ** (1.0 / n))
    return Domain(fam, spec, model, spec.measure)


def _req(dom, key):
    if dom.get(key) is None:
        raise ConfigError(f"{dom.get('family')} needs parameter {key}")
    return float(dom[key])


# ---------------------------------------------------------------------------
# data


def read_tabulated_star(path: str) -> StepFunction:
    """Tabulated f*: rows (s, f*(s)), s strictly increasing, f* non-increasing, >= 0.

    The value f*(s_k) is held on (s_{k-1}, s_k] with s_0 = 0.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise ConfigError(f"cannot read tabulated f* {path!r}: {exc}") from exc
    data = []
    for i, r in enumerate(rows):
        if len(r) != 2:
            raise ConfigError(f"{path}: row {i + 1} must have two columns (s, f*(s))")
        try:
            data.append((float(r[0]), float(r[1])))
        except ValueError:
            if i == 0:
                continue  # header
            raise ConfigError(f"{path}: row {i + 1} is not numeric")
    if not data:
        raise ConfigError(f"{path}: no data rows")
    s, v = np.array(data).T
    if not np.all(np.isfinite(s)) or not np.all(np.isfinite(v)):
        raise ConfigError(f"{path}: values must be finite")
    if s[0] <= 0 or np.any(np.diff(s) <= 0):
        raise ConfigError(f"{path}: s must be positive and strictly increasing")
    if np.any(np.diff(v) > 0):
        raise ConfigError(f"{path}: f* must be non-increasing")
    if v[-1] < 0:
        raise ConfigError(f"{path}: f* must be non-negative")
    return StepFunction(np.concatenate([[0.0], s]), v)


def named_data(dom: Domain) -> dict:
    if dom.family == "Interval":
        if dom.measure != 1.0:
            raise ConfigError("closed-form data are defined on the unit interval (measure 1)")
        return solver.interval_data()
    if dom.family == "LipschitzBall":
        if dom.measure != 1.0 / dom.spec.n:
            raise ConfigError(f"closed-form ball data need measure 1/n = {1.0 / dom.spec.n:g}")
        return solver.ball_data(dom.spec.n)
    return {}


def build_datum(cfg: RunConfig, dom: Domain):
    """(Datum or None, RearrangedDatum)."""
    d = cfg.datum
    q = cfg.q if cfg.q is not None else 2.0
    if not isinstance(d, dict):
        raise ConfigError("datum must be an object")
    if "name" in d:
        table = named_data(dom)
        if d["name"] not in table:
            raise ConfigError(f"no closed-form datum {d['name']!r} for {dom.family}; "
                              f"available: {sorted(table)}")
        datum = table[d["name"]]
        return datum, datum.rearranged(q, dom.measure)
    if "csv" not in d:
        raise ConfigError("datum needs either name or csv")
    plus = read_tabulated_star(os.path.join(cfg.base_dir, d["csv"]))
    minus = read_tabulated_star(os.path.join(cfg.base_dir, d.get("csv_minus", d["csv"])))
    for part, lab in ((plus, "csv"), (minus, "csv_minus")):
        if part.measure > dom.measure * (1 + 1e-12):
            raise ConfigError(f"tabulated f* ({lab}) extends beyond |Omega| = {dom.measure:g}")
    try:
        return None, RearrangedDatum(plus, minus, q, dom.measure)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# computations


def evaluate_criterion(kind: str, dom: Domain, ex: dict) -> criteria.CriterionReport:
    missing = [k for k in _NEEDS[kind] if ex.get(k) is None]
    if missing:
        raise ConfigError(f"criterion {kind} needs {missing}")
    p, M = ex["p"], dom.measure
    if kind == "lambda":
        return criteria.wellposedness_via_lambda(dom.lam(), M, p, ex["q"])
    nu = dom.nu(p)
    if kind == "wellposedness":
        return criteria.wellposedness(nu, M, p, ex["q"])
    if kind == "solution_norm":
        return criteria.solution_norm_condition(nu, M, p, ex["q"], ex["sigma"])
    if kind == "gradient_norm":
        return criteria.gradient_norm_condition(nu, M, p, ex["q"], ex["sigma"])
    if kind == "lorentz":
        return criteria.lorentz_gradient_condition(nu, M, p, ex["q"], ex["sigma"], ex["rho"],
                                                   ex["gamma"])
    return criteria.embedding_condition(nu, M, p, ex["sigma"])


def _guarded(kind, fn, *args):
    try:
        return fn(*args)
    except (ConfigError, NumericalFailure):
        raise
    except (criteria.CriterionError, domains.DomainError) as exc:
        raise ConfigError(f"{kind}: {exc}") from exc
    except (QuadratureError, NonFiniteIntegrand, UnsupportedIntegrand, ArithmeticError) as exc:
        raise NumericalFailure(f"{kind}: numerical failure: {exc}") from exc


def run_analyze(cfg: RunConfig) -> list[dict]:
    dom = _guarded("domain", build_domain, cfg.domain)
    ex = cfg.exponents()
    kinds = cfg.criteria or tuple(k for k in CRITERION_KINDS
                                  if k != "lambda" and all(ex.get(x) is not None for x in _NEEDS[k]))
    if not kinds:
        raise ConfigError("analyze needs p and q (or sigma for the embedding criterion)")
    out = []
    for k in kinds:
        try:
            rep = _guarded(k, evaluate_criterion, k, dom, ex)
        except ConfigError as exc:
            if cfg.criteria:
                raise
            # defaulted criteria whose case split excludes these exponents are listed, not run
            out.append({"criterion": k, "criterion_id": "", "verdict": "not_applicable",
                        "summary": "not applicable", "notes": [str(exc)], "domain": dict(cfg.domain),
                        "parameters": ex})
            continue
        d = rep.to_dict()
        d["domain"] = dict(cfg.domain)
        d["criterion"] = k
        out.append(d)
    return out


def run_bound(cfg: RunConfig) -> dict:
    dom = _guarded("domain", build_domain, cfg.domain)
    nu = _guarded("nu_p", dom.nu, cfg.p)
    _, R = build_datum(cfg, dom)
    n = cfg.grid.points
    half, M = nu.half, nu.measure
    s_sol = half * (np.arange(1, n + 1) - 0.5) / n
    s_grad = M * (np.arange(1, n + 1) - 0.5) / n
    curves = {}
    for sign in ("plus", "minus"):
        curves[f"{bounds.THM_A}_{sign}"] = _guarded(
            bounds.THM_A, bounds.solution_rearrangement_bound, nu, R, sign, s_sol)
        curves[f"{bounds.THM_CONFRGRAD}_{sign}"] = _guarded(
            bounds.THM_CONFRGRAD, bounds.gradient_rearrangement_bound, nu, R, sign, s_grad)
        curves[f"{bounds.PROP_540}_{sign}"] = _guarded(
            bounds.PROP_540, bounds.marcinkiewicz_curve, nu, R, sign, s_grad)
    return curves


def _sol_grid(lo, hi, n):
    return lo + (hi - lo) * (np.arange(1, n + 1) - 0.5) / n


def run_verify(cfg: RunConfig):
    dom = _guarded("domain", build_domain, cfg.domain)
    datum, R = build_datum(cfg, dom)
    if datum is None:
        raise ConfigError("verify needs a closed-form datum (datum.name); tabulated f* has no x-profile")
    p, model = cfg.p, dom.model
    nu = model.nu(p)
    sol = _guarded("solver", solver.solve_weighted_neumann, model.A, p, datum.f, model.length,
                   cfg.grid.cells, datum.breaks)
    n = cfg.grid.points
    checks = []
    for sign in ("plus", "minus"):
        curves = (bounds.solution_rearrangement_bound(nu, R, sign, _sol_grid(0, nu.half, n)),
                  bounds.gradient_rearrangement_bound(nu, R, sign, _sol_grid(0, nu.measure, n)),
                  bounds.marcinkiewicz_curve(nu, R, sign, _sol_grid(0, nu.measure, n)))
        checks += [solver.verify_bound(sol, c) for c in curves]
        top = float(sol.u.max()) if sign == "plus" else float(-sol.u.min())
        levels = np.linspace(0.01, 0.99, cfg.grid.levels) * top
        checks.append(solver.verify_flux_inequality(sol, R, levels, sign))
        checks.append(solver.verify_isocap_levelset(sol, nu, levels, sign))
        checks.append(solver.verify_coarea(sol, None, sign))
    report = {"domain": dict(cfg.domain), "datum": datum.name, "p": p, "cells": cfg.grid.cells,
              "compatibility_residual": sol.compatibility_residual,
              "checks": [c.to_dict() for c in checks],
              "passed": all(c.passed for c in checks)}
    return sol, report


def axis_values(name, spec) -> list:
    if isinstance(spec, list):
        if not spec:
            raise ConfigError(f"sweep axis {name} is empty")
        return [parse_exponent(name, v) if name in _EXPONENTS else v for v in spec]
    if isinstance(spec, dict) and set(spec) == {"start", "stop", "step"}:
        a, b, h = (float(spec[k]) for k in ("start", "stop", "step"))
        if h <= 0 or b < a:
            raise ConfigError(f"sweep axis {name} needs step > 0 and stop >= start")
        k = int(math.floor((b - a) / h + 1e-9))
        return [float(round(a + i * h, 12)) for i in range(k + 1)]
    raise ConfigError(f"sweep axis {name} must be a list or {{start, stop, step}}")


def _sweep_point(args):
    kind, base_dom, base_ex, point = args
    dom_cfg = dict(base_dom)
    ex = dict(base_ex)
    for k, v in point.items():
        if k in _EXPONENTS:
            ex[k] = v
        else:
            dom_cfg[k] = v
    try:
        validate_exponents(ex)
        dom = _guarded("domain", build_domain, dom_cfg)
        rep = _guarded(kind, evaluate_criterion, kind, dom, ex)
        return {"criterion_id": rep.criterion_id, "verdict": rep.verdict, "exponent": rep.exponent}
    except ConfigError as exc:
        return {"criterion_id": "", "verdict": "invalid", "exponent": math.nan, "error": str(exc)}


def run_sweep(cfg: RunConfig, threads: int = 1):
    axes = cfg.sweep["axes"]
    names = list(axes)
    for k in names:
        if k not in _EXPONENTS and k not in _FAMILY_KEYS[family_of(cfg.domain)]:
            raise ConfigError(f"sweep axis {k!r} is neither an exponent nor a parameter of "
                              f"{family_of(cfg.domain)}")
    values = [axis_values(k, axes[k]) for k in names]
    kind = cfg.sweep.get("criterion", "wellposedness")
    base_ex = cfg.exponents()
    grid = [dict(zip(names, combo)) for combo in itertools.product(*values)]
    jobs = [(kind, cfg.domain, base_ex, pt) for pt in grid]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]
    rows = []
    for i, (pt, res) in enumerate(zip(grid, results)):
        row = {"index": i, **pt, "criterion_id": res["criterion_id"], "verdict": res["verdict"]}
        rows.append(row)
    return names, rows, decision_boundary(names, rows)


def decision_boundary(names, rows) -> list[dict]:
    """Midpoints along the first axis where the verdict switches, per setting of the others."""
    first, rest = names[0], names[1:]
    groups = {}
    for r in rows:
        groups.setdefault(tuple(r[k] for k in rest), []).append(r)
    out = []
    for key, grp in groups.items():
        for a, b in zip(grp, grp[1:]):
            if a["verdict"] != b["verdict"]:
                out.append({**dict(zip(rest, key)), f"{first}_boundary": 0.5 * (a[first] + b[first]),
                            "below": a["verdict"], "above": b["verdict"]})
    return out


# ---------------------------------------------------------------------------
# deterministic emission


def _fmt(v):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return _Float(v)
    if isinstance(v, dict):
        return {str(k): _fmt(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_fmt(x) for x in v]
    return str(v)


class _Float(float):
    def __repr__(self):
        return "%.12e" % self


def dumps_json(obj) -> str:
    """Sorted keys, %.12e floats, non-finite values spelled as strings."""
    return _encode(_fmt(obj), 0) + "\n"


def _encode(v, depth):
    pad, inner = "  " * depth, "  " * (depth + 1)
    if isinstance(v, _Float):
        return repr(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_encode(v[k], depth + 1)}" for k in sorted(v)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(v, list):
        if not v:
            return "[]"
        return "[\n" + ",\n".join(inner + _encode(x, depth + 1) for x in v) + "\n" + pad + "]"
    return json.dumps(v)


def _cell(v) -> str:
    v = _fmt(v)
    if isinstance(v, _Float):
        return repr(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def dumps_csv(rows: list[dict], columns: Optional[list] = None) -> str:
    if columns is None:
        columns = sorted({k for r in rows for k in r})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def dumps_table(rows: list[dict], columns: Optional[list] = None) -> str:
    if columns is None:
        columns = sorted({k for r in rows for k in r})
    cells = [[str(c) for c in columns]]
    for r in rows:
        cells.append([_short(r.get(c)) for c in columns])
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    lines = ["  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _short(v) -> str:
    if isinstance(v, float) and math.isfinite(v):
        return f"{v:.6g}"
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(_fmt(v), sort_keys=True, default=str)
    return _cell(v)


def emit_report(rows: list[dict], fmt: str, path_stem: str, columns=None) -> str:
    """Write ``rows`` as <stem>.json, .csv or .txt and return the path."""
    if fmt == "json":
        text, ext = dumps_json(rows), ".json"
    elif fmt == "csv":
        text, ext = dumps_csv(rows, columns), ".csv"
    elif fmt == "table":
        text, ext = dumps_table(rows, columns), ".txt"
    else:
        raise ConfigError(f"format must be one of {FORMATS}")
    path = path_stem + ext
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


_REPORT_COLUMNS = ["criterion", "criterion_id", "verdict", "summary", "quantity", "exponent",
                   "log_exponent", "parameters", "domain", "notes"]


def run(cfg: RunConfig, out_dir: str = ".", fmt: str = "json", threads: int = 1,
        stdout=None) -> int:
    """Execute a validated config; returns the exit status."""
    stdout = stdout or sys.stdout
    os.makedirs(out_dir, exist_ok=True)
    stem = lambda name: os.path.join(out_dir, name)
    if cfg.command == "catalog":
        rows = domains.catalog_table()
        emit_report(rows, fmt, stem("catalog"))
        stdout.write(dumps_table(rows, ["family", "parameters", "validity", "exactness"]))
        return 0
    if cfg.command == "analyze":
        rows = run_analyze(cfg)
        emit_report(rows, fmt, stem("analyze"), _REPORT_COLUMNS)
        stdout.write(dumps_table(rows, ["criterion_id", "verdict", "summary", "exponent"]))
        return 0
    if cfg.command == "bound":
        curves = run_bound(cfg)
        for key in sorted(curves):
            c = curves[key]
            rows = [{"s": s, "B": b, "provenance": pr} for s, b, pr in c.rows()]
            with open(stem(f"bound_{key}.csv"), "w", encoding="utf-8", newline="") as fh:
                fh.write(dumps_csv(rows, ["s", "B", "provenance"]))
        meta = [{"curve": k, "provenance": c.provenance, "sign": c.sign,
                 "constants_known": c.constants_known, "notes": list(c.notes),
                 "points": len(c.s_grid)} for k, c in sorted(curves.items())]
        emit_report(meta, fmt, stem("bound"))
        stdout.write(dumps_table(meta, ["curve", "constants_known", "points"]))
        return 0
    if cfg.command == "verify":
        sol, report = run_verify(cfg)
        rows = [{"t": t, "u": u, "du": du} for t, u, du in
                zip(sol.t, sol.u, sol.du_at(sol.t))]
        with open(stem("solution.csv"), "w", encoding="utf-8", newline="") as fh:
            fh.write(dumps_csv(rows, ["t", "u", "du"]))
        with open(stem("verify.json"), "w", encoding="utf-8") as fh:
            fh.write(dumps_json(report))
        if fmt != "json":
            emit_report(report["checks"], fmt, stem("verify_checks"),
                        ["name", "passed", "worst_at", "worst_excess"])
        stdout.write(dumps_table(report["checks"], ["name", "passed", "worst_excess"]))
        failed = [c["name"] for c in report["checks"] if not c["passed"]]
        if failed:
            raise NumericalFailure(f"verification failed: {', '.join(failed)}")
        return 0
    names, rows, boundary = run_sweep(cfg, threads)
    emit_report(rows, fmt, stem("sweep"), ["index", *names, "criterion_id", "verdict"])
    bcols = [*names[1:], f"{names[0]}_boundary", "below", "above"]
    emit_report(boundary, fmt, stem("sweep_boundary"), bcols)
    stdout.write(dumps_table(boundary, bcols) if boundary else "no verdict change along "
                 f"{names[0]}\n")
    return 0


def load_config(path: str, command: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc
    return RunConfig.from_dict(raw, command, os.path.dirname(os.path.abspath(path)))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="isocap", description=__doc__.split("\n\n")[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    ap.add_argument("--format", choices=FORMATS, default="json")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        cfg = load_config(args.config, args.command)
        return run(cfg, args.out, args.format, args.threads)
    except ConfigError as exc:
        print(f"isocap: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"isocap: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
