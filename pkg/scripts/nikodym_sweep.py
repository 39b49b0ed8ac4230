"""Well-posedness verdicts on Nikodym combs delta(s) = s^alpha over an (alpha, p, q) grid.

Compares the capacity route with the isoperimetric route and writes both decision
boundaries as CSV.

    python scripts/nikodym_sweep.py --out sweep_out
"""

import argparse
import os

import numpy as np

from isocap.cli import dumps_csv
from isocap.criteria import conjugate, wellposedness, wellposedness_via_lambda
from isocap.domains import DomainSpec, lambda_iso, nu_p


def boundary(alphas, verdicts):
    for a, b, va, vb in zip(alphas, alphas[1:], verdicts, verdicts[1:]):
        if va != vb:
            return 0.5 * (a + b)
    return float("nan")


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--out", default="sweep_out")
    ap.add_argument("--step", type=float, default=0.05)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    alphas = [float(a) for a in np.round(np.arange(1.05, 3.0 + 1e-9, args.step), 10)]
    rows = []
    for p in (1.5, 2.0, 3.0):
        for q in (1.5, 2.0, 4.0):
            doms = [DomainSpec.nikodym(a) for a in alphas]
            cap = [wellposedness(nu_p(d, p), 1.0, p, q).verdict for d in doms]
            iso = [wellposedness_via_lambda(lambda_iso(d), 1.0, p, q).verdict for d in doms]
            rows.append({"p": p, "q": q,
                         "capacity_boundary": boundary(alphas, cap),
                         "capacity_expected": 1 + p / conjugate(q),
                         "isoperimetric_boundary": boundary(alphas, iso),
                         "isoperimetric_expected": 2 - 1 / q})
    cols = ["p", "q", "capacity_boundary", "capacity_expected", "isoperimetric_boundary",
            "isoperimetric_expected"]
    text = dumps_csv(rows, cols)
    with open(os.path.join(args.out, "nikodym_boundaries.csv"), "w", encoding="utf-8") as fh:
        fh.write(text)
    for r in rows:
        print(f"p={r['p']:<4} q={r['q']:<4} capacity {r['capacity_boundary']:.3f} "
              f"(expect {r['capacity_expected']:.3f})  isoperimetric "
              f"{r['isoperimetric_boundary']:.3f} (expect {r['isoperimetric_expected']:.3f})")


if __name__ == "__main__":
    main()
