"""Solve the interval model for every closed-form datum and check all bounds strictly.

    python scripts/verify_interval.py --cells 4000
"""

import argparse

import numpy as np

from isocap.bounds import (gradient_rearrangement_bound, marcinkiewicz_curve,
                           solution_rearrangement_bound)
from isocap.domains import interval_model
from isocap.solver import (interval_data, solve_weighted_neumann, verify_bound, verify_coarea,
                           verify_flux_inequality, verify_isocap_levelset)


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--cells", type=int, default=4000)
    ap.add_argument("--points", type=int, default=99)
    args = ap.parse_args()
    model = interval_model()
    sg = np.linspace(0.005, 0.495, args.points)
    gg = np.linspace(0.005, 0.995, 2 * args.points + 1)
    failed = 0
    for p in (1.5, 2.0, 3.0):
        nu = model.nu(p)
        for name, d in interval_data().items():
            sol = solve_weighted_neumann(model.A, p, d.f, model.length, args.cells, d.breaks)
            R = d.rearranged()
            reports = []
            for sign in ("plus", "minus"):
                top = float(sol.u.max()) if sign == "plus" else float(-sol.u.min())
                levels = np.linspace(0.01, 0.99, 50) * top
                reports += [verify_bound(sol, solution_rearrangement_bound(nu, R, sign, sg)),
                            verify_bound(sol, gradient_rearrangement_bound(nu, R, sign, gg)),
                            verify_bound(sol, marcinkiewicz_curve(nu, R, sign, gg)),
                            verify_flux_inequality(sol, R, levels, sign),
                            verify_isocap_levelset(sol, nu, levels, sign),
                            verify_coarea(sol, None, sign)]
            bad = [r.name for r in reports if not r.passed]
            failed += len(bad)
            worst = max(r.worst_excess for r in reports)
            print(f"p={p:<4} {name:<7} {'ok' if not bad else 'FAIL ' + ','.join(bad):<10} "
                  f"worst excess {worst:.3e}")
    raise SystemExit(1 if failed else 0)


if __name__ == "__main__":
    main()
