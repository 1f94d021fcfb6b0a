"""Blow-up time of the uniform state against the step size.

Compares the solver with the exact tan solution (gamma = 0) and with an
independent fractional Adams integrator (gamma > 0, step dt/100).

    python scripts/tstar_convergence.py --gamma 0.5
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from pseudoblow.solver import ProblemSpec, RadialGrid, RadialProfile, RunControl, run

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from oracles import volterra_abm_blowup  # noqa: E402


def solver_tstar(gamma: float, dt: float) -> float:
    spec = ProblemSpec(k=1.0, p=2.0, gamma=gamma, omega=RadialProfile("constant", 1.0))
    tr = run(spec, RadialGrid(1, 1.0, 16), RunControl(dt0=dt, horizon=10.0))
    return tr.report.t_star_estimate


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", type=float, default=0.5)
    ap.add_argument("--dts", type=float, nargs="+", default=[2e-2, 1e-2, 5e-3])
    args = ap.parse_args(argv)
    for dt in args.dts:
        got = solver_tstar(args.gamma, dt)
        if args.gamma == 0.0:
            ref = math.pi / 2
        else:
            ref = float(volterra_abm_blowup(2.0, args.gamma, 1.0, dt / 100)[0][-1])
        print(f"dt={dt:g}: t*={got:.6f} reference={ref:.6f} rel err={abs(got - ref) / ref:.2e}")


if __name__ == "__main__":
    main()
