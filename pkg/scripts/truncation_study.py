"""How the finite-horizon outcomes depend on the radius of the Neumann ball.

The forcing's mass accumulates in a closed ball, so the spatial mean of u
grows like t * int(omega) / |B|. This sweeps r_max for the four reference
cases and also reports the first time each case crosses the threshold on
a longer horizon.

    python scripts/truncation_study.py
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

import numpy as np

from pseudoblow.solver import ProblemSpec, RadialGrid, RadialProfile, RunControl, run


@dataclass
class Truncation:
    radii: list = field(default_factory=lambda: [10.0, 12.0, 14.0, 16.0, 18.0, 20.0])
    cases: list = field(default_factory=lambda: [(2.0, 0.0), (3.0, 0.0), (6.0, 0.0), (6.0, 0.5)])
    horizon: float = 1e3
    long_horizon: float = 2e4
    dt0: float = 0.5


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--long", action="store_true", help="also run to the long horizon")
    args = ap.parse_args(argv)
    cfg = Truncation()
    omega = RadialProfile("gaussian", 0.1, 1.0)
    for r_max in cfg.radii:
        grid = RadialGrid(3, r_max, int(10 * r_max) + 1)
        row = []
        for p, g in cfg.cases:
            tr = run(ProblemSpec(k=1.0, p=p, gamma=g, omega=omega), grid,
                     RunControl(dt0=cfg.dt0, horizon=cfg.horizon))
            t, s = np.asarray(tr.t), np.asarray(tr.sup_norm)
            growth = s[-1] / np.interp(t[-1] - 0.1 * t[-1], t, s)
            row.append(f"p={p:g},g={g:g}: {tr.report.outcome:9s} (last-decade x{growth:.3f})")
            if args.long:
                lt = run(ProblemSpec(k=1.0, p=p, gamma=g, omega=omega), grid,
                         RunControl(dt0=2.0, horizon=cfg.long_horizon))
                row[-1] += f" [t_hit={lt.report.threshold_hit_time}]"
        print(f"r_max={r_max:5.1f}  " + " | ".join(row))


if __name__ == "__main__":
    main()
