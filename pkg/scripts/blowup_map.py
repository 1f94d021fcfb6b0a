"""Outcome map over (p, gamma) in N = 3 with a small Gaussian forcing.

    python scripts/blowup_map.py --out results/map.csv -j 4
"""

from __future__ import annotations

import argparse
from dataclasses import asdict
from pathlib import Path

from pseudoblow.sweep import SweepConfig, classify_map, run_sweep, write_map_csv


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/map.csv")
    ap.add_argument("-j", "--jobs", type=int, default=None)
    ap.add_argument("--r-max", type=float, default=SweepConfig.r_max)
    ap.add_argument("--horizon", type=float, default=SweepConfig.horizon)
    args = ap.parse_args(argv)
    n_r = int(round(10 * args.r_max)) + 1
    cfg = SweepConfig(p=(1.5, 2.0, 2.5, 2.9, 3.0, 3.1, 4.0, 6.0), gamma=(0.0, 0.25, 0.5, 0.75),
                      r_max=args.r_max, n_r=n_r, horizon=args.horizon)
    results = run_sweep(cfg, workers=args.jobs)
    print(classify_map(results).render())
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_map_csv(results, out, [f"{k} = {v!r}" for k, v in asdict(cfg).items()])
    print(f"-> {out}")


if __name__ == "__main__":
    main()
