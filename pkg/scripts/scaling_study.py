"""Regress the test-function integrals on T and R and write the reports.

    python scripts/scaling_study.py --out results/scaling
"""

from __future__ import annotations

import argparse
from dataclasses import asdict, dataclass
from pathlib import Path

from pseudoblow.testfn import write_reports_csv, write_reports_json
from pseudoblow.verify import critical_reports, format_table, scaling_reports, _slope_check


@dataclass
class ScalingStudy:
    p: float = 2.0
    gamma: float = 0.5
    ndim: int = 3
    tol: float = 0.05


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/scaling")
    ap.add_argument("--p", type=float, default=ScalingStudy.p)
    ap.add_argument("--gamma", type=float, default=ScalingStudy.gamma)
    ap.add_argument("--ndim", type=int, default=ScalingStudy.ndim)
    args = ap.parse_args(argv)
    cfg = ScalingStudy(args.p, args.gamma, args.ndim)

    reps = scaling_reports(cfg.p, cfg.gamma, cfg.ndim)
    if cfg.ndim >= 3:
        reps += critical_reports(cfg.ndim)
    print(format_table([_slope_check(r, cfg.tol) for r in reps]))

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    header = asdict(cfg)
    write_reports_json(reps, out.with_suffix(".json"), header)
    write_reports_csv(reps, out.with_suffix(".csv"), [f"{k} = {v!r}" for k, v in header.items()])
    print(f"-> {out.with_suffix('.json')}, {out.with_suffix('.csv')}")


if __name__ == "__main__":
    main()
