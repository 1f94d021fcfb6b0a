"""Local log-log slopes of the critical space factor against ln R.

The space factor of J2/J3 has the form ``L^(-1/2) H(1/L)`` with
``L = ln sqrt(R)``; the O(1/L) part of ``H`` bends the curve at moderate
R. This prints the slope between consecutive ln R values so the approach
to (2 - N)/2 can be seen, for the default profile and a few kappa values.

    python scripts/critical_slope_window.py
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass, field

import numpy as np

from pseudoblow.cutoffs import LogCutoff
from pseudoblow.testfn import j_space_factor, p_critical


@dataclass
class Window:
    ndim: int = 3
    log_R: list = field(default_factory=lambda: [10.0, 20.0, 40.0, 80.0, 160.0, 320.0, 640.0])
    kappas: list = field(default_factory=lambda: [3.0, 4.0, 6.0])


def local_slopes(cfg: Window, kappa: float):
    p = p_critical(cfg.ndim)
    vals = [j_space_factor(math.exp(x), p, cfg.ndim, 2, LogCutoff(math.exp(x), kappa))
            for x in cfg.log_R]
    lx, ly = np.log(cfg.log_R), np.log(vals)
    return vals, np.diff(ly) / np.diff(lx), np.polyfit(lx[:3], ly[:3], 1)[0]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ndim", type=int, default=3)
    args = ap.parse_args(argv)
    cfg = Window(ndim=args.ndim)
    print(f"target slope {(2 - cfg.ndim) / 2}")
    for kappa in cfg.kappas:
        vals, slopes, fit3 = local_slopes(cfg, kappa)
        print(f"kappa={kappa}: fit over first three ln R = {fit3:.4f}")
        for a, b, s in zip(cfg.log_R, cfg.log_R[1:], slopes):
            print(f"  ln R {a:6.0f} -> {b:6.0f}: {s:+.4f}")


if __name__ == "__main__":
    main()
