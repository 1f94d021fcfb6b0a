"""Outcome classification and blow-up time extrapolation from sup-norm series."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

OUTCOMES = ("blowup", "bounded", "undecided")


@dataclass
class BlowupReport:
    outcome: str
    t_star_estimate: float | None = None
    fit_exponent: float | None = None
    fit_residual: float | None = None
    threshold_hit_time: float | None = None
    last_time: float | None = None
    diverged: bool = False

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {self.outcome!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _as_arrays(series):
    if len(series) == 0:
        raise ValueError("empty series")
    t, s = (np.asarray(x, dtype=float) for x in zip(*series))
    if np.any(np.diff(t) <= 0):
        raise ValueError("series times must be strictly increasing")
    return t, s


def detect(series, threshold: float, horizon: float, diverged: bool = False,
           tail_fraction: float = 0.1, flat_factor: float = 1.05) -> str:
    """Classify a ``(t, sup_norm)`` series.

    blowup: the threshold was crossed or the solver diverged. bounded: the
    horizon was reached, the final sup-norm is below half the threshold and
    it grew by less than ``flat_factor`` over the last ``tail_fraction`` of
    the time span. Anything else is undecided.
    """
    t, s = _as_arrays(series)
    if diverged or np.any(s >= threshold):
        return "blowup"
    if t[-1] < horizon * (1 - 1e-9):
        return "undecided"
    if s[-1] >= 0.5 * threshold:
        return "undecided"
    t_tail = t[-1] - tail_fraction * (t[-1] - t[0])
    s_tail = float(np.interp(t_tail, t, s))
    if s[-1] == 0.0:
        return "bounded"
    if s_tail == 0.0:
        return "undecided"
    return "bounded" if s[-1] / s_tail < flat_factor else "undecided"


def _growth_window(t, s, threshold, frac, min_points):
    ref = threshold if threshold is not None and s.max() >= frac * threshold else s.max()
    above = s >= frac * ref
    start = len(s)
    while start > 0 and above[start - 1]:
        start -= 1
    if len(s) - start < min_points:
        start = max(0, len(s) - min_points)
    tw, sw = t[start:], s[start:]
    if len(sw) < 3 or np.any(np.diff(sw) <= 0):
        raise ValueError("no monotone growth window at the end of the series")
    return tw, sw


def estimate_t_star(series, p: float, threshold: float | None = None, window_frac: float = 0.1,
                    min_points: int = 10):
    """Extrapolate the blow-up time from the tail of a growing series.

    Fits ``sup_norm**-(p-1)`` linearly in t over the growth window and takes
    the root. The free-exponent fit ``log sup ~ -alpha log(t_star - t)`` is
    returned among the diagnostics.
    """
    if not p > 1:
        raise ValueError("p must exceed 1")
    t, s = _as_arrays(series)
    tw, sw = _growth_window(t, s, threshold, window_frac, min_points)
    y = sw ** (-(p - 1.0))
    slope, icpt = np.polyfit(tw, y, 1)
    if not slope < 0:
        raise ValueError("window does not approach a finite-time singularity")
    t_star = -icpt / slope
    resid = float(np.max(np.abs(y - (icpt + slope * tw))) / np.max(np.abs(y)))
    t_star = max(t_star, float(t[-1]))
    gap = t_star - tw
    ok = gap > 0
    alpha = None
    if ok.sum() >= 3:
        alpha = float(-np.polyfit(np.log(gap[ok]), np.log(sw[ok]), 1)[0])
    diag = {"fit_exponent": alpha, "fit_residual": resid, "window_points": int(len(tw)),
            "window_start": float(tw[0])}
    return float(t_star), diag


def analyze(series, p: float, threshold: float, horizon: float, diverged: bool = False) -> BlowupReport:
    t, s = _as_arrays(series)
    outcome = detect(series, threshold, horizon, diverged)
    hit = np.nonzero(s >= threshold)[0]
    report = BlowupReport(
        outcome=outcome,
        threshold_hit_time=float(t[hit[0]]) if hit.size else None,
        last_time=float(t[-1]),
        diverged=diverged,
    )
    if outcome == "blowup":
        try:
            t_star, diag = estimate_t_star(series, p, threshold)
            report.t_star_estimate = t_star
            report.fit_exponent = diag["fit_exponent"]
            report.fit_residual = diag["fit_residual"]
        except ValueError:
            report.t_star_estimate = float(t[-1])
    if report.fit_residual is not None and not math.isfinite(report.fit_residual):
        report.fit_residual = None
    return report
