"""Parameter sweeps over (p, gamma, k) and the resulting outcome map."""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .blowup import OUTCOMES
from .solver import ProblemSpec, RadialGrid, RadialProfile, RunControl, run
from .testfn import omega_positivity_radius, p_critical

MAP_COLUMNS = ["N", "k", "p", "gamma", "omega_amp", "outcome", "t_star", "steps",
               "flagged_near_critical", "wall_ms"]
NEAR_CRITICAL_BAND = 0.1


def _as_tuple(xs, name):
    if isinstance(xs, (int, float)):
        xs = (xs,)
    xs = tuple(float(x) for x in xs)
    if not xs:
        raise ValueError(f"{name} list is empty")
    return xs


@dataclass(frozen=True)
class SweepConfig:
    """A sweep over ``p x gamma x k``; everything else is shared.

    ``r_max`` matters: on the Neumann ball the forcing's mass accumulates,
    so outcomes at a finite horizon depend on the ball's volume.
    """

    p: tuple = (2.0, 3.0, 6.0)
    gamma: tuple = (0.0, 0.5)
    k: tuple = (1.0,)
    ndim: int = 3
    omega_amp: float = 0.1
    omega_width: float = 1.0
    r_max: float = 16.0
    n_r: int = 161
    bc: str = "neumann"
    dt0: float = 0.5
    horizon: float = 1e3
    threshold: float = 1e8
    growth_limit: float = 1.1
    adapt_floor: float = 1.0
    dt_min: float = 1e-12

    def __post_init__(self):
        for name in ("p", "gamma", "k"):
            object.__setattr__(self, name, _as_tuple(getattr(self, name), name))
        if any(not p > 1 for p in self.p):
            raise ValueError("p must exceed 1")
        if any(not 0.0 <= g < 1.0 for g in self.gamma):
            raise ValueError("gamma must lie in [0, 1)")
        if any(not k >= 0 for k in self.k):
            raise ValueError("k must be nonnegative")
        if self.ndim < 1:
            raise ValueError("ndim must be at least 1")
        # validates the remaining grid and control fields
        self.grid()
        self.control()
        if omega_positivity_radius(self.omega(), self.ndim) is None:
            raise ValueError("forcing must have a positive integral")

    def omega(self) -> RadialProfile:
        return RadialProfile("gaussian", self.omega_amp, self.omega_width)

    def grid(self) -> RadialGrid:
        return RadialGrid(self.ndim, self.r_max, self.n_r, self.bc)

    def control(self) -> RunControl:
        return RunControl(dt0=self.dt0, horizon=self.horizon, threshold=self.threshold,
                          growth_limit=self.growth_limit, adapt_floor=self.adapt_floor,
                          dt_min=self.dt_min)

    def cases(self):
        return [(p, g, k) for k in self.k for p in self.p for g in self.gamma]


@dataclass
class CaseResult:
    ndim: int
    k: float
    p: float
    gamma: float
    omega_amp: float
    outcome: str
    t_star: float | None
    steps: int
    flagged_near_critical: bool
    wall_ms: float
    # diagnostics kept out of the map CSV
    final_sup: float | None = None
    tail_growth: float | None = None
    monotone: bool | None = None
    error: str | None = None

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {self.outcome!r}")

    @property
    def key(self):
        return (self.ndim, self.k, self.p, self.gamma, self.omega_amp)

    def csv_row(self) -> list[str]:
        def num(x):
            return "" if x is None else repr(float(x))
        return [str(self.ndim), num(self.k), num(self.p), num(self.gamma), num(self.omega_amp),
                self.outcome, num(self.t_star), str(self.steps),
                "true" if self.flagged_near_critical else "false", num(self.wall_ms)]

    def to_dict(self) -> dict:
        return asdict(self)


def near_critical(p: float, ndim: int) -> bool:
    pc = p_critical(ndim) if ndim >= 3 else math.inf
    return abs(p - pc) < NEAR_CRITICAL_BAND


def _tail_stats(t, s, frac=0.1):
    t = np.asarray(t)
    s = np.asarray(s)
    cut = t[-1] - frac * (t[-1] - t[0])
    s_cut = float(np.interp(cut, t, s))
    growth = float(s[-1] / s_cut) if s_cut > 0 else None
    return growth, bool(np.all(np.diff(s) >= 0))


def run_case(cfg: SweepConfig, p: float, gamma: float, k: float) -> CaseResult:
    t0 = time.perf_counter()
    base = dict(ndim=cfg.ndim, k=k, p=p, gamma=gamma, omega_amp=cfg.omega_amp,
                flagged_near_critical=near_critical(p, cfg.ndim))
    try:
        spec = ProblemSpec(k=k, p=p, gamma=gamma, omega=cfg.omega())
        tr = run(spec, cfg.grid(), cfg.control())
        growth, mono = _tail_stats(tr.t, tr.sup_norm)
        rep = tr.report
        return CaseResult(**base, outcome=rep.outcome, t_star=rep.t_star_estimate,
                          steps=tr.steps, wall_ms=1e3 * (time.perf_counter() - t0),
                          final_sup=tr.sup_norm[-1], tail_growth=growth, monotone=mono)
    except Exception as exc:  # one bad case must not sink the sweep
        return CaseResult(**base, outcome="undecided", t_star=None, steps=0,
                          wall_ms=1e3 * (time.perf_counter() - t0),
                          error=f"{type(exc).__name__}: {exc}")


def _run_packed(args):
    return run_case(*args)


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> list[CaseResult]:
    """Run every case, sorted by ``(N, k, p, gamma, omega_amp)``.

    ``workers`` defaults to the available CPU count; 1 runs in-process.
    """
    jobs = [(cfg, p, g, k) for p, g, k in cfg.cases()]
    if workers is None:
        workers = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count()
    workers = max(1, min(int(workers), len(jobs)))
    if workers == 1:
        results = [_run_packed(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_packed, jobs))
    return sorted(results, key=lambda r: r.key)


def write_map_csv(results, path, header_lines=()) -> None:
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for r in results:
            if r.error:
                fh.write(f"# error N={r.ndim} k={r.k!r} p={r.p!r} gamma={r.gamma!r}: {r.error}\n")
        w = csv.writer(fh)
        w.writerow(MAP_COLUMNS)
        w.writerows(r.csv_row() for r in results)


@dataclass
class OutcomeMap:
    """``p x gamma`` outcome table; each cell lists outcomes in ``(N, k, amp)`` order."""

    p_values: list
    gamma_values: list
    cells: dict = field(default_factory=dict)
    p_c: float | None = None

    def side(self, p: float) -> str:
        if self.p_c is None:
            return ""
        if abs(p - self.p_c) < 1e-12:
            return "=p_c"
        return "<p_c" if p < self.p_c else ">p_c"

    def render(self) -> str:
        head = ["p \\ gamma"] + [repr(g) for g in self.gamma_values] + ["vs p_c"]
        rows = [head]
        for p in self.p_values:
            row = [repr(p)]
            for g in self.gamma_values:
                row.append("/".join(self.cells.get((p, g), ["-"])))
            row.append(self.side(p))
            rows.append(row)
            if self.p_c is not None and p < self.p_c and any(q >= self.p_c for q in self.p_values) \
                    and p == max(q for q in self.p_values if q < self.p_c):
                rows.append([f"-- p_c = {self.p_c!r} --"] + [""] * (len(head) - 1))
        widths = [max(len(r[i]) for r in rows) for i in range(len(head))]
        return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def classify_map(results) -> OutcomeMap:
    results = list(results)
    if not results:
        raise ValueError("no results to classify")
    dims = {r.ndim for r in results}
    p_c = None
    if len(dims) == 1 and min(dims) >= 3:
        p_c = p_critical(dims.pop())
    table = OutcomeMap(sorted({r.p for r in results}), sorted({r.gamma for r in results}), p_c=p_c)
    for r in sorted(results, key=lambda r: r.key):
        table.cells.setdefault((r.p, r.gamma), []).append(r.outcome)
    return table
