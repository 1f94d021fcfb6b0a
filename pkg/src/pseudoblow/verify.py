"""Self-checks driven by ``pseudoblow verify``.

Each function returns a list of :class:`Check` rows comparing a measured
quantity against its closed-form or theoretical target.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from .fracint import (
    FractionalSpec,
    QuadratureWeights,
    left_rl_integral,
    right_rl_integral,
    rl_right_poly_closed_form,
)
from .testfn import (
    ScalingReport,
    fit_scaling_exponent,
    i_space_factor,
    i_time_factor,
    j_space_factor,
    j_time_factor,
    p_critical,
)


@dataclass
class Check:
    name: str
    measured: float
    target: float
    tol: float
    passed: bool
    detail: str = ""

    def __post_init__(self):
        self.measured = float(self.measured)
        self.target = float(self.target)
        self.passed = bool(self.passed)

    def to_dict(self) -> dict:
        return asdict(self)


def _slope_check(rep: ScalingReport, tol: float) -> Check:
    return Check(f"{rep.quantity} slope in {rep.sweep_var}", rep.fitted_slope, rep.theory_slope,
                 tol, rep.passes(tol))


def random_closed_form_cases(n: int = 20, seed: int = 0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        m = int(rng.integers(1, 7))
        gamma = float(rng.uniform(0.05, 0.95))
        T = float(10 ** rng.uniform(-0.5, 2.0))
        t = float(rng.uniform(0.0, 0.95) * T)
        out.append((m, gamma, T, t))
    return out


def check_right_closed_form(n: int = 20, seed: int = 0, tol: float = 1e-6) -> list[Check]:
    start = time.perf_counter()
    worst = 0.0
    for m, gamma, T, t in random_closed_form_cases(n, seed):
        got = right_rl_integral(lambda s: (1.0 - s / T) ** m, t, T, FractionalSpec(gamma))
        want = rl_right_poly_closed_form(m, gamma, T, t)
        worst = max(worst, abs(got - want) / abs(want))
    elapsed = time.perf_counter() - start
    return [
        Check("right integral of (1-t/T)^m, max rel err", worst, 0.0, tol, worst <= tol,
              f"{n} random (m, gamma, T, t) tuples"),
        Check("right integral runtime [s]", elapsed, 0.0, 10.0, elapsed < 10.0),
    ]


def check_row_sums(gammas=(0.1, 0.3, 0.5, 0.7, 0.9), rows=(1, 7, 100, 1000), dt: float = 0.013,
                   tol: float = 1e-13) -> list[Check]:
    worst = 0.0
    for g in gammas:
        qw = QuadratureWeights(dt, g)
        for n in rows:
            t = n * dt
            want = t**g / math.gamma(g + 1.0)
            worst = max(worst, abs(qw.row(n).sum() - want) / want)
    return [Check("weight row sums vs t^g/Gamma(g+1), max rel err", worst, 0.0, tol, worst <= tol)]


def _monomial_error(deg: int, gamma: float, n: int, t_end: float = 1.0) -> float:
    dt = t_end / n
    t = dt * np.arange(n + 1)
    got = left_rl_integral(t**deg, FractionalSpec(gamma), dt)
    want = math.gamma(deg + 1) / math.gamma(deg + 1 + gamma) * t_end ** (deg + gamma)
    return abs(got - want)


def check_convergence_order(gammas=(0.25, 0.5, 0.75), n0: int = 16, halvings: int = 3,
                            min_order: float = 1.8) -> list[Check]:
    out = []
    for g in gammas:
        for deg in (2, 3):
            errs = [_monomial_error(deg, g, n0 * 2**i) for i in range(halvings + 1)]
            orders = [math.log2(errs[i] / errs[i + 1]) for i in range(halvings)]
            worst = min(orders)
            out.append(Check(f"left integral order, t^{deg}, gamma={g}", worst, 2.0, 2.0 - min_order,
                             worst >= min_order, "orders " + ", ".join(f"{o:.3f}" for o in orders)))
    return out


def verify_fracint() -> list[Check]:
    return check_right_closed_form() + check_row_sums() + check_convergence_order()


def scaling_reports(p: float = 2.0, gamma: float = 0.5, ndim: int = 3,
                    T_values=(1e2, 1e3, 1e4), R_values=(1e2, 1e3, 1e4),
                    T_fixed: float = 1e2, R_fixed: float = 1e2) -> list[ScalingReport]:
    """T- and R-slopes of I1..I3 for ``psi(t) xi(x)``."""
    t_theory = {1: -(gamma + 1) / (p - 1), 2: -(gamma + 1) / (p - 1), 3: 1 - gamma / (p - 1)}
    r_theory = {1: float(ndim), 2: ndim - 2 * p / (p - 1), 3: ndim - 2 * p / (p - 1)}
    reps = []
    for w in (1, 2, 3):
        sf = i_space_factor(R_fixed, p, ndim, w)
        vals = [i_time_factor(T, p, gamma, w) * sf for T in T_values]
        reps.append(fit_scaling_exponent(T_values, vals, t_theory[w], f"I{w}", "T"))
    for w in (1, 2, 3):
        tf = i_time_factor(T_fixed, p, gamma, w)
        vals = [tf * i_space_factor(R, p, ndim, w) for R in R_values]
        reps.append(fit_scaling_exponent(R_values, vals, r_theory[w], f"I{w}", "R"))
    return reps


def verify_scaling(p: float = 2.0, gamma: float = 0.5, ndim: int = 3, tol: float = 0.05):
    reps = scaling_reports(p, gamma, ndim)
    return [_slope_check(r, tol) for r in reps], reps


def critical_reports(ndim: int = 3, log_R=(10.0, 20.0, 40.0),
                     T_values=(1e2, 1e3, 1e4)) -> list[ScalingReport]:
    """Space factors of J2, J3 against ``ln R`` and the J1/J2 time factor against T."""
    p = p_critical(ndim)
    reps = []
    x = [float(v) for v in log_R]
    for w in (2, 3):
        vals = [j_space_factor(math.exp(v), p, ndim, w) for v in log_R]
        reps.append(fit_scaling_exponent(x, vals, (2.0 - ndim) / 2.0, f"J{w} space", "ln R"))
    for w in (1, 2):
        vals = [j_time_factor(T, p, w) for T in T_values]
        reps.append(fit_scaling_exponent(T_values, vals, 1.0 - ndim / 2.0, f"J{w} time", "T"))
    return reps


def verify_critical(ndim: int = 3, tol: float = 0.05):
    reps = critical_reports(ndim)
    return [_slope_check(r, tol) for r in reps], reps


def format_table(checks: list[Check]) -> str:
    rows = [("check", "measured", "target", "tol", "result")]
    for c in checks:
        rows.append((c.name, f"{c.measured:.6g}", f"{c.target:.6g}", f"{c.tol:.3g}",
                     "PASS" if c.passed else "FAIL"))
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)
