"""Acceptance criteria 1-10, one test each.

Every criterion prints a single ``ACCEPTANCE <n> PASS|FAIL`` line in the
terminal summary (see conftest.py). Run this file directly to get only
those lines: ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from oracles import volterra_abm_blowup
from pseudoblow.fracint import (
    FractionalSpec,
    QuadratureWeights,
    left_rl_integral,
    right_rl_integral,
    rl_right_poly_closed_form,
)
from pseudoblow.solver import ProblemSpec, RadialGrid, RadialProfile, RunControl, run
from pseudoblow.sweep import SweepConfig, run_sweep
from pseudoblow.testfn import (
    fit_scaling_exponent,
    i_space_factor,
    i_time_factor,
    j_space_factor,
    j_time_factor,
    omega_positivity_radius,
    weak_residual,
)

RESULTS: dict[int, tuple[bool, str]] = {}

# reference blow-up time of u' = I^0.5(u^2) + 1, u(0) = 0, from
# tests/oracles.py at h = 1e-4 (h = 5e-5 gives 2.37705)
REF_TSTAR_GAMMA_HALF = 2.3771


def _record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (bool(ok), detail)
    assert ok, detail


# -- 1 -----------------------------------------------------------------------


def criterion_1():
    rng = np.random.default_rng(20261019)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        m = int(rng.integers(1, 7))
        gamma = float(rng.uniform(0.05, 0.95))
        T = float(10 ** rng.uniform(-1.0, 2.0))
        t = float(rng.uniform(0.0, 0.99) * T)
        got = right_rl_integral(lambda s: (1.0 - s / T) ** m, t, T, FractionalSpec(gamma))
        # closed form via Beta(m+1, gamma) with math.gamma, independent of lgamma
        want = (math.gamma(m + 1) / math.gamma(m + 1 + gamma)) * T**gamma * (1 - t / T) ** (m + gamma)
        worst = max(worst, abs(got - want) / want)
        assert abs(rl_right_poly_closed_form(m, gamma, T, t) - want) <= 1e-12 * want
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 10.0
    return ok, f"max rel err {worst:.3e} (tol 1e-06), runtime {elapsed:.2f} s (limit 10 s)"


# -- 2 -----------------------------------------------------------------------


def criterion_2():
    worst_sum = 0.0
    for gamma in (0.1, 0.25, 0.5, 0.75, 0.9):
        for dt in (0.01, 0.37):
            qw = QuadratureWeights(dt, gamma)
            for n in (1, 2, 10, 333, 2000):
                t = n * dt
                want = t**gamma / math.gamma(gamma + 1)
                worst_sum = max(worst_sum, abs(qw.row(n).sum() - want) / want)
    orders = []
    cases = [
        # (f, exact I^gamma f at t = 1)
        (lambda t: t**2, lambda g: 2.0 / math.gamma(3.0 + g)),
        (lambda t: t**3 + t, lambda g: 6.0 / math.gamma(4.0 + g) + 1.0 / math.gamma(2.0 + g)),
    ]
    for gamma in (0.3, 0.5, 0.8):
        for f, exact in cases:
            errs = []
            for n in (20, 40, 80, 160):
                t = np.linspace(0.0, 1.0, n + 1)
                errs.append(abs(left_rl_integral(f(t), FractionalSpec(gamma), 1.0 / n) - exact(gamma)))
            orders.extend(math.log2(errs[i] / errs[i + 1]) for i in range(3))
    ok = worst_sum <= 1e-13 and min(orders) >= 1.8
    return ok, f"row-sum rel err {worst_sum:.3e} (tol 1e-13), min order {min(orders):.3f} (need 1.8)"


# -- 3 -----------------------------------------------------------------------


def criterion_3():
    p, gamma, N = 2.0, 0.5, 3
    Ts = Rs = (1e2, 1e3, 1e4)
    start = time.perf_counter()
    t_slopes, r_slopes = [], []
    for w in (1, 2, 3):
        sf = i_space_factor(1e2, p, N, w)
        t_slopes.append(fit_scaling_exponent(Ts, [i_time_factor(T, p, gamma, w) * sf for T in Ts]).fitted_slope)
        tf = i_time_factor(1e2, p, gamma, w)
        r_slopes.append(fit_scaling_exponent(Rs, [tf * i_space_factor(R, p, N, w) for R in Rs]).fitted_slope)
    elapsed = time.perf_counter() - start
    ok = (
        np.allclose(t_slopes, (-1.5, -1.5, 0.5), atol=0.05, rtol=0)
        and np.allclose(r_slopes, (3.0, -1.0, -1.0), atol=0.05, rtol=0)
        and elapsed < 60.0
    )
    fmt = lambda xs: "(" + ", ".join(f"{x:.4f}" for x in xs) + ")"  # noqa: E731
    return ok, f"T-slopes {fmt(t_slopes)}, R-slopes {fmt(r_slopes)}, runtime {elapsed:.2f} s"


# -- 4 -----------------------------------------------------------------------


def criterion_4():
    N, p = 3, 3.0
    logR = (10.0, 20.0, 40.0)
    space = {}
    for w in (2, 3):
        vals = [j_space_factor(math.exp(v), p, N, w) for v in logR]
        space[w] = fit_scaling_exponent(logR, vals).fitted_slope
    Ts = (1e2, 1e3, 1e4)
    time_slope = fit_scaling_exponent(Ts, [j_time_factor(T, p, 2) for T in Ts]).fitted_slope
    ok = all(abs(s + 0.5) <= 0.05 for s in space.values()) and abs(time_slope + 0.5) <= 0.05
    return ok, (f"space slopes J2 {space[2]:.4f}, J3 {space[3]:.4f}; time slope {time_slope:.4f}; "
                "target -0.5 +/- 0.05")


# -- 5 -----------------------------------------------------------------------


def _eigen_rate():
    lam = math.pi**2
    spec = ProblemSpec(k=1.0, p=2.0, gamma=0.0, nonlinear=False,
                       u0=RadialProfile("sinc", 1.0, 1.0))
    grid = RadialGrid(3, 1.0, 401, bc="dirichlet")
    tr = run(spec, grid, RunControl(dt0=1e-4, horizon=0.5, adaptive=False))
    t = np.asarray(tr.t)
    s = np.asarray(tr.sup_norm)
    keep = t >= 0.1
    rate = -np.polyfit(t[keep], np.log(s[keep]), 1)[0]
    target = lam / (1.0 + lam)
    return abs(rate - target) / target


def _heat_error(n_r: int, dt: float, t0: float = 1.0, horizon: float = 0.5, r_max: float = 16.0):
    amp = (4.0 * math.pi * t0) ** -1.5
    spec = ProblemSpec(k=0.0, p=2.0, gamma=0.0, nonlinear=False,
                       u0=RadialProfile("gaussian", amp, 2.0 * math.sqrt(t0)))
    grid = RadialGrid(3, r_max, n_r)
    tr = run(spec, grid, RunControl(dt0=dt, horizon=horizon, adaptive=False))
    tt = t0 + horizon
    exact = (4.0 * math.pi * tt) ** -1.5 * np.exp(-grid.r**2 / (4.0 * tt))
    return float(np.max(np.abs(tr.final_u - exact)))


def criterion_5():
    rel = _eigen_rate()
    e_dt = [_heat_error(3201, 0.05 / 2**i) for i in range(3)]
    e_dr = [_heat_error(40 * 2**i + 1, 1e-4) for i in range(3)]
    o_dt = min(math.log2(e_dt[i] / e_dt[i + 1]) for i in range(2))
    o_dr = min(math.log2(e_dr[i] / e_dr[i + 1]) for i in range(2))
    ok = rel <= 1e-3 and o_dt >= 0.9 and o_dr >= 1.8
    return ok, f"eigen-rate rel err {rel:.2e} (tol 1e-3), order dt {o_dt:.3f} (>=0.9), dr {o_dr:.3f} (>=1.8)"


# -- 6 -----------------------------------------------------------------------


def _uniform_tstar(gamma: float, dt: float) -> float:
    spec = ProblemSpec(k=1.0, p=2.0, gamma=gamma, omega=RadialProfile("constant", 1.0))
    tr = run(spec, RadialGrid(1, 1.0, 16), RunControl(dt0=dt, horizon=10.0, threshold=1e8))
    assert tr.report.outcome == "blowup"
    return tr.report.t_star_estimate


def criterion_6():
    e_tan = abs(_uniform_tstar(0.0, 1e-3) - math.pi / 2) / (math.pi / 2)
    dt = 1e-2
    t_ref = volterra_abm_blowup(2.0, 0.5, 1.0, dt / 100.0)[0][-1]
    assert abs(t_ref - REF_TSTAR_GAMMA_HALF) < 1e-3
    e_mem = abs(_uniform_tstar(0.5, dt) - t_ref) / t_ref
    ok = e_tan <= 0.01 and e_mem <= 0.02
    return ok, f"tan case rel err {e_tan:.2e} (tol 1e-2), gamma=0.5 rel err {e_mem:.2e} (tol 2e-2)"


# -- 7 -----------------------------------------------------------------------


def criterion_7():
    worst = 0.0
    for gamma in (0.0, 0.5):
        dt, horizon = 1e-2, 2.0
        spec = ProblemSpec(k=1.0, p=2.0, gamma=gamma, omega=RadialProfile("gaussian", 1.0, 1.0),
                           u0=RadialProfile("gaussian", 0.5, 1.5))
        tr = run(spec, RadialGrid(3, 10.0, 101), RunControl(dt0=dt, horizon=horizon, adaptive=False))
        t = np.asarray(tr.t)
        mass = np.asarray(tr.mass)
        rhs = np.asarray(tr.source_mass)
        # trapezoid in time of the source mass against the mass increment
        defect = abs((mass[-1] - mass[0]) - np.sum(0.5 * np.diff(t) * (rhs[1:] + rhs[:-1])))
        bound = 5.0 * dt * horizon * float(np.max(np.abs(rhs)))
        worst = max(worst, defect / bound)
    return worst <= 1.0, f"max defect / bound = {worst:.3e} (need <= 1)"


# -- 8 -----------------------------------------------------------------------


def _residual(n_r: int, dt: float) -> float:
    spec = ProblemSpec(k=1.0, p=2.0, gamma=0.5, omega=RadialProfile("gaussian", 0.05, 1.0),
                       u0=RadialProfile("gaussian", 0.1, 1.0))
    tr = run(spec, RadialGrid(3, 8.0, n_r),
             RunControl(dt0=dt, horizon=1.0, adaptive=False, store_profiles=True))
    return weak_residual(tr, "subcritical")


def criterion_8():
    res = [_residual(40 * 2**i + 1, 0.02 / 2**i) for i in range(3)]
    ratios = [res[i] / res[i + 1] for i in range(2)]
    ok = min(ratios) >= 1.8
    return ok, "residuals " + ", ".join(f"{r:.3e}" for r in res) + \
        f"; ratios {ratios[0]:.2f}, {ratios[1]:.2f} (need >= 1.8)"


# -- 9 -----------------------------------------------------------------------


def criterion_9():
    cfg = SweepConfig(p=(2.0, 3.0, 6.0), gamma=(0.0, 0.5), k=(1.0,), ndim=3, omega_amp=0.1)
    res = {(r.p, r.gamma): r for r in run_sweep(cfg, workers=1)}
    got = {key: res[key].outcome for key in [(2.0, 0.0), (6.0, 0.5), (6.0, 0.0), (3.0, 0.0)]}
    near = res[(3.0, 0.0)]
    rows = {
        "p=2,g=0 blowup": got[(2.0, 0.0)] == "blowup",
        "p=6,g=0.5 blowup": got[(6.0, 0.5)] == "blowup",
        "p=6,g=0 bounded": got[(6.0, 0.0)] == "bounded",
        "p=3,g=0 blowup|undecided+monotone": near.outcome == "blowup"
        or (near.outcome == "undecided" and bool(near.monotone)),
    }
    assert near.flagged_near_critical
    ok = all(rows.values())
    detail = "; ".join(f"{k}: {'ok' if v else 'no'}" for k, v in rows.items())
    detail += " | outcomes " + ", ".join(f"{k}={v}" for k, v in got.items())
    return ok, detail


# -- 10 ----------------------------------------------------------------------


def criterion_10():
    # integrals of omega over R^3 in closed form (Gaussian moments):
    # int r^2 e^{-r^2} dr = sqrt(pi)/4, int r^4 e^{-r^2} dr = 3 sqrt(pi)/8
    sp = math.sqrt(math.pi)
    positive = {
        "0.1 e^{-r^2}": (lambda r: 0.1 * np.exp(-r**2), 0.1 * sp / 4),
        "(1 - r^2/2) e^{-r^2}": (lambda r: (1 - 0.5 * r**2) * np.exp(-r**2), sp / 4 - 0.5 * 3 * sp / 8),
        "(1 - r^2/10) e^{-r^2}": (lambda r: (1 - 0.1 * r**2) * np.exp(-r**2), sp / 4 - 0.1 * 3 * sp / 8),
        # negative core, positive halo: int r^2 e^{-r^2/9} dr = 27 sqrt(pi)/4
        "0.1 e^{-r^2/9} - 0.5 e^{-r^2}": (
            lambda r: 0.1 * np.exp(-r**2 / 9) - 0.5 * np.exp(-r**2),
            0.1 * 27 * sp / 4 - 0.5 * sp / 4,
        ),
    }
    negative = (lambda r: (1 - r**2) * np.exp(-r**2), sp / 4 - 3 * sp / 8)
    lines, ok = [], True
    for name, (f, integral) in positive.items():
        assert integral > 0
        R = omega_positivity_radius(f, 3)
        ok &= R is not None and math.isfinite(R)
        lines.append(f"{name}: R={R}")
    assert negative[1] < 0
    R = omega_positivity_radius(negative[0], 3)
    ok &= R is None
    lines.append(f"(1 - r^2) e^{{-r^2}}: R={R}")
    return ok, "; ".join(lines)


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_acceptance_criterion(n):
    ok, detail = CRITERIA[n]()
    _record(n, ok, detail)


if __name__ == "__main__":
    for n, fn in CRITERIA.items():
        try:
            ok, detail = fn()
        except Exception as exc:  # report and keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        print(f"ACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'}: {detail}")
