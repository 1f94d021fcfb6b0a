"""Test-function machinery of the nonexistence argument, evaluated numerically.

The integrals here are the quantities the weak formulation is tested
against: I1..I3 for the subcritical construction ``psi(t) xi(x)`` and
J1..J3 for the critical construction ``eta(t) phi(x)``. All of them
factor into a time integral and a radial space integral, which are
computed separately so their scaling in T and R can be regressed on.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .cutoffs import (
    Bump,
    LogCutoff,
    SpaceCutoff,
    TimeCutoff,
    default_kappa,
)
from .fracint import FractionalSpec, right_rl_integral, rl_right_poly_closed_form

__all__ = [
    "DivergentIntegralError",
    "ScalingReport",
    "m_from_p",
    "p_critical",
    "p_fujita",
    "sphere_area",
    "eval_cutoffs",
    "i_time_factor",
    "i_space_factor",
    "compute_I",
    "j_time_factor",
    "j_space_factor",
    "compute_J",
    "fit_scaling_exponent",
    "omega_positivity_radius",
    "weak_residual",
    "write_reports_json",
    "write_reports_csv",
]


class DivergentIntegralError(ValueError):
    """A test-function integral does not converge (cutoff too flat at its edge)."""


def m_from_p(p: float) -> int:
    if not p > 1:
        raise ValueError("p must exceed 1")
    return math.floor(1.0 / (p - 1.0)) + 1


def p_critical(ndim: int) -> float:
    if ndim <= 0:
        raise ValueError("dimension must be positive")
    return math.inf if ndim <= 2 else ndim / (ndim - 2.0)


def p_fujita(ndim: int) -> float:
    if ndim <= 0:
        raise ValueError("dimension must be positive")
    return 1.0 + 2.0 / ndim


def sphere_area(ndim: int) -> float:
    """Surface area of the unit sphere in R^ndim."""
    return 2.0 * math.pi ** (ndim / 2.0) / math.gamma(ndim / 2.0)


def eval_cutoffs(point, family, ndim: int = 3):
    """Value and derivatives of a cutoff at ``point = (t, r)``.

    Temporal families read ``t`` and spatial families read ``r``. Spatial
    families additionally return the radial Laplacian as a fourth entry.
    """
    t, r = point
    if isinstance(family, (TimeCutoff, Bump)):
        v, d1, d2 = family.derivs(t)
        return float(v), float(d1), float(d2)
    if isinstance(family, (SpaceCutoff, LogCutoff)):
        v, d1, d2 = family.derivs(r)
        lap = family.laplacian(r, ndim)
        return float(v), float(d1), float(d2), float(lap)
    raise TypeError(f"unknown cutoff family {type(family).__name__}")


# -- quadrature helpers -----------------------------------------------------


def _weighted(v, g, p: float):
    """``v**(-1/(p-1)) * |g|**(p/(p-1))``, taken as 0 where the cutoff vanishes."""
    q = p / (p - 1.0)
    v = np.asarray(v, dtype=float)
    pos = v > 0.0
    vs = np.where(pos, v, 1.0)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.where(pos, vs ** (-1.0 / (p - 1.0)) * np.abs(g) ** q, 0.0)
    return out


def _quad(f: Callable, a: float, b: float, points=None, rel: float = 1e-9) -> float:
    def g(x):
        return float(f(np.asarray(x)))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        kw = {}
        inner = [x for x in (points or ()) if a < x < b]
        if inner:
            kw["points"] = inner
        val, _ = integrate.quad(g, a, b, epsabs=0.0, epsrel=rel, limit=400, **kw)
    return val


_LOG_GL_X, _LOG_GL_W = np.polynomial.legendre.leggauss(24)


def _check_edge(f: Callable, edge: float, scale: float, direction: int = -1, what: str = "") -> None:
    """Flag non-integrable behaviour of ``f`` approaching ``edge``.

    Integrates over the shells at distance ``scale * [1e-3(k+1), 1e-3k]``
    from ``edge`` (Gauss-Legendre in the log of the distance). For an
    integrable power singularity the shell integrals shrink geometrically;
    for a non-integrable one they stay level or grow.
    """
    shells = []
    for k in range(3):
        lo, hi = -3.0 * (k + 1) * math.log(10.0), -3.0 * k * math.log(10.0)
        y = 0.5 * (hi - lo) * _LOG_GL_X + 0.5 * (hi + lo)
        d = np.exp(y)
        vals = np.asarray(f(edge + direction * scale * d), dtype=float)
        shells.append(abs(0.5 * (hi - lo) * float(np.sum(_LOG_GL_W * vals * d)) * scale))
    if shells[-1] > 0.0 and shells[-2] > 0.0 and shells[-1] >= 0.9 * shells[-2]:
        raise DivergentIntegralError(
            f"{what} integrand is not integrable at the cutoff edge "
            f"(shell integrals {shells[-2]:.3e} -> {shells[-1]:.3e}); "
            "increase the cutoff power"
        )


# -- subcritical construction: phi = psi(t) xi(x) ---------------------------


def i_time_factor(T: float, p: float, gamma: float, which: int, m: int | None = None,
                  check: bool = True) -> float:
    """Time integral of I_which with ``I^gamma_{T-} psi`` in closed form."""
    if which not in (1, 2, 3):
        raise ValueError("which must be 1, 2 or 3")
    m = m_from_p(p) if m is None else m
    psi = TimeCutoff(T, m)
    q = p / (p - 1.0)

    def f(t):
        t = np.asarray(t, dtype=float)
        tt = np.minimum(t, T * (1.0 - 1e-16))
        ipsi = np.where(t < T, rl_right_poly_closed_form(m, gamma, T, tt), 0.0)
        v, d1, _ = psi.derivs(np.clip(t, 0.0, T))
        g = d1 if which in (1, 2) else v
        pos = ipsi > 0
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out = np.where(pos, np.where(pos, ipsi, 1.0) ** (-1.0 / (p - 1.0)) * np.abs(g) ** q, 0.0)
        return out

    if check:
        _check_edge(f, T, T, -1, what=f"I{which} time")
    return _quad(f, 0.0, T)


def _space_integrand(cutoff, ndim: int, p: float, kind: str) -> Callable:
    area = sphere_area(ndim)

    def f(r):
        r = np.asarray(r, dtype=float)
        v, _, _ = cutoff.derivs(r)
        if kind == "value":
            return area * v * r ** (ndim - 1)
        lap = cutoff.laplacian(r, ndim)
        return area * _weighted(v, lap, p) * r ** (ndim - 1)

    return f


def i_space_factor(R: float, p: float, ndim: int, which: int, ell: float | None = None,
                   check: bool = True) -> float:
    """Radial space integral of I_which for ``xi = Phi(|x|^2/R^2)``."""
    if which not in (1, 2, 3):
        raise ValueError("which must be 1, 2 or 3")
    xi = SpaceCutoff.for_exponent(R, p) if ell is None else SpaceCutoff(R, ell)
    edge = xi.support
    if which == 1:
        # xi^{-1/(p-1)} xi^{p/(p-1)} = xi
        f = _space_integrand(xi, ndim, p, "value")
        return sphere_area(ndim) * R**ndim / ndim + _quad(f, R, edge)
    f = _space_integrand(xi, ndim, p, "laplacian")
    if check:
        _check_edge(f, edge, R, -1, what=f"I{which} space")
    return _quad(f, R, edge)


def compute_I(T: float, R: float, p: float, gamma: float, which: int, ndim: int = 3,
              m: int | None = None, ell: float | None = None) -> float:
    """``I_which`` for ``phi = psi(t) xi(x)`` over ``(0, T) x R^ndim``."""
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    return i_time_factor(T, p, gamma, which, m) * i_space_factor(R, p, ndim, which, ell)


# -- critical construction: phi = eta(t) phi_log(x) -------------------------


def _check_critical(p: float | None, ndim: int) -> float:
    if ndim < 3:
        raise ValueError("the critical construction needs ndim >= 3")
    pc = p_critical(ndim)
    if p is None:
        return pc
    if abs(p - pc) > 1e-12 * pc:
        raise ValueError(f"critical integrals require p = N/(N-2) = {pc}, got {p}")
    return p


def j_time_factor(T: float, p: float, which: int) -> float:
    """Time integral of J_which for ``eta(t) = nu(t/T)``."""
    if which not in (1, 2, 3):
        raise ValueError("which must be 1, 2 or 3")
    eta = Bump(T)

    def f(t):
        v, d1, _ = eta.derivs(t)
        if which == 3:
            return v
        return _weighted(v, d1, p)

    return _quad(f, 0.0, T, points=[0.5 * T])


def j_space_factor(R: float, p: float | None, ndim: int, which: int,
                   cutoff: LogCutoff | None = None, check: bool = True) -> float:
    """Radial space integral of J_which, computed in ``s = ln(r/sqrt R)/ln sqrt R``."""
    if which not in (1, 2, 3):
        raise ValueError("which must be 1, 2 or 3")
    p = _check_critical(p, ndim)
    phi = cutoff if cutoff is not None else LogCutoff(R, default_kappa(p))
    if phi.R != R:
        raise ValueError("cutoff radius does not match R")
    L = phi.half_log
    area = sphere_area(ndim)

    if check:
        # a profile that does not reach 0 continuously puts a singular measure in
        # the Laplacian, so no finite integrand exists
        edge_vals = phi.F(np.array([1.0 - 1e-6, 1.0 - 1e-9]))[0]
        if np.max(np.abs(edge_vals)) > 1e-6:
            raise DivergentIntegralError(
                "log cutoff has a jump at |x| = R; its Laplacian is a singular measure"
            )

    if which == 1:
        inner = area * math.sqrt(R) ** ndim / ndim

        def f1(s):
            v, _, _ = phi.F(s)
            return area * v * np.exp(ndim * L * (1.0 + s)) * L

        return inner + _quad(f1, 0.0, 1.0)

    q = p / (p - 1.0)

    def f(s):
        s = np.asarray(s, dtype=float)
        v, d1, d2 = phi.F(s)
        # r^2 * Laplacian; the remaining powers of r combine to r^(N - 2q) = 1 at p = p_c
        lap_r2 = d2 / L**2 + (ndim - 2) * d1 / L
        return area * _weighted(v, lap_r2, p) * np.exp((ndim - 2.0 * q) * L * (1.0 + s)) * L

    if check:
        _check_edge(f, 1.0, 1.0, -1, what=f"J{which} space")
    return _quad(f, 0.0, 1.0)


def compute_J(T: float, R: float, p: float | None, ndim: int, which: int,
              cutoff: LogCutoff | None = None) -> float:
    """``J_which`` for ``phi = eta(t) phi_log(x)`` at the critical exponent."""
    if not R > math.e:
        raise ValueError("R must exceed e")
    p = _check_critical(p, ndim)
    return j_time_factor(T, p, which) * j_space_factor(R, p, ndim, which, cutoff)


# -- scaling regression ------------------------------------------------------


@dataclass
class ScalingReport:
    quantity: str
    sweep_var: str
    x: list
    values: list
    fitted_slope: float
    theory_slope: float | None = None
    prefactor: float = float("nan")
    residual: float = 0.0
    log_x: bool = True
    meta: dict = field(default_factory=dict)

    @property
    def abs_err(self) -> float | None:
        if self.theory_slope is None:
            return None
        return abs(self.fitted_slope - self.theory_slope)

    def passes(self, tol: float) -> bool:
        return self.abs_err is not None and self.abs_err <= tol

    def to_dict(self) -> dict:
        d = asdict(self)
        d["abs_err"] = self.abs_err
        return d

    def rows(self):
        for x, v in zip(self.x, self.values):
            yield {
                "quantity": self.quantity,
                "sweep_var": self.sweep_var,
                "x": repr(float(x)),
                "value": repr(float(v)),
                "fitted_slope": repr(float(self.fitted_slope)),
                "theory_slope": "" if self.theory_slope is None else repr(float(self.theory_slope)),
                "abs_err": "" if self.abs_err is None else repr(float(self.abs_err)),
            }


def fit_scaling_exponent(x: Sequence[float], values: Sequence[float], theory: float | None = None,
                         quantity: str = "", sweep_var: str = "x") -> ScalingReport:
    """Least-squares slope of ``log(value)`` against ``log(x)``."""
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    if x.size < 3 or values.size != x.size:
        raise ValueError("need at least 3 samples")
    if np.any(values <= 0) or np.any(x <= 0):
        raise ValueError("values and abscissae must be positive")
    lx, ly = np.log(x), np.log(values)
    slope, icpt = np.polyfit(lx, ly, 1)
    resid = float(np.max(np.abs(ly - (slope * lx + icpt))))
    return ScalingReport(
        quantity=quantity,
        sweep_var=sweep_var,
        x=x.tolist(),
        values=values.tolist(),
        fitted_slope=float(slope),
        theory_slope=theory,
        prefactor=float(math.exp(icpt)),
        residual=resid,
    )


REPORT_COLUMNS = ["quantity", "sweep_var", "x", "value", "fitted_slope", "theory_slope", "abs_err"]


def write_reports_json(reports: Sequence[ScalingReport], path, header: dict | None = None) -> None:
    payload = {}
    if header is not None:
        payload["_header"] = header
    payload["reports"] = [r.to_dict() for r in reports]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)


def write_reports_csv(reports: Sequence[ScalingReport], path, header_lines: Sequence[str] = ()) -> None:
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
        w.writeheader()
        for r in reports:
            w.writerows(r.rows())


# -- positivity of the forcing against cutoffs -------------------------------


def _radial_integral(f: Callable, ndim: int, r_max: float, points=()) -> float:
    area = sphere_area(ndim)
    return _quad(lambda r: area * f(r) * np.asarray(r) ** (ndim - 1), 0.0, r_max, points=list(points))


def omega_positivity_radius(omega: Callable, ndim: int, R0: float = 1.0, R_max: float = 1024.0,
                            family: Callable[[float], SpaceCutoff] | None = None) -> float | None:
    """Smallest radius of a doubling schedule from which ``int omega xi_R dx`` stays positive.

    The schedule is ``R0, 2 R0, ...`` up to ``R_max``; the returned radius
    is the first one after which every tested cutoff pairs positively with
    ``omega``. When ``int omega dx > 0`` the pairing converges to that
    positive value, so such a radius exists once the schedule is long enough.
    """
    family = family or (lambda R: SpaceCutoff(R, 4.0))
    # tail convergence of int |omega|: doubling the truncation must stop adding mass
    r_end = math.sqrt(2.0) * R_max
    masses = [_radial_integral(lambda r: np.abs(omega(r)), ndim, r_end * c) for c in (1.0, 2.0, 4.0)]
    inc1, inc2 = masses[1] - masses[0], masses[2] - masses[1]
    scale = max(masses[2], 1e-300)
    if inc2 > 1e-8 * scale and inc2 >= 0.5 * inc1:
        raise DivergentIntegralError("omega is not integrable: tail mass does not converge")

    radii = []
    R = R0
    while R <= R_max * (1 + 1e-12):
        radii.append(R)
        R *= 2.0
    pairing = []
    for R in radii:
        xi = family(R)
        val = _radial_integral(lambda r: omega(r) * xi(r), ndim, xi.support, points=[R])
        pairing.append(val)
    best = None
    for R, val in zip(reversed(radii), reversed(pairing)):
        if val > 0:
            best = R
        else:
            break
    return best


# -- weak formulation residual ----------------------------------------------


def _trapz_weights(x: np.ndarray) -> np.ndarray:
    w = np.zeros_like(x)
    h = np.diff(x)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def weak_residual(trajectory, test: str | tuple = "subcritical", T: float | None = None,
                  R: float | None = None) -> float:
    """``|LHS - RHS|`` of the weak formulation for a stored trajectory.

    ``test`` is ``"subcritical"`` (``psi(t) xi(x)``), ``"critical"``
    (``eta(t) phi_log(x)``) or an explicit ``(time_cutoff, space_cutoff)``
    pair. Space integrals use trapezoid weights ``|S^{N-1}| r^{N-1}`` on
    the solver grid, time integrals trapezoid weights on the stored times.
    """
    spec, grid = trajectory.spec, trajectory.grid
    times = np.asarray(trajectory.profile_times, dtype=float)
    U = np.asarray(trajectory.profiles, dtype=float)
    if times.size < 2:
        raise ValueError("trajectory stores fewer than two profiles")
    t_end = times[-1]
    if T is None:
        T = t_end
    if T > t_end * (1 + 1e-12):
        raise ValueError(f"trajectory ends at t={t_end} before the test horizon T={T}")
    ndim, r = grid.ndim, grid.r

    if isinstance(test, tuple):
        tc, sc = test
    elif test == "subcritical":
        R = grid.r_max / 2.0 if R is None else R
        tc = TimeCutoff(T, m_from_p(spec.p))
        sc = SpaceCutoff.for_exponent(R, spec.p)
    elif test == "critical":
        R = grid.r_max if R is None else R
        tc = Bump(T)
        sc = LogCutoff(R, default_kappa(spec.p))
    else:
        raise ValueError(f"unknown test function {test!r}")
    if sc.support > grid.r_max * (1 + 1e-12):
        raise ValueError("test function support exceeds the computational domain")

    keep = times <= T * (1 + 1e-12)
    tt, UU = times[keep], U[keep]
    if tt[-1] < T * (1 - 1e-12):
        raise ValueError("stored profiles do not reach T")
    wt = _trapz_weights(tt)
    wx = sphere_area(ndim) * grid.volume_weights_trapz()

    xv = sc(r)
    xlap = sc.laplacian(r, ndim)
    tv, td, _ = tc.derivs(tt)

    # right-sided fractional integral of the time cutoff at each stored time
    fs = FractionalSpec(spec.gamma)
    if fs.is_identity:
        itv = tv
    elif isinstance(tc, TimeCutoff):
        itv = np.array([rl_right_poly_closed_form(tc.m, spec.gamma, tc.T, t) if t < tc.T else 0.0
                        for t in tt])
    else:
        itv = np.array([right_rl_integral(lambda s: float(tc(s)), t, tc.T, fs) if t < tc.T else 0.0
                        for t in tt])

    omega = spec.omega(r)
    u0 = UU[0]
    k = spec.k
    source = np.abs(UU) ** spec.p if spec.nonlinear else np.zeros_like(UU)

    space = lambda field: field @ wx  # noqa: E731
    lhs = (
        wt @ (itv * space(source * xv))
        + (wt @ tv) * space(omega * xv)
        + tv[0] * space(u0 * (xv - k * xlap))
    )
    rhs = (
        -(wt @ (td * space(UU * xv)))
        + k * (wt @ (td * space(UU * xlap)))
        - (wt @ (tv * space(UU * xlap)))
    )
    return float(abs(lhs - rhs))
