"""Radially symmetric time marching for the forced pseudo-parabolic problem.

    u_t - k Lap u_t - Lap u = I^gamma(|u|^p) + omega(r)

The Sobolev operator and the diffusion are implicit, the memory term is
explicit:

    (I - (k + dt) L) u^{n+1} = (I - k L) u^n + dt (M^n + omega)

with ``L`` a finite-volume radial Laplacian (so the Neumann problem
conserves mass exactly up to the source) and ``M^n`` the product-trapezoid
value of ``I^gamma(|u|^p)`` at ``t_n`` built from the stored history.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.linalg import solve_banded

from .blowup import BlowupReport, analyze
from .fracint import MemoryConvolution

__all__ = [
    "RadialGrid",
    "RadialProfile",
    "ProblemSpec",
    "RunControl",
    "SolverState",
    "Trajectory",
    "laplacian_radial",
    "laplacian_bands",
    "initial_state",
    "step",
    "run",
    "TRAJECTORY_COLUMNS",
]

BOUNDARY_CONDITIONS = ("neumann", "dirichlet")


@dataclass(frozen=True)
class RadialGrid:
    ndim: int
    r_max: float
    n_r: int
    bc: str = "neumann"

    def __post_init__(self):
        if self.ndim < 1:
            raise ValueError("ndim must be at least 1")
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")
        if self.n_r < 16:
            raise ValueError("n_r must be at least 16")
        if self.bc not in BOUNDARY_CONDITIONS:
            raise ValueError(f"bc must be one of {BOUNDARY_CONDITIONS}")

    @property
    def dr(self) -> float:
        return self.r_max / (self.n_r - 1)

    @property
    def r(self) -> np.ndarray:
        return np.linspace(0.0, self.r_max, self.n_r)

    def faces(self) -> np.ndarray:
        """Face radii ``r_{i+1/2}`` for i = 0..n_r-2."""
        return (np.arange(self.n_r - 1) + 0.5) * self.dr

    def cell_volumes(self) -> np.ndarray:
        """Finite-volume cell measures including the unit-sphere area."""
        edges = np.concatenate([[0.0], self.faces(), [self.r_max]])
        return _sphere(self.ndim) * np.diff(edges**self.ndim) / self.ndim

    def volume_weights_trapz(self) -> np.ndarray:
        """Trapezoid weights for ``int f r^{N-1} dr`` (no sphere area)."""
        w = np.full(self.n_r, self.dr) * self.r ** (self.ndim - 1)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


def laplacian_bands(grid: RadialGrid):
    """Tridiagonal bands ``(lower, diag, upper)`` of the finite-volume radial Laplacian.

    Row 0 reduces to the symmetric limit ``2N (u_1 - u_0) / dr^2``. The last
    row is the Neumann half-cell; for Dirichlet it is zeroed (the node is
    held at 0 by the solver).
    """
    n, dr, N = grid.n_r, grid.dr, grid.ndim
    area = grid.faces() ** (N - 1)
    vol = grid.cell_volumes() / _sphere(N)
    flux = area / dr
    diag = np.zeros(n)
    lower = np.zeros(n)  # lower[i] couples row i to i-1
    upper = np.zeros(n)  # upper[i] couples row i to i+1
    diag[:-1] -= flux
    upper[:-1] += flux
    diag[1:] -= flux
    lower[1:] += flux
    diag /= vol
    lower /= vol
    upper /= vol
    if grid.bc == "dirichlet":
        diag[-1] = lower[-1] = 0.0
    return lower, diag, upper


def _sphere(N: int) -> float:
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


def laplacian_radial(u, grid: RadialGrid) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    lower, diag, upper = laplacian_bands(grid)
    out = diag * u
    out[1:] += lower[1:] * u[:-1]
    out[:-1] += upper[:-1] * u[1:]
    return out


@dataclass(frozen=True)
class RadialProfile:
    """Closed-form radial profile usable in configs.

    kinds: ``zero``; ``constant`` (amp); ``gaussian``
    ``amp * (1 - coef r^2) * exp(-r^2 / width^2)``; ``sinc``
    ``amp * sin(pi r / width) / (pi r / width)``.
    """

    kind: str = "zero"
    amp: float = 0.0
    width: float = 1.0
    coef: float = 0.0

    KINDS = ("zero", "constant", "gaussian", "sinc")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"profile kind must be one of {self.KINDS}, got {self.kind!r}")
        if self.kind in ("gaussian", "sinc") and not self.width > 0:
            raise ValueError("profile width must be positive")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(r)
        if self.kind == "constant":
            return np.full_like(r, self.amp)
        if self.kind == "gaussian":
            return self.amp * (1.0 - self.coef * r**2) * np.exp(-((r / self.width) ** 2))
        return self.amp * np.sinc(r / self.width)


@dataclass(frozen=True)
class ProblemSpec:
    k: float = 1.0
    p: float = 2.0
    gamma: float = 0.0
    omega: Callable = field(default_factory=RadialProfile)
    u0: Callable = field(default_factory=RadialProfile)
    nonlinear: bool = True

    def __post_init__(self):
        if not self.k >= 0:
            raise ValueError("k must be nonnegative")
        if not self.p > 1:
            raise ValueError("p must exceed 1")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")


@dataclass(frozen=True)
class RunControl:
    dt0: float = 1e-2
    horizon: float = 1.0
    threshold: float = 1e8
    adaptive: bool = True
    growth_limit: float = 1.1
    # growth ratios are measured against max(sup_norm, adapt_floor)
    adapt_floor: float = 1.0
    dt_min: float = 1e-12
    record_every: int = 1
    store_profiles: bool = False
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not self.dt0 > 0:
            raise ValueError("dt0 must be positive")
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if not self.growth_limit > 1:
            raise ValueError("growth_limit must exceed 1")
        if self.record_every < 1:
            raise ValueError("record_every must be at least 1")


@dataclass
class SolverState:
    t: float
    u: np.ndarray
    history: MemoryConvolution
    dt: float
    step_count: int = 0
    diverged: bool = False


def initial_state(spec: ProblemSpec, grid: RadialGrid, dt: float) -> SolverState:
    u = np.asarray(spec.u0(grid.r), dtype=float).copy()
    if grid.bc == "dirichlet":
        u[-1] = 0.0
    hist = MemoryConvolution(spec.gamma, grid.n_r)
    hist.append(0.0, _source(u, spec))
    return SolverState(t=0.0, u=u, history=hist, dt=dt)


def _source(u, spec: ProblemSpec):
    if not spec.nonlinear:
        return np.zeros_like(u)
    return np.abs(u) ** spec.p


class _Stepper:
    """Caches the banded operator for a given ``(k, dt)``."""

    def __init__(self, spec: ProblemSpec, grid: RadialGrid):
        self.spec, self.grid = spec, grid
        self.bands = laplacian_bands(grid)
        self.omega = np.asarray(spec.omega(grid.r), dtype=float)
        self._dt = None
        self._ab = None

    def matrix(self, dt: float):
        if dt != self._dt:
            lower, diag, upper = self.bands
            c = self.spec.k + dt
            ab = np.zeros((3, self.grid.n_r))
            ab[0, 1:] = -c * upper[:-1]
            ab[1] = 1.0 - c * diag
            ab[2, :-1] = -c * lower[1:]
            self._dt, self._ab = dt, ab
        return self._ab

    def apply_A(self, u):
        lower, diag, upper = self.bands
        Lu = diag * u
        Lu[1:] += lower[1:] * u[:-1]
        Lu[:-1] += upper[:-1] * u[1:]
        return u - self.spec.k * Lu

    def advance(self, state: SolverState, dt: float):
        """Return ``(u_new, memory_term)`` without touching ``state``."""
        mem = state.history.evaluate()
        with np.errstate(all="ignore"):
            rhs = self.apply_A(state.u) + dt * (mem + self.omega)
            if self.grid.bc == "dirichlet":
                rhs[-1] = 0.0
            try:
                u_new = solve_banded((1, 1), self.matrix(dt), rhs, check_finite=False)
            except (np.linalg.LinAlgError, ValueError):
                u_new = np.full_like(rhs, np.nan)
        return u_new, mem


def step(state: SolverState, spec: ProblemSpec, grid: RadialGrid, dt: float | None = None,
         _stepper: _Stepper | None = None) -> SolverState:
    """Advance one IMEX step; appends ``|u^{n+1}|^p`` to the shared history."""
    if state.diverged:
        raise ValueError("cannot step a diverged state")
    dt = state.dt if dt is None else dt
    stepper = _stepper or _Stepper(spec, grid)
    u_new, _ = stepper.advance(state, dt)
    if not np.all(np.isfinite(u_new)):
        return replace(state, diverged=True)
    state.history.append(state.t + dt, _source(u_new, spec))
    return SolverState(t=state.t + dt, u=u_new, history=state.history, dt=dt,
                       step_count=state.step_count + 1)


TRAJECTORY_COLUMNS = ["t", "dt", "sup_norm", "l2_norm", "mass", "boundary_value"]


@dataclass
class Trajectory:
    spec: ProblemSpec
    grid: RadialGrid
    control: RunControl
    t: list = field(default_factory=list)
    dt: list = field(default_factory=list)
    sup_norm: list = field(default_factory=list)
    l2_norm: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    boundary_value: list = field(default_factory=list)
    # int (M + omega) dV at each recorded time
    source_mass: list = field(default_factory=list)
    profile_times: list = field(default_factory=list)
    profiles: list = field(default_factory=list)
    steps: int = 0
    rejected: int = 0
    diverged: bool = False
    final_u: np.ndarray | None = None
    report: BlowupReport | None = None

    def series(self):
        return list(zip(self.t, self.sup_norm))

    def rows(self):
        for vals in zip(self.t, self.dt, self.sup_norm, self.l2_norm, self.mass, self.boundary_value):
            yield [repr(float(v)) for v in vals]

    def write_csv(self, path, header_lines=()) -> None:
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(TRAJECTORY_COLUMNS)
            w.writerows(self.rows())


def _record(traj: Trajectory, t: float, dt: float, u: np.ndarray, vol: np.ndarray) -> None:
    traj.t.append(t)
    traj.dt.append(dt)
    traj.sup_norm.append(float(np.max(np.abs(u))))
    traj.l2_norm.append(float(math.sqrt(vol @ (u * u))))
    traj.mass.append(float(vol @ u))
    traj.boundary_value.append(float(abs(u[-1])))


def run(spec: ProblemSpec, grid: RadialGrid, control: RunControl = RunControl()) -> Trajectory:
    """March to the horizon, the sup-norm threshold, or divergence.

    A step whose sup-norm grows by more than ``growth_limit`` (relative to
    ``max(sup_norm, adapt_floor)``) is redone with half the step; below
    ``dt_min`` the run stops and is reported as diverged.
    """
    traj = Trajectory(spec=spec, grid=grid, control=control)
    vol = grid.cell_volumes()
    stepper = _Stepper(spec, grid)
    state = initial_state(spec, grid, control.dt0)
    _record(traj, 0.0, 0.0, state.u, vol)
    traj.source_mass.append(float(vol @ (state.history.evaluate() + stepper.omega)))
    if control.store_profiles:
        traj.profile_times.append(0.0)
        traj.profiles.append(state.u.copy())
    dt = control.dt0
    horizon = control.horizon
    sup = traj.sup_norm[-1]

    while state.t < horizon * (1 - 1e-12) and state.step_count < control.max_steps:
        if sup >= control.threshold:
            break
        h = min(dt, horizon - state.t)
        u_new, _ = stepper.advance(state, h)
        ok = bool(np.all(np.isfinite(u_new)))
        new_sup = float(np.max(np.abs(u_new))) if ok else math.inf
        too_fast = control.adaptive and new_sup > control.growth_limit * max(sup, control.adapt_floor)
        if not ok or too_fast:
            if not control.adaptive or dt / 2.0 < control.dt_min:
                traj.diverged = True
                break
            dt /= 2.0
            traj.rejected += 1
            continue
        state.history.append(state.t + h, _source(u_new, spec))
        state = SolverState(t=state.t + h, u=u_new, history=state.history, dt=h,
                            step_count=state.step_count + 1)
        sup = new_sup
        if state.step_count % control.record_every == 0 or sup >= control.threshold \
                or state.t >= horizon * (1 - 1e-12):
            _record(traj, state.t, h, u_new, vol)
            traj.source_mass.append(float(vol @ (state.history.evaluate() + stepper.omega)))
            if control.store_profiles:
                traj.profile_times.append(state.t)
                traj.profiles.append(u_new.copy())

    traj.steps = state.step_count
    traj.final_u = state.u
    traj.report = analyze(traj.series(), spec.p, control.threshold, horizon, traj.diverged)
    return traj
