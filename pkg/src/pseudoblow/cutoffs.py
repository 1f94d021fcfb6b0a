"""Cutoff families used as test functions.

Every family exposes ``derivs(x) -> (value, first, second)`` in its own
variable (time for the temporal cutoffs, radius for the spatial ones); the
spatial families also provide ``laplacian(r, ndim)`` for radial profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def smoothstep(w):
    """Quintic smoothstep ``6w^5 - 15w^4 + 10w^3`` clamped to [0, 1], with derivatives."""
    w = np.asarray(w, dtype=float)
    inside = (w > 0.0) & (w < 1.0)
    wc = np.where(inside, w, 0.0)
    s = np.where(w >= 1.0, 1.0, wc**3 * (10.0 - 15.0 * wc + 6.0 * wc**2))
    ds = np.where(inside, 30.0 * wc**2 * (1.0 - wc) ** 2, 0.0)
    d2s = np.where(inside, 60.0 * wc * (1.0 - wc) * (1.0 - 2.0 * wc), 0.0)
    return s, ds, d2s


def _power_chain(s, ds, d2s, ell: float):
    """Value and derivatives of ``s**ell`` by the chain rule (0 where s == 0)."""
    pos = s > 0.0
    sp = np.where(pos, s, 1.0)
    v = np.where(pos, sp**ell, 0.0)
    d1 = np.where(pos, ell * sp ** (ell - 1.0) * ds, 0.0)
    d2 = np.where(
        pos, ell * (ell - 1.0) * sp ** (ell - 2.0) * ds**2 + ell * sp ** (ell - 1.0) * d2s, 0.0
    )
    return v, d1, d2


def radial_laplacian(d1, d2, r, ndim: int):
    """``f'' + (ndim - 1)/r f'`` with the symmetric limit ``ndim f''`` at r = 0."""
    r = np.asarray(r, dtype=float)
    safe = np.where(r > 0.0, r, 1.0)
    return np.where(r > 0.0, d2 + (ndim - 1) * d1 / safe, ndim * d2)


@dataclass(frozen=True)
class TimeCutoff:
    """``psi(t) = (1 - t/T)**m`` on [0, T]."""

    T: float
    m: int

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("T must be positive")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be a positive integer")

    def derivs(self, t):
        t = np.asarray(t, dtype=float)
        if np.any((t < 0) | (t > self.T)):
            raise ValueError("t outside [0, T]")
        x = 1.0 - t / self.T
        m, T = self.m, self.T
        v = x**m
        d1 = -m / T * x ** (m - 1)
        d2 = m * (m - 1) / T**2 * x ** (m - 2) if m >= 2 else np.zeros_like(x)
        return v, d1, d2

    def __call__(self, t):
        return self.derivs(t)[0]

    def integral(self) -> float:
        return self.T / (self.m + 1)


@dataclass(frozen=True)
class SpaceCutoff:
    """``xi(x) = Phi(|x|^2 / R^2)`` with ``Phi(z) = S(2 - z)**ell``.

    ``Phi`` equals 1 on [0, 1], vanishes on [2, inf) and is C^2; the power
    ``ell`` controls how fast ``xi`` vanishes at ``|x| = sqrt(2) R``.
    """

    R: float
    ell: float

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("R must be positive")
        if not self.ell > 0:
            raise ValueError("ell must be positive")

    @classmethod
    def for_exponent(cls, R: float, p: float) -> "SpaceCutoff":
        return cls(R, float(math.ceil(2.0 * p / (p - 1.0))))

    @property
    def support(self) -> float:
        return math.sqrt(2.0) * self.R

    def phi(self, z):
        s, ds, d2s = smoothstep(2.0 - np.asarray(z, dtype=float))
        # d/dz flips the sign of the first derivative
        return _power_chain(s, -ds, d2s, self.ell)

    def derivs(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("radius must be nonnegative")
        z = (r / self.R) ** 2
        v, f1, f2 = self.phi(z)
        dz = 2.0 * r / self.R**2
        return v, f1 * dz, f2 * dz**2 + f1 * 2.0 / self.R**2

    def __call__(self, r):
        return self.derivs(r)[0]

    def laplacian(self, r, ndim: int):
        _, d1, d2 = self.derivs(r)
        return radial_laplacian(d1, d2, r, ndim)


def default_kappa(p: float) -> float:
    return float(max(2, math.ceil((p + 1.0) / (p - 1.0)) + 1))


@dataclass(frozen=True)
class LogCutoff:
    """``phi(x) = F(ln(|x|/sqrt(R)) / ln(sqrt(R)))`` with ``F(s) = (1 - S(s))**kappa``.

    ``phi`` equals 1 for ``|x| <= sqrt(R)`` and 0 for ``|x| >= R``.
    A custom profile ``F`` may be supplied as a callable returning
    ``(F, F', F'')`` on arrays of ``s``.
    """

    R: float
    kappa: float = 3.0
    profile: object = None

    def __post_init__(self):
        if not self.R > 1.0:
            raise ValueError("R must exceed 1")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")

    @property
    def half_log(self) -> float:
        return 0.5 * math.log(self.R)

    @property
    def support(self) -> float:
        return self.R

    def F(self, s):
        s = np.asarray(s, dtype=float)
        if self.profile is not None:
            return self.profile(s)
        # 1 - S(s) = S(1 - s) keeps full relative precision near s = 1
        a, da, d2a = smoothstep(1.0 - s)
        return _power_chain(a, -da, d2a, self.kappa)

    def s_of_r(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(r) / self.half_log - 1.0

    def derivs(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("radius must be nonnegative")
        L = self.half_log
        s = self.s_of_r(r)
        v, f1, f2 = self.F(s)
        safe = np.where(r > 0, r, 1.0)
        d1 = np.where(r > 0, f1 / (safe * L), 0.0)
        d2 = np.where(r > 0, f2 / (safe * L) ** 2 - f1 / (safe**2 * L), 0.0)
        return v, d1, d2

    def __call__(self, r):
        return self.derivs(r)[0]

    def laplacian(self, r, ndim: int):
        """Chain-rule Laplacian ``F''/(r L)^2 + (N - 2) F'/(r^2 L)``, ``L = ln sqrt(R)``."""
        r = np.asarray(r, dtype=float)
        L = self.half_log
        _, f1, f2 = self.F(self.s_of_r(r))
        safe = np.where(r > 0, r, 1.0)
        return np.where(r > 0, (f2 / L**2 + (ndim - 2) * f1 / L) / safe**2, 0.0)


def nu(s):
    """``exp(-1/(s(1-s)))`` on (0, 1), zero elsewhere, with two derivatives."""
    s = np.asarray(s, dtype=float)
    inside = (s > 0.0) & (s < 1.0)
    sc = np.where(inside, s, 0.5)
    g = sc * (1.0 - sc)
    v = np.where(inside, np.exp(-1.0 / g), 0.0)
    dg = 1.0 - 2.0 * sc
    # (log nu)' = g'/g^2, (log nu)'' = -2/g^2 ... assembled below
    lp = dg / g**2
    lpp = (-2.0 * g**2 - 2.0 * g * dg**2) / g**4
    d1 = v * lp
    d2 = v * (lp**2 + lpp)
    return v, np.where(inside, d1, 0.0), np.where(inside, d2, 0.0)


@dataclass(frozen=True)
class Bump:
    """``eta(t) = nu(t / T)``; vanishes at both t = 0 and t = T."""

    T: float

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("T must be positive")

    def derivs(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("t must be nonnegative")
        v, d1, d2 = nu(t / self.T)
        return v, d1 / self.T, d2 / self.T**2

    def __call__(self, t):
        return self.derivs(t)[0]


def derivative_bound_constants(cutoff: LogCutoff, s_max: float = 1.0 - 1e-3, n: int = 4001):
    """Sampled ``max |F''|/F`` and ``max |F'|/F`` over ``s in (0, s_max]``.

    Both ratios stay finite on any sample bounded away from s = 1 but grow
    without bound as ``s_max -> 1``, since F vanishes there.
    """
    s = np.linspace(0.0, s_max, n)[1:]
    v, d1, d2 = cutoff.F(s)
    if np.any(v <= 0):
        raise ValueError("profile vanishes inside the sample; ratios undefined")
    return float(np.max(np.abs(d2) / v)), float(np.max(np.abs(d1) / v))
