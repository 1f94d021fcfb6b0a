"""Riemann-Liouville fractional integrals.

Left integrals of sampled data use product integration: the data are
interpolated piecewise-linearly and the weakly singular kernel
``(t - s)**(gamma - 1) / Gamma(gamma)`` is integrated exactly against each
linear piece. ``gamma == 0`` is treated as the identity operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

__all__ = [
    "FractionalSpec",
    "QuadratureWeights",
    "MemoryConvolution",
    "interval_moments",
    "nonuniform_weights",
    "left_rl_integral",
    "left_rl_integral_all",
    "right_rl_integral",
    "rl_right_poly_closed_form",
]

# Gauss-Legendre nodes on [0, 1] for intervals well separated from the kernel
# singularity (distance >= 2 interval lengths gives error below 1e-18).
_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W
_FAR = 2.0


@dataclass(frozen=True)
class FractionalSpec:
    """Order of the fractional integral; ``gamma == 0`` means identity."""

    gamma: float

    def __post_init__(self):
        if not (0.0 <= self.gamma < 1.0) or not math.isfinite(self.gamma):
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma!r}")

    @property
    def is_identity(self) -> bool:
        return self.gamma == 0.0


def _check_gamma_open(gamma: float) -> None:
    if not (0.0 < gamma < 1.0):
        raise ValueError(f"gamma must lie in (0, 1), got {gamma!r}")


def interval_moments(a, b, gamma: float):
    """Kernel moments over ``tau in [a, b]`` (``tau = t - s``).

    Returns ``(M0, M1)`` with ``M0 = int tau**(gamma-1)`` and
    ``M1 = int tau**(gamma-1) * (tau - a)``. Intervals far from the
    singularity are integrated with Gauss-Legendre to avoid the cancellation
    of the closed form; nearby intervals use the closed form.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    h = b - a
    m0 = np.empty(np.broadcast(a, b).shape)
    m1 = np.empty_like(m0)
    far = a >= _FAR * h

    if np.any(far):
        af, hf = np.broadcast_to(a, m0.shape)[far], np.broadcast_to(h, m0.shape)[far]
        u = hf[:, None] * _GL_X[None, :]
        ker = (af[:, None] + u) ** (gamma - 1.0)
        m0[far] = hf * (ker @ _GL_W)
        m1[far] = hf * ((ker * u) @ _GL_W)

    near = ~far
    if np.any(near):
        an, bn = np.broadcast_to(a, m0.shape)[near], np.broadcast_to(b, m0.shape)[near]
        m0n = (bn**gamma - an**gamma) / gamma
        m0[near] = m0n
        m1[near] = (bn ** (gamma + 1.0) - an ** (gamma + 1.0)) / (gamma + 1.0) - an * m0n
    return m0, m1


def nonuniform_weights(times, gamma: float) -> np.ndarray:
    """Product-trapezoid weights for ``(I^gamma f)(times[-1])`` on any increasing mesh."""
    _check_gamma_open(gamma)
    times = np.asarray(times, dtype=float)
    n = times.size - 1
    w = np.zeros(n + 1)
    if n == 0:
        return w
    h = np.diff(times)
    if np.any(h <= 0):
        raise ValueError("times must be strictly increasing")
    t = times[-1]
    a = t - times[1:]
    b = t - times[:-1]
    a[-1] = 0.0
    m0, m1 = interval_moments(a, b, gamma)
    # interval i carries nodes i (weight M1/h) and i+1 (weight M0 - M1/h)
    left = m1 / h
    w[:-1] += left
    w[1:] += m0 - left
    return w / math.gamma(gamma)


@dataclass
class QuadratureWeights:
    """Product-trapezoid weights on a uniform mesh ``t_j = j * dt``.

    Row ``n`` approximates ``(I^gamma f)(t_n) ~ sum_j w[n][j] f(t_j)``. The
    weights depend only on ``n - j`` (up to the two end nodes), so a Toeplitz
    sequence is grown on demand instead of storing the full triangle.
    """

    dt: float
    gamma: float
    _left: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    _right: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)

    def __post_init__(self):
        _check_gamma_open(self.gamma)
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        self._scale = self.dt**self.gamma / math.gamma(self.gamma)

    def _grow(self, size: int) -> None:
        have = self._left.size
        if size <= have:
            return
        size = max(size, 2 * have)
        k = np.arange(have, size, dtype=float)
        m0, m1 = interval_moments(k, k + 1.0, self.gamma)
        self._left = np.concatenate([self._left, m1])
        self._right = np.concatenate([self._right, m0 - m1])

    def row(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("row index must be nonnegative")
        w = np.zeros(n + 1)
        if n == 0:
            return w
        self._grow(n)
        # interval i = [t_i, t_{i+1}] sits at offset k = n - 1 - i from t_n
        left = self._left[:n][::-1]
        right = self._right[:n][::-1]
        w[:-1] += left
        w[1:] += right
        return self._scale * w

    def row_reversed(self, n: int) -> np.ndarray:
        """Row ``n`` with index ``n - j`` (newest sample first)."""
        return self.row(n)[::-1]


def left_rl_integral(samples, spec: FractionalSpec, dt: float) -> float:
    """``(I^gamma_{0+} u)(t_n)`` from samples ``u(t_0), ..., u(t_n)``."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size == 0:
        raise ValueError("samples must be a nonempty 1-D array")
    if spec.is_identity:
        return float(samples[-1])
    if not dt > 0:
        raise ValueError("dt must be positive")
    n = samples.size - 1
    return float(QuadratureWeights(dt, spec.gamma).row(n) @ samples)


def left_rl_integral_all(samples, spec: FractionalSpec, dt: float) -> np.ndarray:
    """Left integral evaluated at every node of the uniform mesh."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size == 0:
        raise ValueError("samples must be a nonempty 1-D array")
    if spec.is_identity:
        return samples.copy()
    qw = QuadratureWeights(dt, spec.gamma)
    return np.array([qw.row(n) @ samples[: n + 1] for n in range(samples.size)])


def right_rl_integral(
    f: Callable[[float], float], t: float, T: float, spec: FractionalSpec
) -> float:
    """``(I^gamma_{T-} f)(t)`` by QUADPACK's algebraic-weight rule.

    The factor ``(s - t)**(gamma - 1)`` is passed as the weight function, so
    the endpoint singularity is handled by exact modified Chebyshev moments.
    """
    if not t < T:
        raise ValueError(f"need t < T, got t={t!r}, T={T!r}")
    if spec.is_identity:
        return float(f(t))

    def g(s):
        v = f(s)
        if not math.isfinite(v):
            raise ValueError(f"non-finite integrand value at s={s!r}")
        return v

    val, _ = integrate.quad(
        g, t, T, weight="alg", wvar=(spec.gamma - 1.0, 0.0),
        epsabs=0.0, epsrel=1e-12, limit=200,
    )
    return val / math.gamma(spec.gamma)


def rl_right_poly_closed_form(m: int, gamma: float, T: float, t):
    """Right integral of ``(1 - t/T)**m``: Gamma(m+1)/Gamma(m+1+gamma) T^gamma (1-t/T)^(m+gamma)."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr >= T):
        raise ValueError("t must lie in [0, T)")
    c = math.exp(math.lgamma(m + 1) - math.lgamma(m + 1 + gamma))
    out = c * T**gamma * (1.0 - t_arr / T) ** (m + gamma)
    return float(out) if np.ndim(t) == 0 else out


class MemoryConvolution:
    """Running ``I^gamma`` of a nodal field sampled at a growing time list.

    Uniform steps use cached :class:`QuadratureWeights`; once the step
    sequence becomes non-uniform the weights are rebuilt per call from exact
    kernel moments on the actual mesh.
    """

    def __init__(self, gamma: float, n_nodes: int, capacity: int = 256):
        self.gamma = gamma
        self._times = np.empty(capacity)
        self._vals = np.empty((capacity, n_nodes))
        self._n = 0
        self._uniform_dt: float | None = None
        self._break_at: int | None = None
        self._weights: QuadratureWeights | None = None
        self._cache: tuple | None = None

    def __len__(self) -> int:
        return self._n

    @property
    def times(self) -> np.ndarray:
        return self._times[: self._n]

    @property
    def values(self) -> np.ndarray:
        return self._vals[: self._n]

    def append(self, t: float, values) -> None:
        if self._n == self._times.size:
            cap = 2 * self._times.size
            self._times = np.resize(self._times, cap)
            vals = np.empty((cap, self._vals.shape[1]))
            vals[: self._n] = self._vals[: self._n]
            self._vals = vals
        if self._n >= 1:
            h = t - self._times[self._n - 1]
            if h <= 0:
                raise ValueError("times must be strictly increasing")
            if self._uniform_dt is None:
                self._uniform_dt = h
            elif self._break_at is None and abs(h - self._uniform_dt) > 1e-12 * self._uniform_dt:
                self._break_at = self._n
        self._times[self._n] = t
        self._vals[self._n] = values
        self._n += 1

    def evaluate(self) -> np.ndarray:
        n = self._n - 1
        if n < 0:
            raise ValueError("empty history")
        if self._cache is not None and self._cache[0] == n:
            return self._cache[1]
        out = self._evaluate(n)
        self._cache = (n, out)
        return out

    def _evaluate(self, n: int) -> np.ndarray:
        if self.gamma == 0.0:
            return self._vals[n].copy()
        if n == 0:
            return np.zeros(self._vals.shape[1])
        if self._break_at is None:
            dt = self._uniform_dt
            if self._weights is None or self._weights.dt != dt:
                self._weights = QuadratureWeights(dt, self.gamma)
            w = self._weights.row(n)
        else:
            w = nonuniform_weights(self._times[: n + 1], self.gamma)
        return w @ self._vals[: n + 1]
