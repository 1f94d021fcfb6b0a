import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from pseudoblow.fracint import (
    FractionalSpec,
    MemoryConvolution,
    QuadratureWeights,
    interval_moments,
    left_rl_integral,
    left_rl_integral_all,
    nonuniform_weights,
    right_rl_integral,
    rl_right_poly_closed_form,
)

gammas = st.floats(0.01, 0.99)


def _adaptive_left(f, t, gamma):
    # oracle: QUADPACK algebraic weight at the right endpoint
    val, _ = integrate.quad(f, 0.0, t, weight="alg", wvar=(0.0, gamma - 1.0), epsabs=0, epsrel=1e-13)
    return val / math.gamma(gamma)


def test_spec_bounds():
    FractionalSpec(0.0)
    for bad in (-0.1, 1.0, float("nan")):
        with pytest.raises(ValueError):
            FractionalSpec(bad)
    assert FractionalSpec(0.0).is_identity


def test_identity_and_empty():
    assert left_rl_integral([1.0, 2.0, 5.0], FractionalSpec(0.0), 0.1) == 5.0
    assert left_rl_integral([3.0], FractionalSpec(0.5), 0.1) == 0.0
    with pytest.raises(ValueError):
        left_rl_integral([], FractionalSpec(0.5), 0.1)


def test_constant_samples():
    n = 50
    got = left_rl_integral(np.full(n + 1, 2.0), FractionalSpec(0.5), 1.0 / n)
    assert got == pytest.approx(2.0 / math.gamma(1.5), rel=1e-13)


def test_t_squared_against_adaptive_oracle():
    want = _adaptive_left(lambda s: s * s, 1.0, 0.5)
    assert want == pytest.approx(2.0 / math.gamma(3.5), rel=1e-12)
    assert want == pytest.approx(0.6018022224509, rel=1e-11)
    n = 2000
    t = np.linspace(0, 1, n + 1)
    assert left_rl_integral(t**2, FractionalSpec(0.5), 1.0 / n) == pytest.approx(want, rel=1e-6)


@given(gamma=gammas, n=st.integers(1, 400), dt=st.floats(1e-3, 10.0))
@settings(max_examples=60, deadline=None)
def test_weights_nonnegative_and_exact_on_constants(gamma, n, dt):
    w = QuadratureWeights(dt, gamma).row(n)
    assert np.all(w >= 0)
    t = n * dt
    assert w.sum() == pytest.approx(t**gamma / math.gamma(gamma + 1), rel=1e-13)


@given(gamma=gammas, n=st.integers(1, 60), a=st.floats(-3, 3), b=st.floats(-3, 3))
@settings(max_examples=40, deadline=None)
def test_linearity(gamma, n, a, b):
    rng = np.random.default_rng(n)
    f, g = rng.normal(size=n + 1), rng.normal(size=n + 1)
    spec = FractionalSpec(gamma)
    lhs = left_rl_integral(a * f + b * g, spec, 0.1)
    rhs = a * left_rl_integral(f, spec, 0.1) + b * left_rl_integral(g, spec, 0.1)
    assert lhs == pytest.approx(rhs, abs=1e-12 * (1 + abs(a) + abs(b)) * n)


@given(gamma=gammas, n=st.integers(1, 60))
@settings(max_examples=30, deadline=None)
def test_positivity(gamma, n):
    f = np.abs(np.random.default_rng(n).normal(size=n + 1))
    assert left_rl_integral(f, FractionalSpec(gamma), 0.05) >= 0


@given(gamma=gammas, n=st.integers(1, 200))
@settings(max_examples=30, deadline=None)
def test_nonuniform_weights_reduce_to_uniform(gamma, n):
    dt = 0.013
    u = QuadratureWeights(dt, gamma).row(n)
    v = nonuniform_weights(dt * np.arange(n + 1), gamma)
    np.testing.assert_allclose(v, u, rtol=1e-12, atol=1e-15)


def test_interval_moments_far_and_near_agree():
    gamma = 0.3
    a = np.array([0.0, 0.5, 1.9, 2.0, 2.1, 50.0])
    m0, m1 = interval_moments(a, a + 1.0, gamma)
    for ai, x0, x1 in zip(a, m0, m1):
        q0 = integrate.quad(lambda x: x ** (gamma - 1), ai, ai + 1, epsabs=0, epsrel=1e-13)[0]
        q1 = integrate.quad(lambda x: x ** (gamma - 1) * (x - ai), ai, ai + 1, epsabs=0, epsrel=1e-13)[0]
        assert x0 == pytest.approx(q0, rel=1e-12)
        assert x1 == pytest.approx(q1, rel=1e-11)


def test_semigroup_spot_check():
    # I^0.25 I^0.25 t = I^0.5 t = t^1.5 / Gamma(2.5)
    n = 4000
    dt = 1.0 / n
    t = dt * np.arange(n + 1)
    inner = left_rl_integral_all(t, FractionalSpec(0.25), dt)
    outer = left_rl_integral(inner, FractionalSpec(0.25), dt)
    assert outer == pytest.approx(1.0 / math.gamma(2.5), rel=1e-4)


def test_right_integral_examples():
    spec = FractionalSpec(0.5)
    assert right_rl_integral(lambda s: 1.0, 0.0, 1.0, spec) == pytest.approx(1 / math.gamma(1.5), rel=1e-12)
    assert right_rl_integral(lambda s: 0.0, 0.2, 1.0, spec) == 0.0
    got = right_rl_integral(lambda s: (1 - s) ** 2, 0.0, 1.0, spec)
    assert got == pytest.approx(rl_right_poly_closed_form(2, 0.5, 1.0, 0.0), rel=1e-8)
    assert right_rl_integral(lambda s: s, 0.3, 1.0, FractionalSpec(0.0)) == 0.3


def test_right_integral_errors():
    spec = FractionalSpec(0.5)
    with pytest.raises(ValueError):
        right_rl_integral(lambda s: 1.0, 1.0, 1.0, spec)
    with pytest.raises(ValueError):
        right_rl_integral(lambda s: float("nan"), 0.0, 1.0, spec)


def test_closed_form_properties():
    # 2/Gamma(3.5), checked against the adaptive oracle above
    assert rl_right_poly_closed_form(2, 0.5, 1.0, 0.0) == pytest.approx(0.6018022224509, rel=1e-11)
    assert rl_right_poly_closed_form(3, 0.4, 2.0, 2.0 * (1 - 1e-9)) < 1e-25
    lam = 7.0
    a = rl_right_poly_closed_form(3, 0.4, 2.0, 0.6)
    b = rl_right_poly_closed_form(3, 0.4, 2.0 * lam, 0.6 * lam)
    assert b == pytest.approx(a * lam**0.4, rel=1e-13)
    with pytest.raises(ValueError):
        rl_right_poly_closed_form(2, 0.5, 1.0, 1.0)


def test_memory_convolution_matches_direct_weights():
    gamma, dt = 0.4, 0.05
    mc = MemoryConvolution(gamma, 3, capacity=2)
    rng = np.random.default_rng(0)
    vals = rng.random((30, 3))
    for i, v in enumerate(vals):
        mc.append(i * dt, v)
    want = QuadratureWeights(dt, gamma).row(29) @ vals
    np.testing.assert_allclose(mc.evaluate(), want, rtol=1e-13)
    # switch to a halved step: falls back to non-uniform weights
    mc.append(29 * dt + dt / 2, vals[-1])
    w = nonuniform_weights(mc.times, gamma)
    np.testing.assert_allclose(mc.evaluate(), w @ mc.values, rtol=1e-13)
    with pytest.raises(ValueError):
        mc.append(0.0, vals[0])


def test_memory_convolution_identity_order():
    mc = MemoryConvolution(0.0, 2)
    mc.append(0.0, [1.0, 2.0])
    mc.append(0.1, [3.0, 4.0])
    np.testing.assert_array_equal(mc.evaluate(), [3.0, 4.0])
