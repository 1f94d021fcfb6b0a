"""Numerics for a pseudo-parabolic equation with a Riemann-Liouville memory nonlinearity.

Modules: ``fracint`` (fractional integrals), ``cutoffs`` and ``testfn``
(test functions and their scaling integrals), ``solver`` (radial IMEX
time stepping), ``blowup`` (outcome classification), ``sweep`` (outcome
maps) and ``cli``.
"""

from .blowup import BlowupReport, analyze, detect, estimate_t_star
from .fracint import (
    FractionalSpec,
    MemoryConvolution,
    QuadratureWeights,
    left_rl_integral,
    right_rl_integral,
    rl_right_poly_closed_form,
)
from .solver import ProblemSpec, RadialGrid, RadialProfile, RunControl, Trajectory, run, step
from .sweep import CaseResult, SweepConfig, classify_map, run_sweep
from .testfn import (
    DivergentIntegralError,
    ScalingReport,
    compute_I,
    compute_J,
    fit_scaling_exponent,
    omega_positivity_radius,
    weak_residual,
)

__version__ = "0.1.0"
