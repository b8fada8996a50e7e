"""Service modules: analytic theory, master-equation oracle and run coordination."""

from .coeffs import analyze, coefficients, polynomials, roots
from .linear_theory import classical_intensity, linear_theory, mandel_lin, thresholds
from .oracle import (
    coherence_profile,
    continuity_residual,
    cutoff_policy,
    is_heavy,
    liouvillian,
    moments_exact,
    ode_residual,
    q_from_state,
    solve_converged,
    steady_state,
)
from .params import from_dimensionless, reduce, reduced
from .qsolution import (
    asymptotic_profile,
    generating_ode_residual,
    moments,
    normalize,
    q_gaussian,
    q_generating,
    q_thermal,
    select_solution,
)
from .run_manager import RunManager

__all__ = [
    "RunManager",
    "analyze",
    "asymptotic_profile",
    "classical_intensity",
    "coefficients",
    "coherence_profile",
    "continuity_residual",
    "cutoff_policy",
    "from_dimensionless",
    "generating_ode_residual",
    "is_heavy",
    "linear_theory",
    "liouvillian",
    "mandel_lin",
    "moments",
    "moments_exact",
    "normalize",
    "ode_residual",
    "polynomials",
    "q_from_state",
    "q_gaussian",
    "q_generating",
    "q_thermal",
    "reduce",
    "reduced",
    "roots",
    "select_solution",
    "solve_converged",
    "steady_state",
    "thresholds",
]
