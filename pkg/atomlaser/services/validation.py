"""The validation suite behind `atomlaser validate`.

Every check compares a measured deviation with a declared tolerance.
Master-equation checks test the stationary identities (coherence continuity
and the fifth-order ODE) on the brute-force Q(I), which ties every closed-form
coefficient to ground truth. Analytic checks cover roots, factorization and
normalization of the asymptotic profile.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from ..models.records import ProfileKind, SteadyState
from ..models.requests import ParameterPoint
from ..models.responses import ValidationCheck, ValidationReport
from ..models.schemas import CoeffTable
from ..utils.errors import AtomLaserError
from ..utils.logging import ContextLogger, get_logger
from .coeffs import analyze
from .linear_theory import linear_theory
from .oracle import (
    SolveMethod,
    continuity_residual,
    moments_exact,
    ode_residual,
    q_from_state,
    solve_converged,
    steady_state,
)
from .params import from_dimensionless, reduced
from .qsolution import (
    asymptotic_profile,
    generating_ode_residual,
    mass,
    moments,
    select_solution,
)

logger = get_logger(__name__)

DEFAULT_POINTS: tuple[ParameterPoint, ...] = (
    ParameterPoint(i_s=2.0, c=40.0, r=3.0, cutoff=80),
    ParameterPoint(i_s=1.0, c=10.0, r=1.0, cutoff=40),
    ParameterPoint(i_s=40.0, c=20.0, r=9.0),
)

TRACE_TOL = 1e-10
HERMITICITY_TOL = 1e-10
POSITIVITY_TOL = 1e-12
STATIONARITY_TOL = 1e-10
IDENTITY_TOL = 1e-6
# A one-percent coefficient error lifts the term-relative residual to 1e-2.
SENSITIVITY_TOL = 1e-4
NORMALIZATION_TOL = 1e-8
MOMENT_TOL = 1e-6
DOUBLING_TOL = 1e-8
FACTORIZATION_TOL = 1e-10
Q0_ODE_TOL = 1e-9
THERMAL_CUBIC_TOL = 1e-10
SATURATED_PRODUCT = 1e3


def _check(
    name: str,
    point: str,
    value: float,
    tolerance: float,
    detail: str | None = None,
) -> ValidationCheck:
    passed = math.isfinite(value) and value <= tolerance
    return ValidationCheck(
        name=name,
        point=point,
        value=value if math.isfinite(value) else None,
        tolerance=tolerance,
        passed=passed,
        detail=detail,
    )


def _failure(name: str, point: str, exc: AtomLaserError) -> ValidationCheck:
    return ValidationCheck(name=name, point=point, passed=False, detail=f"{exc.reason}: {exc}")


def _relative(a: float, b: float, floor: float = 1e-300) -> float:
    return abs(a - b) / max(abs(b), floor)


def _oracle_checks(
    label: str,
    state: SteadyState,
    table: CoeffTable,
    mutated: str | None,
) -> list[ValidationCheck]:
    checks = [
        _check("trace", label, abs(state.trace - 1.0), TRACE_TOL),
        _check("hermiticity", label, state.hermiticity_error, HERMITICITY_TOL),
        _check("positivity", label, max(0.0, -state.min_population), POSITIVITY_TOL),
        _check(
            "stationarity",
            label,
            state.residual_norm / state.rates.total,
            STATIONARITY_TOL,
        ),
        _check("continuity", label, continuity_residual(state), IDENTITY_TOL),
    ]

    residual = ode_residual(state, table)
    checks.append(
        _check(
            "ode_residual",
            label,
            residual.max_relative,
            IDENTITY_TOL,
            detail=f"worst at I={residual.argmax:.6g}"
            + (f", {mutated} perturbed by 1%" if mutated else ""),
        ),
    )
    checks.append(
        _check("ode_sensitivity", label, residual.max_term_relative, SENSITIVITY_TOL),
    )

    profile = q_from_state(state)
    normalization = abs(mass(profile) - 1.0)
    checks.append(_check("oracle_normalization", label, normalization, NORMALIZATION_TOL))
    from_q = moments(profile)
    exact = moments_exact(state)
    checks.append(
        _check("moment_mean", label, _relative(from_q.mean_i_q, exact.mean_i_q), MOMENT_TOL),
    )
    checks.append(
        _check(
            "moment_second",
            label,
            _relative(from_q.second_moment_i_q, exact.second_moment_i_q),
            MOMENT_TOL,
        ),
    )

    method: SolveMethod = "full" if state.method == "full" else "sector"
    doubled = moments_exact(steady_state(state.rates, 2 * state.cutoff, method))
    change = _relative(doubled.mean_photon, exact.mean_photon) if exact.mean_photon else 0.0
    if exact.mandel_qf is not None and doubled.mandel_qf is not None:
        change = max(change, _relative(doubled.mandel_qf, exact.mandel_qf, floor=1e-3))
    checks.append(_check("cutoff_doubling", label, change, DOUBLING_TOL))
    return checks


def _analytic_checks(point: ParameterPoint, label: str) -> list[ValidationCheck]:
    params = reduced(point.r, point.i_s, point.c)
    table, polys, catalog = analyze(params)
    checks: list[ValidationCheck] = []

    worst = 0.0
    for nu in range(len(polys)):
        scale = float(np.max(np.abs(polys[nu])))
        worst = max(worst, float(np.max(np.abs(catalog.expand(nu) - polys[nu]))) / scale)
    checks.append(_check("factorization", label, worst, FACTORIZATION_TOL))

    if select_solution(params) is ProfileKind.THERMAL:
        lam = catalog.thermal_root
        terms = np.array([table.b50, table.b40 * lam, table.b30 * lam**2, table.b20 * lam**3])
        value = abs(float(np.sum(terms))) / float(np.sum(np.abs(terms)))
        checks.append(_check("thermal_cubic", label, value, THERMAL_CUBIC_TOL))
        return checks

    i_m4, i_p4 = catalog.i_minus4, catalog.i_plus4
    signs_ok = i_m4 is not None and i_p4 is not None and i_m4 < 0 < i_p4
    checks.append(
        ValidationCheck(
            name="root_signs",
            point=label,
            passed=signs_ok,
            detail=f"I_minus4={i_m4}, I_plus4={i_p4}",
        ),
    )
    lin = linear_theory(params)
    if params.coupling_product >= SATURATED_PRODUCT and lin.valid and catalog.i_minus5 is not None:
        checks.append(
            _check(
                "i_minus5_vs_i0",
                label,
                abs(catalog.i_minus5 - lin.i0) / max(0.01 * lin.i0, 1.0),
                1.0,
            ),
        )

    profile = asymptotic_profile(params)
    checks.append(_check("q0_normalization", label, abs(mass(profile) - 1.0), NORMALIZATION_TOL))
    first_order = generating_ode_residual(profile, polys)
    checks.append(_check("q0_ode_residual", label, first_order, Q0_ODE_TOL))
    return checks


def validate_point(point: ParameterPoint, mutate: str | None = None) -> list[ValidationCheck]:
    """All checks at one parameter point; solver failures become failed checks."""
    label = point.label()
    with ContextLogger(point=label):
        try:
            checks = _analytic_checks(point, label)
        except AtomLaserError as exc:
            checks = [_failure("analytic", label, exc)]

        try:
            params = reduced(point.r, point.i_s, point.c)
            table, _polys, _catalog = analyze(params)
            if mutate:
                table = table.mutated(mutate)
            rates = from_dimensionless(point.r, point.i_s, point.c)
            if point.cutoff is None:
                state = solve_converged(rates)
            else:
                state = steady_state(rates, point.cutoff)
            checks.extend(_oracle_checks(label, state, table, mutate))
        except AtomLaserError as exc:
            checks.append(_failure("oracle", label, exc))

        failed = [check.name for check in checks if not check.passed]
        logger.info("point_validated", checks=len(checks), failed=failed)
    return checks


def run_validation(
    points: Sequence[ParameterPoint] = DEFAULT_POINTS,
    mutate: str | None = None,
) -> ValidationReport:
    """Run the suite over the given points; passed iff every check passed."""
    checks = [check for point in points for check in validate_point(point, mutate)]
    return ValidationReport(
        passed=all(check.passed for check in checks),
        mutated=mutate,
        checks=checks,
    )
