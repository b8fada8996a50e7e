"""Asymptotic Q(I) profiles and the photon statistics drawn from them.

Three closed forms are built here: the generating solution Q0 of the
first-order equation f1 Q' + f0 Q = 0, the thermal exponential Q1 below
threshold, and the Gaussian approximation of Q0 around the classical
intensity. Profiles are normalized with pi * int Q dI = 1, so that
pi * int I Q dI = <n> + 1.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import replace
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import minimize_scalar

from ..models.records import PolySet, ProfileKind, QProfile, RootCatalog
from ..models.schemas import (
    CoeffTable,
    FieldMoments,
    LinearTheoryResult,
    ReducedParams,
)
from ..utils.config import settings
from ..utils.errors import (
    DomainError,
    IntegrationError,
    RegimeError,
    RootSelectionError,
)
from ..utils.logging import get_logger
from ..utils.numerics import integrate
from .coeffs import analyze
from .linear_theory import MIN_COOPERATIVITY, thresholds

logger = get_logger(__name__)

VACUUM_GUARD = 1e-12
SINGULAR_EXCLUSION = 1e-6
_MAX_DOUBLINGS = 80
_SEARCH_GRID = np.concatenate(([0.0], np.geomspace(1e-8, 1e8, 3201)))

LogDensity = Callable[[ArrayLike], np.ndarray]


# Profile construction -------------------------------------------------------
def _scalar(log_density: LogDensity, x: float) -> float:
    with np.errstate(divide="ignore", invalid="ignore"):
        return float(log_density(x))


def _locate_peak(
    log_density: LogDensity,
    singular_points: Sequence[float],
) -> tuple[float, float]:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        values = np.asarray(log_density(_SEARCH_GRID), dtype=float)
    usable = np.isfinite(values)
    for point in singular_points:
        usable &= np.abs(_SEARCH_GRID - point) > SINGULAR_EXCLUSION * max(1.0, abs(point))
    if not usable.any():
        msg = "density is not finite anywhere on I >= 0"
        raise IntegrationError(msg)

    index = int(np.flatnonzero(usable)[np.argmax(values[usable])])
    best_at, best = float(_SEARCH_GRID[index]), float(values[index])
    lower = float(_SEARCH_GRID[max(index - 1, 0)])
    upper = float(_SEARCH_GRID[min(index + 1, _SEARCH_GRID.size - 1)])
    refined = minimize_scalar(
        lambda x: -_scalar(log_density, x),
        bounds=(lower, upper),
        method="bounded",
        options={"xatol": 1e-10 * max(1.0, upper)},
    )
    if refined.success and math.isfinite(refined.fun) and -refined.fun > best:
        best_at, best = float(refined.x), float(-refined.fun)
    return best_at, best


def _support(
    log_density: LogDensity,
    peak: float,
    log_peak: float,
    singular_points: Sequence[float],
) -> float:
    """Upper cutoff beyond which the density carries a negligible tail."""
    target = log_peak + math.log(settings.support_floor)
    step = max(1.0, 0.05 * peak)
    for _ in range(_MAX_DOUBLINGS):
        upper = peak + step
        if _scalar(log_density, upper) < target:
            break
        step *= 2.0
    else:
        msg = "density does not decay on I >= 0"
        raise IntegrationError(msg)

    def density(x: float) -> float:
        return math.exp(_scalar(log_density, x) - log_peak)

    mass = integrate(density, 0.0, upper, singular_points, (peak,)).value
    for _ in range(_MAX_DOUBLINGS):
        tail = integrate(density, upper, 2.0 * upper, singular_points).value
        if tail <= settings.support_tail * mass:
            return upper
        mass += tail
        upper *= 2.0
    msg = "divergent tail: mass keeps growing with the cutoff"
    raise IntegrationError(msg)


def build_profile(
    kind: ProfileKind,
    log_density: LogDensity,
    params: ReducedParams | None = None,
    singular_points: Sequence[float] = (),
    descriptor: dict[str, float] | None = None,
) -> QProfile:
    """Wrap an unnormalized log-density with its peak and adaptive support."""
    singular = tuple(float(x) for x in singular_points if x > 0)
    peak, log_peak = _locate_peak(log_density, singular)
    i_max = _support(log_density, peak, log_peak, singular)
    return QProfile(
        kind=kind,
        log_density=log_density,
        i_max=i_max,
        params=params,
        log_norm=-log_peak,
        peak=peak,
        singular_points=singular,
        descriptor=dict(descriptor or {}),
    )


def _integrate_profile(profile: QProfile, weight: Callable[[float], float]) -> float:
    def integrand(x: float) -> float:
        return weight(x) * float(profile(x))

    return integrate(
        integrand,
        0.0,
        profile.i_max,
        profile.singular_points,
        profile.breakpoints,
    ).value


def mass(profile: QProfile) -> float:
    """pi * int_0^I_max Q dI at the current normalization."""
    return math.pi * _integrate_profile(profile, lambda _x: 1.0)


def normalize(profile: QProfile) -> QProfile:
    """Fix N_0 so that pi * int_0^I_max Q dI = 1.

    Raises:
        IntegrationError: If the mass is not positive and finite

    """
    total = mass(profile)
    if not (math.isfinite(total) and total > 0):
        msg = f"profile mass {total} is not positive and finite"
        raise IntegrationError(msg)
    return replace(profile, log_norm=profile.log_norm - math.log(total), normalized=True)


def moments(profile: QProfile) -> FieldMoments:
    """Photon statistics from the antinormally ordered Q-function moments."""
    if not profile.normalized:
        profile = normalize(profile)
    mean_i = math.pi * _integrate_profile(profile, lambda x: x)
    variance_i = math.pi * _integrate_profile(profile, lambda x: (x - mean_i) ** 2)

    mandel: float | None = None
    if mean_i > 1.0 + VACUUM_GUARD:
        mandel = (variance_i - mean_i) / (mean_i - 1.0) - 1.0
    return FieldMoments(
        mean_photon=mean_i - 1.0,
        mean_i_q=mean_i,
        second_moment_i_q=variance_i + mean_i**2,
        mandel_qf=mandel,
    )


# Closed forms ---------------------------------------------------------------
def generating_exponents(roots: RootCatalog) -> tuple[float, float]:
    """Exponents (e1, e2) of the two root factors of Q0.

    Raises:
        RegimeError: If f0 or f1 lacks two distinct real roots

    """
    i_m4, i_p4 = roots.i_minus4, roots.i_plus4
    i_m5, i_p5 = roots.i_minus5, roots.i_plus5
    if i_m4 is None or i_p4 is None or i_m5 is None or i_p5 is None:
        msg = "generating solution needs real roots of f0 and f1"
        raise RegimeError(msg)
    span = i_m4 - i_p4
    if span == 0:
        msg = "f1 has a double root"
        raise RegimeError(msg)
    k = roots.decay_ratio
    e1 = -k * (i_m4 - i_m5) * (i_m4 - i_p5) / span
    e2 = k * (i_p4 - i_m5) * (i_p4 - i_p5) / span
    return e1, e2


def q_generating(
    params: ReducedParams,
    roots: RootCatalog,
    table: CoeffTable,
) -> QProfile:
    """Generating solution Q0 = N0 (1 - I/I_-4)^e1 |1 - I/I_+4|^e2 exp(-k I).

    Raises:
        RegimeError: If b42 <= 0, roots are missing or I_-4 >= 0
        IntegrationError: If e2 <= -1 makes the root I_+4 non-integrable

    """
    if table.b42 <= 0:
        msg = f"b42={table.b42} must be positive"
        raise RegimeError(msg)
    e1, e2 = generating_exponents(roots)
    i_m4, i_p4 = float(roots.i_minus4), float(roots.i_plus4)  # type: ignore[arg-type]
    if i_m4 >= 0:
        msg = f"I_-4={i_m4} must be negative"
        raise RegimeError(msg)
    if i_p4 > 0 and e2 <= -1:
        msg = f"e2={e2} <= -1 makes Q0 non-normalizable at I_+4={i_p4}"
        raise IntegrationError(msg)
    if params.coupling_product < settings.generating_warn_product:
        logger.warning(
            "generating_solution_outside_classical_regime",
            c_times_is=params.coupling_product,
        )

    decay = table.decay_ratio

    def log_density(intensity: ArrayLike) -> np.ndarray:
        x = np.asarray(intensity, dtype=float)
        with np.errstate(divide="ignore"):
            return e1 * np.log1p(-x / i_m4) + e2 * np.log(np.abs(1.0 - x / i_p4)) - decay * x

    descriptor = {
        "e1": e1,
        "e2": e2,
        "decay": decay,
        "i_minus4": i_m4,
        "i_plus4": i_p4,
        "i_minus5": float(roots.i_minus5),  # type: ignore[arg-type]
        "i_plus5": float(roots.i_plus5),  # type: ignore[arg-type]
    }
    profile = build_profile(
        ProfileKind.GENERATING,
        log_density,
        params,
        singular_points=(i_p4,),
        descriptor=descriptor,
    )
    return normalize(profile)


def q_thermal(params: ReducedParams | None, thermal_scale: float) -> QProfile:
    """Thermal solution Q1 = N0 exp(I/a), a < 0, with <n> = -(a + 1).

    Raises:
        RootSelectionError: If a >= 0

    """
    a = thermal_scale
    if not a < 0:
        msg = f"thermal scale a={a} must be negative"
        raise RootSelectionError(msg)

    def log_density(intensity: ArrayLike) -> np.ndarray:
        return np.asarray(intensity, dtype=float) / a

    profile = build_profile(ProfileKind.THERMAL, log_density, params, descriptor={"scale": a})
    return replace(profile, log_norm=math.log(-1.0 / (math.pi * a)), normalized=True)


def q_gaussian(
    params: ReducedParams,
    lin: LinearTheoryResult,
    roots: RootCatalog,
    variance: Literal["linear", "roots"] = "linear",
    center_shift: float = 0.0,
) -> QProfile:
    """Gaussian approximation of Q0 around the classical intensity I0.

    Args:
        params: Parameter point
        lin: Linear-theory result at the same point
        roots: Root catalog, used by the "roots" variance
        variance: "linear" for 1 + I0 (2 + Qf_lin), "roots" for
            (I0 - I_-4) b42/b52
        center_shift: Offset of the centre from I0; 1 gives the antinormal mean

    Raises:
        RegimeError: Outside the lasing window
        DomainError: Unknown variance form

    """
    if not lin.valid or lin.qf_lin is None:
        msg = "Gaussian approximation needs a valid linear-theory point"
        raise RegimeError(msg)
    if params.i_s < settings.gaussian_warn_saturation:
        logger.warning("gaussian_outside_good_cavity", i_s=params.i_s)

    if variance == "linear":
        sigma2 = 1.0 + lin.i0 * (2.0 + lin.qf_lin)
    elif variance == "roots":
        if roots.i_minus4 is None:
            msg = "root variance needs the real roots of f1"
            raise RegimeError(msg)
        sigma2 = (lin.i0 - roots.i_minus4) / roots.decay_ratio
    else:
        msg = f"unknown variance form {variance!r}"
        raise DomainError(msg)

    center = lin.i0 + center_shift

    def log_density(intensity: ArrayLike) -> np.ndarray:
        x = np.asarray(intensity, dtype=float)
        return -((x - center) ** 2) / (2.0 * sigma2)

    profile = build_profile(
        ProfileKind.GAUSSIAN,
        log_density,
        params,
        descriptor={"center": center, "variance": sigma2},
    )
    return normalize(profile)


def generating_ode_residual(profile: QProfile, polys: PolySet) -> float:
    """Residual of f1 Q0' + f0 Q0 = 0 on the profile grid.

    max |f1 Q0' + f0 Q0| over max (|f1 Q0'| + |f0 Q0|), both taken on the
    grid with the analytic log-derivative. A relative 1e-6 neighbourhood of
    I_+4 is left out.
    """
    d = profile.descriptor
    i_p4 = d["i_plus4"]
    grid = profile.grid
    grid = grid[np.abs(grid - i_p4) > SINGULAR_EXCLUSION * max(1.0, abs(i_p4))]
    slope = d["e1"] / (grid - d["i_minus4"]) + d["e2"] / (grid - i_p4) - d["decay"]
    q = profile(grid)
    first = polys.evaluate(1, grid) * slope * q
    zeroth = polys.evaluate(0, grid) * q
    scale = float(np.max(np.abs(first) + np.abs(zeroth), initial=0.0))
    deviation = float(np.max(np.abs(first + zeroth), initial=0.0))
    return deviation / scale if scale > 0 else deviation


# Branch selection -----------------------------------------------------------
def select_solution(
    params: ReducedParams,
    r: float | None = None,
    theta: float | None = None,
) -> ProfileKind:
    """Thermal below theta * r_th (or without a lasing window), else generating."""
    pump = params.r if r is None else r
    factor = settings.branch_theta if theta is None else theta
    if params.c <= MIN_COOPERATIVITY:
        return ProfileKind.THERMAL
    if pump < factor * thresholds(params.c).r_th:
        return ProfileKind.THERMAL
    return ProfileKind.GENERATING


def asymptotic_profile(params: ReducedParams, theta: float | None = None) -> QProfile:
    """Normalized asymptotic profile on the branch chosen by select_solution."""
    table, _polys, catalog = analyze(params)
    if select_solution(params, theta=theta) is ProfileKind.THERMAL:
        return q_thermal(params, catalog.thermal_scale)
    return q_generating(params, catalog, table)
