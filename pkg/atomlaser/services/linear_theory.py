"""Linear-theory observables: classical intensity, Mandel Q, thresholds."""

from __future__ import annotations

import math

from ..models.schemas import LinearTheoryResult, ReducedParams, Thresholds
from ..utils.errors import NoLasingRegimeError, RegimeError

MIN_COOPERATIVITY = 8.0


def classical_intensity(r: float, i_s: float, c: float) -> float:
    """I0 = (I_s/2) [(r - 1) - (r + 1)^2 / c]; non-positive outside lasing."""
    return 0.5 * i_s * ((r - 1.0) - (r + 1.0) ** 2 / c)


def mandel_lin(r: float, c: float, checked: bool = True) -> float:
    """Linear-theory Mandel parameter.

    Args:
        r: Pump parameter
        c: Cooperativity
        checked: Raise outside the lasing window instead of returning the raw
            value (which diverges at both ends of the window)

    Raises:
        RegimeError: If checked and c <= 8 or r is outside (r_th, r_q)

    """
    gain = (r - 1.0) - (r + 1.0) ** 2 / c
    denominator = 2.0 * c * c * gain
    numerator = 2.0 * c * c - c * (r - 5.0) * (r + 1.0) + 3.0 * (r + 1.0) ** 3
    if checked and (c <= MIN_COOPERATIVITY or denominator <= 0):
        msg = f"linear theory undefined at r={r}, c={c}"
        raise RegimeError(msg)
    if denominator == 0:
        return math.copysign(math.inf, numerator)
    return numerator / denominator


def thresholds(c: float, i_s: float | None = None) -> Thresholds:
    """Threshold r_th, optimum r_m, self-quenching r_q and peak intensity I_m.

    Raises:
        NoLasingRegimeError: If c <= 8

    """
    if c <= MIN_COOPERATIVITY:
        msg = f"no lasing window for c={c} <= {MIN_COOPERATIVITY:g}"
        raise NoLasingRegimeError(msg)
    r_m = c / 2.0 - 1.0
    half_width = 0.5 * c * math.sqrt(1.0 - MIN_COOPERATIVITY / c)
    return Thresholds(
        r_th=r_m - half_width,
        r_m=r_m,
        r_q=r_m + half_width,
        i_m=None if i_s is None else i_s * (c / 8.0 - 1.0),
    )


def linear_theory(params: ReducedParams) -> LinearTheoryResult:
    """All linear-theory observables at one parameter point."""
    r, i_s, c = params.r, params.i_s, params.c
    i0 = classical_intensity(r, i_s, c)
    if c <= MIN_COOPERATIVITY:
        return LinearTheoryResult(i0=i0, qf_lin=None, valid=False)

    bounds = thresholds(c, i_s)
    valid = bounds.r_th < r < bounds.r_q and i0 > 0
    return LinearTheoryResult(
        i0=i0,
        qf_lin=mandel_lin(r, c) if valid else None,
        r_th=bounds.r_th,
        r_m=bounds.r_m,
        r_q=bounds.r_q,
        i_m=bounds.i_m,
        valid=valid,
    )
