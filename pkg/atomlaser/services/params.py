"""Conversions between physical rates and dimensionless parameters."""

from __future__ import annotations

import math

from pydantic import ValidationError

from ..models.schemas import RateSet, ReducedParams
from ..utils.errors import DomainError


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0):
            msg = f"{name} must be positive and finite, got {value}"
            raise DomainError(msg)


def reduce(rates: RateSet) -> ReducedParams:
    """Map rates to r = Gamma/gamma, I_s = gamma/kappa, c = 4g^2/(gamma kappa).

    Raises:
        DomainError: If any rate is non-positive or non-finite

    """
    pump, decay, cavity, g = (
        rates.pump_rate,
        rates.decay_rate,
        rates.cavity_rate,
        rates.coupling,
    )
    _require_positive(pump_rate=pump, decay_rate=decay, cavity_rate=cavity, coupling=g)
    try:
        return ReducedParams(
            r=pump / decay,
            i_s=decay / cavity,
            c=4.0 * g * g / (decay * cavity),
            omega=pump / (2.0 * g),
            eta=decay / (2.0 * g),
            tau=cavity / (2.0 * g),
        )
    except ValidationError as exc:
        raise DomainError(str(exc)) from exc


def from_dimensionless(
    r: float,
    i_s: float,
    c: float,
    kappa_scale: float = 1.0,
) -> RateSet:
    """Build rates for (r, I_s, c) with kappa as the free time scale.

    Args:
        r: Pump parameter
        i_s: Saturation parameter
        c: Cooperativity
        kappa_scale: Cavity loss rate; observables do not depend on it

    Raises:
        DomainError: If any input is non-positive or non-finite

    """
    _require_positive(r=r, i_s=i_s, c=c, kappa_scale=kappa_scale)
    cavity = kappa_scale
    decay = i_s * cavity
    return RateSet(
        pump_rate=r * decay,
        decay_rate=decay,
        cavity_rate=cavity,
        coupling=math.sqrt(c * decay * cavity) / 2.0,
    )


def reduced(r: float, i_s: float, c: float) -> ReducedParams:
    """Validated ReducedParams for a user-facing triple."""
    _require_positive(r=r, i_s=i_s, c=c)
    try:
        return ReducedParams.from_triple(r, i_s, c)
    except ValidationError as exc:
        raise DomainError(str(exc)) from exc
