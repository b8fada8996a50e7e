"""Value types: rates, reduced parameters, coefficient table, observables."""

from __future__ import annotations

import math
from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..utils.errors import DomainError

CONSISTENCY_TOL = 1e-12

PositiveFinite = Annotated[float, Field(gt=0, allow_inf_nan=False)]


class RateSet(BaseModel):
    """Physical rate constants of the atom-cavity system, in 1/time."""

    model_config = ConfigDict(frozen=True)

    pump_rate: PositiveFinite = Field(description="Incoherent pump rate Gamma")
    decay_rate: PositiveFinite = Field(description="Atomic decay rate gamma")
    cavity_rate: PositiveFinite = Field(description="Cavity loss rate kappa")
    coupling: PositiveFinite = Field(description="Atom-field coupling g")

    @property
    def total(self) -> float:
        return self.pump_rate + self.decay_rate + self.cavity_rate + self.coupling


class ReducedParams(BaseModel):
    """Dimensionless parameters (r, I_s, c) and their (omega, eta, tau) form.

    r = omega/eta, I_s = eta/tau and c = 1/(eta*tau) hold to 1e-12 relative.
    """

    model_config = ConfigDict(frozen=True)

    r: PositiveFinite = Field(description="Pump parameter Gamma/gamma")
    i_s: PositiveFinite = Field(description="Saturation parameter gamma/kappa")
    c: PositiveFinite = Field(description="Cooperativity 4 g^2/(gamma kappa)")
    omega: PositiveFinite = Field(description="Gamma/2g")
    eta: PositiveFinite = Field(description="gamma/2g")
    tau: PositiveFinite = Field(description="kappa/2g")

    @model_validator(mode="after")
    def _check_consistency(self) -> ReducedParams:
        derived = {
            "r": self.omega / self.eta,
            "i_s": self.eta / self.tau,
            "c": 1.0 / (self.eta * self.tau),
        }
        for name, value in derived.items():
            given = getattr(self, name)
            if abs(value - given) > CONSISTENCY_TOL * given:
                msg = f"{name}={given} inconsistent with (omega, eta, tau): {value}"
                raise ValueError(msg)
        return self

    @classmethod
    def from_triple(cls, r: float, i_s: float, c: float) -> ReducedParams:
        """Build from the user-facing triple (r, I_s, c)."""
        tau = 1.0 / math.sqrt(c * i_s)
        eta = i_s * tau
        return cls(r=r, i_s=i_s, c=c, omega=r * eta, eta=eta, tau=tau)

    @property
    def coupling_product(self) -> float:
        """c * I_s = (2g/kappa)^2, large in the classical regime."""
        return self.c * self.i_s

    def label(self) -> str:
        return f"I_s={self.i_s:g} c={self.c:g} r={self.r:g}"


COEFFICIENT_NAMES: tuple[str, ...] = (
    "b02", "b03",
    "b11", "b12", "b13",
    "b20", "b21", "b22", "b23",
    "b30", "b31", "b32", "b33",
    "b40", "b41", "b42",
    "b50", "b51", "b52",
)  # fmt: skip


class CoeffTable(BaseModel):
    """Coefficients b_ik of the fifth-order equation for Q(I)."""

    model_config = ConfigDict(frozen=True)

    b02: float
    b03: float
    b11: float
    b12: float
    b13: float
    b20: float
    b21: float
    b22: float
    b23: float
    b30: float
    b31: float
    b32: float
    b33: float
    b40: float
    b41: float
    b42: float
    b50: float
    b51: float
    b52: float

    def mutated(self, name: str, factor: float = 1.01) -> CoeffTable:
        """Return a copy with one coefficient multiplied by factor."""
        if name not in COEFFICIENT_NAMES:
            msg = f"unknown coefficient {name!r}"
            raise DomainError(msg)
        return self.model_copy(update={name: getattr(self, name) * factor})

    @property
    def decay_ratio(self) -> float:
        """b52/b42, the exponential decay rate of the generating solution."""
        return self.b52 / self.b42


class Thresholds(BaseModel):
    """Pump values bounding the lasing window, and the peak intensity."""

    model_config = ConfigDict(frozen=True)

    r_th: float = Field(description="Lasing threshold")
    r_m: float = Field(description="Pump at maximal classical intensity")
    r_q: float = Field(description="Self-quenching pump")
    i_m: float | None = Field(default=None, description="Maximal classical intensity")


class LinearTheoryResult(BaseModel):
    """Linear-theory observables at one parameter point."""

    model_config = ConfigDict(frozen=True)

    i0: float = Field(description="Classical intracavity intensity")
    qf_lin: float | None = Field(description="Linear-theory Mandel Q")
    r_th: float | None = None
    r_m: float | None = None
    r_q: float | None = None
    i_m: float | None = None
    valid: bool = Field(description="c > 8 and r inside (r_th, r_q)")


class FieldMoments(BaseModel):
    """Photon-number statistics; Q-function moments are antinormally ordered."""

    model_config = ConfigDict(frozen=True)

    mean_photon: float = Field(description="<n>")
    mean_i_q: float = Field(description="pi * int I Q dI = <n> + 1")
    second_moment_i_q: float = Field(description="pi * int I^2 Q dI")
    mandel_qf: float | None = Field(
        description="Mandel Q parameter, None when <n> is vacuum-adjacent",
    )

    @property
    def photon_variance(self) -> float:
        return self.second_moment_i_q - self.mean_i_q**2 - self.mean_i_q
