"""Run configuration models for the command line."""

from __future__ import annotations

import math
from enum import Enum
from pathlib import Path

from pydantic import BaseModel, Field, model_validator

from .schemas import PositiveFinite

RANGE_SLACK = 1e-9


class Subcommand(str, Enum):
    """CLI subcommands."""

    SCAN_PUMP = "scan-pump"
    TABLE = "table"
    PROFILE = "profile"
    VALIDATE = "validate"


class OutputFormat(str, Enum):
    """Serialization of command output."""

    CSV = "csv"
    JSON = "json"


class ParameterPoint(BaseModel):
    """One (I_s, c, r) point with an optional Fock cutoff."""

    i_s: PositiveFinite = Field(description="Saturation parameter")
    c: PositiveFinite = Field(description="Cooperativity")
    r: PositiveFinite = Field(description="Pump parameter")
    cutoff: int | None = Field(default=None, ge=4, description="Fock cutoff override")

    @classmethod
    def parse(cls, text: str) -> ParameterPoint:
        """Parse "IS,C,R" or "IS,C,R,N"."""
        parts = [part.strip() for part in text.split(",")]
        if len(parts) not in (3, 4):
            msg = f"expected IS,C,R[,N], got {text!r}"
            raise ValueError(msg)
        cutoff = int(parts[3]) if len(parts) == 4 else None
        return cls(i_s=float(parts[0]), c=float(parts[1]), r=float(parts[2]), cutoff=cutoff)

    def label(self) -> str:
        return f"I_s={self.i_s:g},c={self.c:g},r={self.r:g}"

    def as_option(self) -> str:
        """The "IS,C,R[,N]" form accepted by parse."""
        parts = [f"{value:.17g}" for value in (self.i_s, self.c, self.r)]
        if self.cutoff is not None:
            parts.append(str(self.cutoff))
        return ",".join(parts)


class RunConfig(BaseModel):
    """Everything one CLI invocation needs; identical configs give identical output."""

    subcommand: Subcommand
    i_s: PositiveFinite | None = Field(default=None, description="Saturation parameter")
    c: list[PositiveFinite] = Field(default_factory=list, description="Cooperativities")
    r: PositiveFinite | None = Field(default=None, description="Single pump value")
    r_range: tuple[float, float] | None = Field(default=None, description="Pump range, inclusive")
    r_step: float | None = Field(default=None, gt=0, description="Pump step")
    r_ratio: PositiveFinite | None = Field(default=None, description="r = c / r_ratio")
    cutoff: int | None = Field(default=None, ge=4, description="Fock cutoff override")
    theta: PositiveFinite | None = Field(default=None, description="Branch crossover factor")
    with_oracle: bool = Field(default=False, description="Add master-equation columns")
    heavy: bool = Field(default=False, description="Allow table-scale oracle solves")
    gaussian: bool = Field(default=True, description="Add the Gaussian curve to profiles")
    output_format: OutputFormat = Field(default=OutputFormat.CSV)
    out: Path | None = Field(default=None, description="Output file, stdout if unset")
    workers: int = Field(default=1, ge=1, description="Process-pool size for scans")
    points: list[ParameterPoint] = Field(default_factory=list)
    mutate: str | None = Field(default=None, description="Coefficient to perturb by 1%")

    @model_validator(mode="after")
    def _check_ranges(self) -> RunConfig:
        if self.r_range is not None:
            low, high = self.r_range
            if not (math.isfinite(low) and math.isfinite(high)) or low <= 0:
                msg = "pump range must be positive and finite"
                raise ValueError(msg)
            if high < low:
                msg = f"empty pump range [{low}, {high}]"
                raise ValueError(msg)
            if self.r_step is None:
                msg = "--r-range needs --r-step"
                raise ValueError(msg)
        if self.subcommand is Subcommand.SCAN_PUMP:
            if self.i_s is None or not self.c:
                msg = "scan-pump needs --is and --c"
                raise ValueError(msg)
            if self.r is None and self.r_range is None and self.r_ratio is None:
                msg = "scan-pump needs --r, --r-range or --r-ratio"
                raise ValueError(msg)
        if self.subcommand is Subcommand.PROFILE and (
            self.i_s is None or len(self.c) != 1 or self.r is None
        ):
            msg = "profile needs --is, one --c and --r"
            raise ValueError(msg)
        return self

    def pump_values(self) -> list[float]:
        """Pump values of the sweep in ascending order."""
        if self.r_range is None:
            return [] if self.r is None else [self.r]
        low, high = self.r_range
        step = float(self.r_step)  # type: ignore[arg-type]
        count = math.floor((high - low) / step + RANGE_SLACK) + 1
        return [low + k * step for k in range(count)]

    def scan_points(self) -> list[ParameterPoint]:
        """(I_s, c, r) points of scan-pump, ordered by c then r."""
        i_s = float(self.i_s)  # type: ignore[arg-type]
        points: list[ParameterPoint] = []
        for c in self.c:
            pumps = [c / self.r_ratio] if self.r_ratio is not None else self.pump_values()
            points.extend(
                ParameterPoint(i_s=i_s, c=c, r=r, cutoff=self.cutoff) for r in pumps
            )
        return points
