"""Output records of the CLI subcommands; field order is column order."""

from __future__ import annotations

from typing import Any, ClassVar

from pydantic import BaseModel, Field

SCHEMA_VERSION = 1


class ScanRow(BaseModel):
    """One pump value of scan-pump."""

    i_s: float = Field(description="Saturation parameter")
    c: float = Field(description="Cooperativity")
    r: float = Field(description="Pump parameter")
    i0: float | None = Field(default=None, description="Classical intensity")
    qf_lin: float | None = Field(default=None, description="Linear-theory Mandel Q")
    n_asym: float | None = Field(default=None, description="<n> of the asymptotic profile")
    qf_asym: float | None = Field(default=None, description="Mandel Q of the asymptotic profile")
    branch_kind: str | None = Field(default=None, description="generating or thermal")
    n_oracle: float | None = Field(default=None, description="<n> of the master equation")
    qf_oracle: float | None = Field(default=None, description="Mandel Q of the master equation")
    cutoff: int | None = Field(default=None, description="Fock cutoff of the oracle solve")
    reason: str | None = Field(
        default=None,
        description="Semicolon-separated column:code pairs explaining empty cells",
    )

    oracle_columns: ClassVar[tuple[str, ...]] = ("n_oracle", "qf_oracle", "cutoff")


class ScanReport(BaseModel):
    """Output of scan-pump."""

    schema_version: int = SCHEMA_VERSION
    with_oracle: bool = False
    rows: list[ScanRow] = Field(default_factory=list)


class TableColumn(BaseModel):
    """One parameter column of the comparison table."""

    label: str = Field(description="Printed saturation label")
    i_s: float = Field(description="Saturation parameter used")
    c: float
    r: float
    i0: float | None = Field(default=None, description="Classical intensity (linear theory)")
    qf_lin: float | None = Field(default=None, description="Linear-theory Mandel Q")
    n_q0: float | None = Field(default=None, description="<n> of the generating solution")
    qf_q0: float | None = Field(default=None, description="Mandel Q of the generating solution")
    sigma2: float | None = Field(default=None, description="Gaussian variance")
    qf_gaussian: float | None = Field(default=None, description="Mandel Q of the Gaussian")
    n_oracle: float | None = None
    qf_oracle: float | None = None
    reason: str | None = None


class TableReport(BaseModel):
    """Output of table."""

    schema_version: int = SCHEMA_VERSION
    heavy: bool = False
    columns: list[TableColumn] = Field(default_factory=list)


class ProfilePoint(BaseModel):
    """Q(I) of each curve at one intensity."""

    i: float
    q_asym: float | None = None
    q_gaussian: float | None = None
    q_oracle: float | None = None


class ProfileReport(BaseModel):
    """Output of profile."""

    schema_version: int = SCHEMA_VERSION
    i_s: float
    c: float
    r: float
    branch_kind: str | None = None
    errors: dict[str, str] = Field(
        default_factory=dict,
        description="Curve name to reason code for curves that failed",
    )
    norm_constants: dict[str, float] = Field(
        default_factory=dict,
        description="Curve name to N_0, the factor normalizing the sampled density",
    )
    points: list[ProfilePoint] = Field(default_factory=list)


class ValidationCheck(BaseModel):
    """One check of the validation suite."""

    name: str
    point: str = Field(description="Parameter point label")
    value: float | None = Field(default=None, description="Measured deviation")
    tolerance: float | None = None
    passed: bool
    detail: str | None = None


class ValidationReport(BaseModel):
    """Output of validate."""

    schema_version: int = SCHEMA_VERSION
    passed: bool
    mutated: str | None = None
    checks: list[ValidationCheck] = Field(default_factory=list)


REPORT_MODELS: dict[str, type[BaseModel]] = {
    "scan-pump": ScanReport,
    "table": TableReport,
    "profile": ProfileReport,
    "validate": ValidationReport,
}


def report_schemas() -> dict[str, dict[str, Any]]:
    """JSON schema document of every subcommand's output."""
    return {name: model.model_json_schema() for name, model in REPORT_MODELS.items()}
