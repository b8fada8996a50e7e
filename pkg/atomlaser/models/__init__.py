"""Data models for parameters, analytic objects and command output."""

from .records import (
    CoherenceProfile,
    PolySet,
    ProfileKind,
    QProfile,
    ResidualProfile,
    RootCatalog,
    SteadyState,
)
from .requests import OutputFormat, ParameterPoint, RunConfig, Subcommand
from .responses import (
    ProfilePoint,
    ProfileReport,
    ScanReport,
    ScanRow,
    TableColumn,
    TableReport,
    ValidationCheck,
    ValidationReport,
)
from .schemas import (
    CoeffTable,
    FieldMoments,
    LinearTheoryResult,
    RateSet,
    ReducedParams,
    Thresholds,
)

__all__ = [
    "CoeffTable",
    "CoherenceProfile",
    "FieldMoments",
    "LinearTheoryResult",
    "OutputFormat",
    "ParameterPoint",
    "PolySet",
    "ProfileKind",
    "ProfilePoint",
    "ProfileReport",
    "QProfile",
    "RateSet",
    "ReducedParams",
    "ResidualProfile",
    "RootCatalog",
    "RunConfig",
    "ScanReport",
    "ScanRow",
    "SteadyState",
    "Subcommand",
    "TableColumn",
    "TableReport",
    "Thresholds",
    "ValidationCheck",
    "ValidationReport",
]
