"""CSV and JSON serialization of command reports.

CSV files open with a block of '#' metadata lines (tool version, schema
version, run parameters), then a header row. Numbers carry 17 significant
digits and missing values are empty cells. Nothing time-dependent is written,
so identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from pydantic import BaseModel

from .. import __version__
from ..models.requests import OutputFormat
from ..models.responses import (
    ProfileReport,
    ScanReport,
    ScanRow,
    TableColumn,
    TableReport,
    ValidationReport,
)

Report = ScanReport | TableReport | ProfileReport | ValidationReport


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _records(report: Report) -> tuple[list[str], list[dict[str, Any]], dict[str, Any]]:
    """Column names, row dicts and metadata of a report."""
    if isinstance(report, ScanReport):
        columns = [
            name
            for name in ScanRow.model_fields
            if report.with_oracle or name not in ScanRow.oracle_columns
        ]
        rows = [row.model_dump() for row in report.rows]
        return columns, rows, {"with_oracle": report.with_oracle}
    if isinstance(report, TableReport):
        rows = [column.model_dump() for column in report.columns]
        columns = list(TableColumn.model_fields)
        return columns, rows, {"heavy": report.heavy}
    if isinstance(report, ProfileReport):
        rows = [point.model_dump() for point in report.points]
        columns = ["i", "q_asym", "q_gaussian", "q_oracle"]
        metadata = {
            "i_s": report.i_s,
            "c": report.c,
            "r": report.r,
            "branch_kind": report.branch_kind,
            **{f"error.{name}": code for name, code in sorted(report.errors.items())},
            **{f"norm.{name}": value for name, value in sorted(report.norm_constants.items())},
        }
        return columns, rows, metadata
    rows = [check.model_dump() for check in report.checks]
    columns = ["name", "point", "value", "tolerance", "passed", "detail"]
    return columns, rows, {"passed": report.passed, "mutated": report.mutated}


def to_csv(report: Report, command: str, parameters: Iterable[tuple[str, Any]] = ()) -> str:
    """Render a report as CSV with its metadata header block."""
    columns, rows, metadata = _records(report)
    buffer = io.StringIO()
    buffer.write(f"# atomlaser {__version__}\n")
    buffer.write(f"# schema_version={report.schema_version}\n")
    buffer.write(f"# command={command}\n")
    # Report metadata overrides a run parameter of the same name.
    header = {**dict(parameters), **metadata}
    for key, value in header.items():
        buffer.write(f"# {key}={format_cell(value)}\n")

    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(name)) for name in columns])
    return buffer.getvalue()


def to_json(report: Report) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2) + "\n"


def render(
    report: Report,
    output_format: OutputFormat,
    command: str,
    parameters: Sequence[tuple[str, Any]] = (),
) -> str:
    if output_format is OutputFormat.JSON:
        return to_json(report)
    return to_csv(report, command, parameters)


def write_atomic(path: Path, text: str) -> None:
    """Write text to path through a temporary sibling file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.with_suffix(path.suffix + ".tmp")
    tmp_path.write_text(text, newline="\n")
    tmp_path.replace(path)


def load_report(model: type[BaseModel], text: str) -> BaseModel:
    """Parse JSON output back into its report model."""
    return model.model_validate_json(text)
