"""Command-line entry point: scan-pump, table, profile, validate, schema."""

from __future__ import annotations

import json
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click
from click.core import ParameterSource
from dotenv import dotenv_values
from pydantic import ValidationError

from . import __version__
from .models.requests import OutputFormat, ParameterPoint, RunConfig, Subcommand
from .models.responses import report_schemas
from .models.schemas import COEFFICIENT_NAMES
from .services.export import format_cell, render, write_atomic
from .services.run_manager import RunManager
from .utils import get_logger, setup_logging
from .utils.errors import AtomLaserError

logger = get_logger(__name__)

# Config-file keys (flag names without dashes) and the RunConfig field they set.
CONFIG_KEYS: dict[str, str] = {
    "is": "i_s",
    "c": "c",
    "r": "r",
    "r-range": "r_range",
    "r-step": "r_step",
    "r-ratio": "r_ratio",
    "cutoff": "cutoff",
    "theta": "theta",
    "with-oracle": "with_oracle",
    "heavy": "heavy",
    "gaussian": "gaussian",
    "format": "output_format",
    "out": "out",
    "workers": "workers",
    "mutate": "mutate",
}
# Run parameters written to the CSV header, per subcommand.
RECORDED_FIELDS: dict[Subcommand, tuple[str, ...]] = {
    Subcommand.SCAN_PUMP: (
        "i_s", "c", "r", "r_range", "r_step", "r_ratio", "cutoff", "theta", "heavy",
    ),
    Subcommand.TABLE: ("cutoff",),
    Subcommand.PROFILE: ("cutoff", "theta", "with_oracle", "heavy", "gaussian"),
    Subcommand.VALIDATE: ("points",),
}  # fmt: skip


def _split(value: str) -> list[str]:
    return [part for part in value.replace(":", ",").split(",") if part.strip()]


def read_config_file(path: Path) -> dict[str, Any]:
    """Read a flat key=value run file into RunConfig fields."""
    values: dict[str, Any] = {}
    for key, raw in dotenv_values(path).items():
        name = key.strip().lower().lstrip("-").replace("_", "-")
        if name not in CONFIG_KEYS:
            msg = f"unknown key {key!r} in {path}"
            raise click.UsageError(msg)
        if raw is None:
            continue
        field = CONFIG_KEYS[name]
        if field == "c":
            values[field] = _split(raw)
        elif field == "r_range":
            values[field] = tuple(_split(raw))
        else:
            values[field] = raw.strip()
    return values


def build_config(
    ctx: click.Context,
    subcommand: Subcommand,
    options: dict[str, Any],
) -> RunConfig:
    """Merge config-file values with the command line; flags win.

    Raises:
        click.UsageError: If the merged configuration is invalid

    """
    merged: dict[str, Any] = dict(ctx.obj.get("file_values", {}))
    for name, value in options.items():
        source = ctx.get_parameter_source(name)
        if source is ParameterSource.DEFAULT and name in merged:
            continue
        merged[name] = list(value) if isinstance(value, tuple) and name != "r_range" else value

    raw_points = merged.pop("points", None) or []
    try:
        merged["points"] = [ParameterPoint.parse(text) for text in raw_points]
        config = RunConfig.model_validate({"subcommand": subcommand, **merged})
    except (ValidationError, ValueError) as exc:
        raise click.UsageError(str(exc), ctx=ctx) from exc
    if config.mutate is not None and config.mutate not in COEFFICIENT_NAMES:
        msg = f"unknown coefficient {config.mutate!r}"
        raise click.UsageError(msg, ctx=ctx)
    return config


def _recorded_parameters(config: RunConfig) -> list[tuple[str, Any]]:
    recorded = []
    for name in RECORDED_FIELDS[config.subcommand]:
        value = getattr(config, name)
        if value is None or (isinstance(value, list) and not value):
            continue
        if isinstance(value, (list, tuple)):
            value = " ".join(
                item.as_option() if isinstance(item, ParameterPoint) else format_cell(item)
                for item in value
            )
        recorded.append((name, value))
    return recorded


def emit(config: RunConfig, report: Any) -> None:
    """Serialize a report to --out (atomically) or stdout."""
    text = render(
        report,
        config.output_format,
        config.subcommand.value,
        _recorded_parameters(config),
    )
    if config.out is None:
        click.echo(text, nl=False)
    else:
        write_atomic(config.out, text)
        logger.info("report_written", path=str(config.out), format=config.output_format.value)


def run(ctx: click.Context, subcommand: Subcommand, options: dict[str, Any]) -> Any:
    config = build_config(ctx, subcommand, options)
    manager = RunManager(config)
    try:
        report = {
            Subcommand.SCAN_PUMP: manager.scan_pump,
            Subcommand.TABLE: manager.table,
            Subcommand.PROFILE: manager.profile,
            Subcommand.VALIDATE: manager.validate,
        }[subcommand]()
    except AtomLaserError as exc:
        raise click.ClickException(f"{exc.reason}: {exc}") from exc
    emit(config, report)
    return report


# Shared options --------------------------------------------------------------
Decorator = Callable[[Callable[..., Any]], Callable[..., Any]]


def _options(*decorators: Decorator) -> Decorator:
    def apply(func: Callable[..., Any]) -> Callable[..., Any]:
        for decorator in reversed(decorators):
            func = decorator(func)
        return func

    return apply


saturation_option = click.option("--is", "i_s", type=float, help="Saturation parameter I_s.")
cutoff_option = click.option("--cutoff", type=int, help="Fock cutoff of oracle solves.")
theta_option = click.option("--theta", type=float, help="Thermal/generating crossover factor.")
oracle_option = click.option("--with-oracle", is_flag=True, help="Add master-equation results.")
heavy_option = click.option("--heavy", is_flag=True, help="Allow table-scale oracle solves.")


def output_options(default: OutputFormat = OutputFormat.CSV) -> Decorator:
    return _options(
        click.option(
            "--format",
            "output_format",
            type=click.Choice([f.value for f in OutputFormat]),
            default=default.value,
            show_default=True,
            help="Output format.",
        ),
        click.option(
            "--out",
            type=click.Path(dir_okay=False, path_type=Path),
            help="Write to this file instead of stdout.",
        ),
    )


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="atomlaser")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    help="Log level (logs go to stderr).",
)
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Flat key=value run file; command-line flags win.",
)
@click.pass_context
def cli(ctx: click.Context, log_level: str | None, config_path: Path | None) -> None:
    """Stationary photon statistics of the single-atom laser."""
    setup_logging(log_level)
    ctx.ensure_object(dict)
    ctx.obj["file_values"] = read_config_file(config_path) if config_path else {}


@cli.command("scan-pump")
@saturation_option
@click.option("--c", "c", type=float, multiple=True, help="Cooperativity; repeat for several.")
@click.option("--r", type=float, help="Single pump value.")
@click.option("--r-range", type=(float, float), help="Inclusive pump range LOW HIGH.")
@click.option("--r-step", type=float, help="Pump step of --r-range.")
@click.option("--r-ratio", type=float, help="Use r = c / R for every --c.")
@oracle_option
@heavy_option
@cutoff_option
@theta_option
@click.option("--workers", type=int, default=1, show_default=True, help="Process-pool size.")
@output_options()
@click.pass_context
def scan_pump(ctx: click.Context, **options: Any) -> None:
    """Sweep the pump: linear theory, asymptotic Q(I) and optional oracle per r."""
    run(ctx, Subcommand.SCAN_PUMP, options)


@cli.command("table")
@heavy_option
@cutoff_option
@output_options()
@click.pass_context
def table(ctx: click.Context, **options: Any) -> None:
    """The three-column comparison of linear theory, Q0 and the Gaussian."""
    run(ctx, Subcommand.TABLE, options)


@cli.command("profile")
@saturation_option
@click.option("--c", "c", type=float, multiple=True, help="Cooperativity.")
@click.option("--r", type=float, help="Pump parameter.")
@click.option("--gaussian/--no-gaussian", default=True, show_default=True)
@oracle_option
@heavy_option
@cutoff_option
@theta_option
@output_options()
@click.pass_context
def profile(ctx: click.Context, **options: Any) -> None:
    """Q(I) curves of one parameter point on a shared grid."""
    run(ctx, Subcommand.PROFILE, options)


@cli.command("validate")
@click.option(
    "--point",
    "points",
    multiple=True,
    metavar="IS,C,R[,N]",
    help="Replace the default validation points; repeatable.",
)
@click.option("--mutate", hidden=True, help="Perturb one coefficient by 1%.")
@output_options(OutputFormat.JSON)
@click.pass_context
def validate(ctx: click.Context, **options: Any) -> None:
    """Run the identity and invariant checks; exit 1 on any failure."""
    report = run(ctx, Subcommand.VALIDATE, options)
    if not report.passed:
        ctx.exit(1)


@cli.command("schema")
def schema() -> None:
    """Print the JSON schema of every report."""
    click.echo(json.dumps(report_schemas(), indent=2, sort_keys=True))


if __name__ == "__main__":
    cli()
