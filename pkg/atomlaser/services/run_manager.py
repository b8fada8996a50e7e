"""Run manager coordinating the computations behind each CLI subcommand."""

from __future__ import annotations

import uuid
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..models.records import QProfile
from ..models.requests import ParameterPoint, RunConfig
from ..models.responses import (
    ProfilePoint,
    ProfileReport,
    ScanReport,
    ScanRow,
    TableColumn,
    TableReport,
    ValidationReport,
)
from ..utils.config import settings
from ..utils.errors import AtomLaserError
from ..utils.logging import ContextLogger, get_logger
from .coeffs import analyze
from .linear_theory import linear_theory
from .oracle import (
    cutoff_policy,
    is_heavy,
    moments_exact,
    q_from_state,
    solve_converged,
)
from .params import from_dimensionless, reduced
from .qsolution import asymptotic_profile, moments, q_gaussian, q_generating
from .validation import DEFAULT_POINTS, run_validation

logger = get_logger(__name__)

# Printed saturation label, c and r of the comparison table columns.
TABLE_COLUMNS: tuple[tuple[str, float, float], ...] = (
    ("95.95", 100.0, 20.0),
    ("8.83", 1000.0, 200.0),
    ("0.87", 1e4, 2000.0),
)
TABLE_INTENSITY = 700.0


def table_saturation(c: float, r: float, intensity: float = TABLE_INTENSITY) -> float:
    """I_s giving the classical intensity `intensity` at (c, r)."""
    return 2.0 * intensity / ((r - 1.0) - (r + 1.0) ** 2 / c)


@dataclass(frozen=True)
class ScanTask:
    """Picklable unit of work for the scan pool."""

    point: ParameterPoint
    with_oracle: bool
    heavy: bool
    theta: float | None


class ReasonLog:
    """Collects column:code pairs for the reason cell of an output row."""

    def __init__(self) -> None:
        self.items: list[str] = []

    def add(self, column: str, code: str) -> None:
        self.items.append(f"{column}:{code}")

    def render(self) -> str | None:
        return ";".join(self.items) or None


def _oracle_moments(
    point: ParameterPoint,
    heavy: bool,
    reasons: ReasonLog,
) -> tuple[float | None, float | None, int | None]:
    rates = from_dimensionless(point.r, point.i_s, point.c)
    cutoff = point.cutoff or cutoff_policy(rates)
    if is_heavy(cutoff) and not heavy:
        reasons.add("oracle", "heavy")
        return None, None, None
    try:
        state = solve_converged(rates, cutoff)
    except AtomLaserError as exc:
        reasons.add("oracle", exc.reason)
        return None, None, None
    exact = moments_exact(state)
    if exact.mandel_qf is None:
        reasons.add("qf_oracle", "vacuum")
    return exact.mean_photon, exact.mandel_qf, state.cutoff


def scan_row(task: ScanTask) -> ScanRow:
    """Compute one row of scan-pump; failures leave empty cells and a reason."""
    point = task.point
    row = ScanRow(i_s=point.i_s, c=point.c, r=point.r)
    reasons = ReasonLog()
    with ContextLogger(r=point.r, c=point.c, i_s=point.i_s):
        try:
            params = reduced(point.r, point.i_s, point.c)
        except AtomLaserError as exc:
            reasons.add("row", exc.reason)
            return row.model_copy(update={"reason": reasons.render()})

        lin = linear_theory(params)
        update: dict[str, object] = {"i0": lin.i0, "qf_lin": lin.qf_lin}
        if lin.qf_lin is None:
            reasons.add("qf_lin", "no_lasing" if params.c <= 8 else "regime")

        try:
            profile = asymptotic_profile(params, theta=task.theta)
            asym = moments(profile)
            update |= {
                "n_asym": asym.mean_photon,
                "qf_asym": asym.mandel_qf,
                "branch_kind": profile.kind.value,
            }
            if asym.mandel_qf is None:
                reasons.add("qf_asym", "vacuum")
        except AtomLaserError as exc:
            reasons.add("asym", exc.reason)

        if task.with_oracle:
            n_oracle, qf_oracle, cutoff = _oracle_moments(point, task.heavy, reasons)
            update |= {"n_oracle": n_oracle, "qf_oracle": qf_oracle, "cutoff": cutoff}

    update["reason"] = reasons.render()
    return row.model_copy(update=update)


class RunManager:
    """Executes one RunConfig."""

    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.run_id = uuid.uuid4().hex[:8]

    def _workers(self) -> int:
        return max(self.config.workers, settings.workers, 1)

    def scan_pump(self) -> ScanReport:
        """Rows in (c, r) input order, whatever order the workers finish in."""
        config = self.config
        tasks = [
            ScanTask(
                point=point,
                with_oracle=config.with_oracle,
                heavy=config.heavy,
                theta=config.theta,
            )
            for point in config.scan_points()
        ]
        workers = min(self._workers(), len(tasks)) if tasks else 1
        with ContextLogger(run_id=self.run_id):
            logger.info("scan_started", rows=len(tasks), workers=workers)
            if workers > 1:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    rows = list(pool.map(scan_row, tasks))
            else:
                rows = [scan_row(task) for task in tasks]
            logger.info("scan_finished", rows=len(rows))
        return ScanReport(with_oracle=config.with_oracle, rows=rows)

    def table(self) -> TableReport:
        """The three saturated columns with linear theory, Q0, Gaussian and optional oracle."""
        columns = []
        with ContextLogger(run_id=self.run_id):
            for label, c, r in TABLE_COLUMNS:
                columns.append(self._table_column(label, table_saturation(c, r), c, r))
        return TableReport(heavy=self.config.heavy, columns=columns)

    def _table_column(self, label: str, i_s: float, c: float, r: float) -> TableColumn:
        reasons = ReasonLog()
        params = reduced(r, i_s, c)
        lin = linear_theory(params)
        update: dict[str, object] = {"i0": lin.i0, "qf_lin": lin.qf_lin}

        try:
            table, _polys, catalog = analyze(params)
            q0 = moments(q_generating(params, catalog, table))
            update |= {"n_q0": q0.mean_photon, "qf_q0": q0.mandel_qf}
            gaussian = q_gaussian(params, lin, catalog)
            update |= {
                "sigma2": gaussian.descriptor["variance"],
                "qf_gaussian": moments(gaussian).mandel_qf,
            }
        except AtomLaserError as exc:
            reasons.add("asym", exc.reason)

        if self.config.heavy:
            point = ParameterPoint(i_s=i_s, c=c, r=r, cutoff=self.config.cutoff)
            n_oracle, qf_oracle, _cutoff = _oracle_moments(point, heavy=True, reasons=reasons)
            update |= {"n_oracle": n_oracle, "qf_oracle": qf_oracle}

        update["reason"] = reasons.render()
        column = TableColumn(label=label, i_s=i_s, c=c, r=r)
        return column.model_copy(update=update)

    def profile(self) -> ProfileReport:
        """Asymptotic, Gaussian and oracle Q(I) sampled on one shared grid."""
        config = self.config
        point = ParameterPoint(
            i_s=float(config.i_s),  # type: ignore[arg-type]
            c=config.c[0],
            r=float(config.r),  # type: ignore[arg-type]
            cutoff=config.cutoff,
        )
        params = reduced(point.r, point.i_s, point.c)
        curves: dict[str, QProfile] = {}
        errors: dict[str, str] = {}

        try:
            curves["q_asym"] = asymptotic_profile(params, theta=config.theta)
        except AtomLaserError as exc:
            errors["q_asym"] = exc.reason
        if config.gaussian:
            try:
                _table, _polys, catalog = analyze(params)
                curves["q_gaussian"] = q_gaussian(params, linear_theory(params), catalog)
            except AtomLaserError as exc:
                errors["q_gaussian"] = exc.reason
        if config.with_oracle:
            rates = from_dimensionless(point.r, point.i_s, point.c)
            cutoff = point.cutoff or cutoff_policy(rates)
            if is_heavy(cutoff) and not config.heavy:
                errors["q_oracle"] = "heavy"
            else:
                try:
                    curves["q_oracle"] = q_from_state(solve_converged(rates, cutoff))
                except AtomLaserError as exc:
                    errors["q_oracle"] = exc.reason

        grid = _shared_grid(list(curves.values()))
        sampled = {name: profile(grid) for name, profile in curves.items()}
        points = [
            ProfilePoint(i=float(x), **{name: float(values[k]) for name, values in sampled.items()})
            for k, x in enumerate(grid)
        ]
        asym = curves.get("q_asym")
        return ProfileReport(
            i_s=point.i_s,
            c=point.c,
            r=point.r,
            branch_kind=asym.kind.value if asym else None,
            errors=errors,
            norm_constants={name: profile.norm_constant for name, profile in curves.items()},
            points=points,
        )

    def validate(self) -> ValidationReport:
        points = self.config.points or list(DEFAULT_POINTS)
        with ContextLogger(run_id=self.run_id):
            return run_validation(points, mutate=self.config.mutate)


def _shared_grid(curves: list[QProfile]) -> np.ndarray:
    """Uniform grid over the widest support, plus every curve's peak."""
    if not curves:
        return np.zeros(0)
    upper = max(profile.i_max for profile in curves)
    grid = np.linspace(0.0, upper, settings.profile_points)
    extra = [profile.peak for profile in curves if 0 < profile.peak < upper]
    return np.union1d(grid, np.asarray(extra, dtype=float))
