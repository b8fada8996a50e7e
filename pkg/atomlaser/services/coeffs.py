"""Coefficient table b_ik, the polynomials f_nu(I) and their labelled roots."""

from __future__ import annotations

import numpy as np

from ..models.records import ZERO_MULTIPLICITY, PolySet, RootCatalog
from ..models.schemas import CoeffTable, ReducedParams
from ..utils.errors import DegenerateRegimeError
from ..utils.logging import get_logger
from ..utils.numerics import real_roots

logger = get_logger(__name__)


def coefficients(params: ReducedParams) -> CoeffTable:
    """Evaluate b_ik at (omega, eta, tau)."""
    w, e, t = params.omega, params.eta, params.tau
    s = w + e + t
    return CoeffTable(
        b02=-2 * t**3 * s,
        b03=4 * t**4,
        b11=-12 * t**3 * s,
        b12=2 * t**3 * (7 * t - 3 * w - 3 * e),
        b13=12 * t**4,
        b20=-12 * t**3 * s,
        b21=-(t**2) * (26 * e * t - 3 * e**2 + 21 * t**2 - 6 * e * w + 26 * t * w - 3 * w**2),
        b22=12 * t**3 * (4 * t - w - e),
        b23=12 * t**4,
        b30=-2 * t**2 * (8 * e * t - 3 * e**2 + 15 * t**2 - 6 * e * w + 8 * t * w - 3 * w**2),
        b31=-2
        * t
        * (
            e
            + t
            - 3 * e**2 * t
            + 13 * e * t**2
            + w
            - 6 * e * t * w
            + 13 * t**2 * w
            - 3 * t * w**2
        ),
        b32=2 * t**2 * (2 - 7 * e * t + 23 * t**2 - 7 * t * w),
        b33=4 * t**4,
        b40=(
            -(e**3) * t
            + e**2 * (8 * t**2 - 1 - 3 * t * w)
            - t * (3 * t + 24 * t**3 + 3 * w - t**2 * w - 8 * t * w**2 + w**3)
            + e * (t**3 - w + 16 * t**2 * w - t * (4 + 3 * w**2))
        ),
        b41=t
        * (
            5 * e**2 * t
            + 15 * t**3
            - 4 * w
            - 20 * t**2 * w
            - 2 * e * (1 + 10 * t**2 - 5 * t * w)
            + t * (5 * w**2 - 2)
        ),
        b42=2 * t**2 * (4 - 3 * e * t + 7 * t**2 - 3 * t * w),
        b50=(
            -(e**3) * t
            - 6 * t**4
            + 5 * t**3 * w
            + w**2
            - t * w**3
            + e**2 * (2 * t**2 - 1 - 3 * t * w)
            + e * t * (5 * t**2 - 4 + 4 * t * w - 3 * w**2)
            + t**2 * (2 * w**2 - 3)
        ),
        b51=2
        * t
        * (e**2 * t + 3 * t**3 - 2 * w - 4 * t**2 * w + t * w**2 + 2 * e * t * (w - 2 * t)),
        b52=4 * t**2,
    )


def polynomials(table: CoeffTable) -> PolySet:
    """Assemble f_0..f_5 (ascending coefficients) from the table."""
    b = table
    return PolySet(
        coefficients=(
            np.array([b.b50, b.b51, b.b52]),
            np.array([b.b40, b.b41, b.b42]),
            np.array([b.b30, b.b31, b.b32, b.b33]),
            np.array([b.b20, b.b21, b.b22, b.b23]),
            np.array([0.0, b.b11, b.b12, b.b13]),
            np.array([0.0, 0.0, b.b02, b.b03]),
        ),
    )


def roots(polys: PolySet, table: CoeffTable) -> RootCatalog:
    """Extract and label the real roots of every f_nu and the thermal cubic.

    Raises:
        DegenerateRegimeError: If b42 or b52 vanishes

    """
    if table.b42 == 0 or table.b52 == 0:
        msg = f"degenerate leading coefficients b42={table.b42}, b52={table.b52}"
        raise DegenerateRegimeError(msg)

    factor_roots = tuple(
        real_roots(polys[nu][ZERO_MULTIPLICITY[nu] :]) for nu in range(len(polys))
    )
    leading = tuple(float(polys[nu][-1]) for nu in range(len(polys)))
    thermal = real_roots([table.b50, table.b40, table.b30, table.b20])

    catalog = RootCatalog(leading=leading, factor_roots=factor_roots, thermal_cubic=thermal)
    logger.debug(
        "roots_extracted",
        i_minus4=catalog.i_minus4,
        i_plus4=catalog.i_plus4,
        i_minus5=catalog.i_minus5,
        i_plus5=catalog.i_plus5,
        thermal_candidates=len(catalog.thermal_candidates),
    )
    return catalog


def analyze(params: ReducedParams) -> tuple[CoeffTable, PolySet, RootCatalog]:
    """Coefficients, polynomials and roots at one parameter point."""
    table = coefficients(params)
    polys = polynomials(table)
    return table, polys, roots(polys, table)
