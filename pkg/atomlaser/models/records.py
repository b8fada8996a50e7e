"""Array-backed records: polynomials, root catalogs, Q profiles, steady states."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.polynomial import polynomial as npoly
from numpy.typing import ArrayLike

from ..utils.config import settings
from ..utils.errors import RootSelectionError
from ..utils.numerics import PolyRoots
from .schemas import RateSet, ReducedParams

# Power of I factored out of f_nu before root extraction, nu = 0..5.
ZERO_MULTIPLICITY: tuple[int, ...] = (0, 0, 0, 0, 1, 2)


@dataclass(frozen=True, eq=False)
class PolySet:
    """The six polynomials f_0..f_5 of sum_nu f_nu(I) Q^(nu)(I) = 0.

    Attributes:
        coefficients: Ascending coefficient arrays, index nu

    """

    coefficients: tuple[np.ndarray, ...]

    def __getitem__(self, nu: int) -> np.ndarray:
        return self.coefficients[nu]

    def __len__(self) -> int:
        return len(self.coefficients)

    def degree(self, nu: int) -> int:
        return int(np.flatnonzero(self.coefficients[nu])[-1])

    def evaluate(self, nu: int, intensity: ArrayLike) -> np.ndarray:
        return npoly.polyval(np.asarray(intensity, dtype=float), self.coefficients[nu])


@dataclass(frozen=True, eq=False)
class RootCatalog:
    """Labelled roots of f_0..f_5 and of the thermal cubic.

    Labels follow sorted real value: the "minus" root is the smaller one.
    f_4 and f_5 have the factors I and I^2 removed before root extraction.

    Attributes:
        leading: Leading coefficient of each f_nu (b52, b42, b33, b23, b13, b03)
        factor_roots: Roots of f_nu / I^m for nu = 0..5
        thermal_cubic: Roots of b50 + b40 x + b30 x^2 + b20 x^3

    """

    leading: tuple[float, ...]
    factor_roots: tuple[PolyRoots, ...]
    thermal_cubic: PolyRoots

    def _pair(self, nu: int) -> tuple[float, float] | None:
        roots = self.factor_roots[nu].real
        if len(roots) != 2:
            return None
        return roots[0], roots[1]

    @property
    def i_minus4(self) -> float | None:
        pair = self._pair(1)
        return pair[0] if pair else None

    @property
    def i_plus4(self) -> float | None:
        pair = self._pair(1)
        return pair[1] if pair else None

    @property
    def i_minus5(self) -> float | None:
        pair = self._pair(0)
        return pair[0] if pair else None

    @property
    def i_plus5(self) -> float | None:
        pair = self._pair(0)
        return pair[1] if pair else None

    @property
    def i_00(self) -> float | None:
        roots = self.factor_roots[5].real
        return roots[0] if roots else None

    def _labelled(self, nu: int, index: int) -> complex | None:
        roots = self.factor_roots[nu].all
        return roots[index] if index < len(roots) else None

    # Roots of f_4 / I, f_3 and f_2; real ones come first, ascending, and a
    # nonzero imaginary part marks a complex root.
    @property
    def i_11(self) -> complex | None:
        return self._labelled(4, 0)

    @property
    def i_12(self) -> complex | None:
        return self._labelled(4, 1)

    @property
    def i_21(self) -> complex | None:
        return self._labelled(3, 0)

    @property
    def i_22(self) -> complex | None:
        return self._labelled(3, 1)

    @property
    def i_23(self) -> complex | None:
        return self._labelled(3, 2)

    @property
    def i_31(self) -> complex | None:
        return self._labelled(2, 0)

    @property
    def i_32(self) -> complex | None:
        return self._labelled(2, 1)

    @property
    def i_33(self) -> complex | None:
        return self._labelled(2, 2)

    @property
    def decay_ratio(self) -> float:
        """b52/b42."""
        return self.leading[0] / self.leading[1]

    @property
    def thermal_candidates(self) -> tuple[float, ...]:
        return self.thermal_cubic.negative()

    @property
    def thermal_root(self) -> float:
        """The negative real root lambda of the thermal cubic.

        Raises:
            RootSelectionError: If there is no negative real root, or several

        """
        candidates = self.thermal_candidates
        if len(candidates) != 1:
            msg = f"expected one negative thermal root, found {len(candidates)}"
            raise RootSelectionError(msg)
        return candidates[0]

    @property
    def thermal_scale(self) -> float:
        """a = 1/lambda, the scale of Q_1(I) = N_0 exp(I/a)."""
        return 1.0 / self.thermal_root

    def expand(self, nu: int) -> np.ndarray:
        """Rebuild the ascending coefficients of f_nu from its factored form."""
        roots = [*self.factor_roots[nu].all, *([0.0] * ZERO_MULTIPLICITY[nu])]
        return self.leading[nu] * np.real(npoly.polyfromroots(roots))


class ProfileKind(str, Enum):
    """Provenance of a Q(I) profile."""

    GENERATING = "generating"
    THERMAL = "thermal"
    GAUSSIAN = "gaussian"
    ORACLE = "oracle"


@dataclass(frozen=True, eq=False)
class QProfile:
    """A phase-averaged Q(I) profile on I >= 0.

    The density is held as an unnormalized log-density plus log N_0 so that
    exponents of several hundred never overflow.

    Attributes:
        kind: Which solution produced the profile
        log_density: Unnormalized log Q(I), vectorized
        i_max: Upper end of the support carrying all but a negligible tail
        params: Parameter point, when the profile comes from one
        log_norm: log N_0, added to log_density to normalize
        normalized: Whether log_norm has been fixed by quadrature or trace
        peak: Location of the density maximum
        singular_points: Points where the density vanishes or is singular
        descriptor: Closed-form data (exponents, roots, variance)
        derivative: Normalized k-th derivative, when available analytically

    """

    kind: ProfileKind
    log_density: Callable[[ArrayLike], np.ndarray]
    i_max: float
    params: ReducedParams | None = None
    log_norm: float = 0.0
    normalized: bool = False
    peak: float = 0.0
    singular_points: tuple[float, ...] = ()
    descriptor: dict[str, float] = field(default_factory=dict)
    derivative: Callable[[ArrayLike, int], np.ndarray] | None = None

    def __call__(self, intensity: ArrayLike) -> np.ndarray:
        with np.errstate(under="ignore"):
            return np.exp(self.log_density(intensity) + self.log_norm)

    @property
    def norm_constant(self) -> float:
        """N_0; may underflow for sharply peaked profiles, see log_norm."""
        return math.exp(self.log_norm) if self.log_norm < 700 else math.inf

    @property
    def breakpoints(self) -> tuple[float, ...]:
        inside = (x for x in (self.peak, *self.singular_points) if 0 < x < self.i_max)
        return tuple(sorted(set(inside)))

    @property
    def grid(self) -> np.ndarray:
        return self.sample_grid(settings.profile_points)

    @property
    def values(self) -> np.ndarray:
        return self(self.grid)

    def sample_grid(self, points: int) -> np.ndarray:
        base = np.linspace(0.0, self.i_max, points)
        return np.union1d(base, np.asarray(self.breakpoints, dtype=float))


@dataclass(frozen=True, eq=False)
class SteadyState:
    """Stationary density matrix in the truncated Fock basis.

    Block indices are photon numbers 0..cutoff; atomic level 1 is the lower
    one. rho12[n, m] = <1,n| rho |2,m>.
    """

    cutoff: int
    rates: RateSet
    rho11: np.ndarray
    rho22: np.ndarray
    rho12: np.ndarray
    rho21: np.ndarray
    residual_norm: float
    tail_mass: float
    method: str = "sector"

    @property
    def populations(self) -> np.ndarray:
        """p_n = rho11[n, n] + rho22[n, n]."""
        return np.real(np.diag(self.rho11) + np.diag(self.rho22))

    @property
    def trace(self) -> float:
        return float(np.sum(self.populations))

    @property
    def mean_photon(self) -> float:
        p = self.populations
        return float(np.dot(np.arange(p.size), p))

    @property
    def inversion(self) -> float:
        """<sigma_z> = P_2 - P_1."""
        return float(np.real(np.trace(self.rho22) - np.trace(self.rho11)))

    @property
    def min_population(self) -> float:
        return float(
            min(np.min(np.real(np.diag(self.rho11))), np.min(np.real(np.diag(self.rho22)))),
        )

    @property
    def hermiticity_error(self) -> float:
        return float(
            max(
                np.max(np.abs(self.rho11 - self.rho11.conj().T)),
                np.max(np.abs(self.rho22 - self.rho22.conj().T)),
                np.max(np.abs(self.rho21 - self.rho12.conj().T)),
            ),
        )


@dataclass(frozen=True, eq=False)
class ResidualProfile:
    """Pointwise residual of an identity, with its per-point scale.

    term_peaks holds max |b I^j Q^(nu)(I)| over the grid for every nonzero
    monomial of the identity.
    """

    grid: np.ndarray
    residual: np.ndarray
    scale: np.ndarray
    term_peaks: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def relative(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.scale > 0, np.abs(self.residual) / self.scale, 0.0)

    @property
    def max_relative(self) -> float:
        return float(np.max(self.relative)) if self.grid.size else 0.0

    @property
    def max_term_relative(self) -> float:
        """max |R| over the smallest monomial peak.

        Scaling one coefficient by 1 + eps raises it to eps or more.
        """
        peaks = self.term_peaks[self.term_peaks > 0]
        if not self.grid.size or not peaks.size:
            return 0.0
        return float(np.max(np.abs(self.residual)) / np.min(peaks))

    @property
    def argmax(self) -> float:
        return float(self.grid[int(np.argmax(self.relative))]) if self.grid.size else 0.0


@dataclass(frozen=True, eq=False)
class CoherenceProfile:
    """rho_sigma(I) = rho_21(I) + rho_12(I) sampled on a grid."""

    grid: np.ndarray
    values: np.ndarray

    @property
    def real(self) -> np.ndarray:
        return np.real(self.values)

    @property
    def imag_ratio(self) -> float:
        peak = float(np.max(np.abs(self.values))) if self.values.size else 0.0
        if peak == 0:
            return 0.0
        return float(np.max(np.abs(np.imag(self.values))) / peak)
