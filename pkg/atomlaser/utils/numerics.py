"""Numerical kernels shared by the analytic and master-equation code.

Real roots of polynomials up to degree three, adaptive quadrature split at
singular points, and Poisson-kernel sums evaluated in the log domain.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from itertools import pairwise

import numpy as np
from numpy.polynomial import polynomial as npoly
from numpy.typing import ArrayLike
from scipy import integrate as sp_integrate
from scipy.special import gammaln, logsumexp, xlogy

from .config import settings
from .errors import DomainError, IntegrationError
from .logging import get_logger

logger = get_logger(__name__)

ILL_CONDITIONED = 1e-12
LEADING_FLOOR = 1e-300
MAX_DERIVATIVE_ORDER = 5
_IMAG_TOL = 1e-6


# Polynomial roots -----------------------------------------------------------
@dataclass(frozen=True)
class PolyRoots:
    """Roots of a real polynomial of degree at most three.

    Attributes:
        real: Real roots in ascending order, repeated by multiplicity
        nonreal: Complex roots, as conjugate pairs
        degree: Degree after dropping vanishing leading coefficients

    """

    real: tuple[float, ...]
    nonreal: tuple[complex, ...] = ()
    degree: int = 0

    @property
    def all(self) -> tuple[complex, ...]:
        """Every root, real ones first."""
        return tuple(complex(x) for x in self.real) + self.nonreal

    @property
    def has_complex(self) -> bool:
        return bool(self.nonreal)

    def negative(self) -> tuple[float, ...]:
        return tuple(x for x in self.real if x < 0)


def real_roots(coeffs: Sequence[float]) -> PolyRoots:
    """Find the roots of a real polynomial of degree <= 3.

    Closed forms (stable quadratic formula, trigonometric or Cardano cubic)
    are used unless the discriminant is within a relative 1e-12 of zero, in
    which case the companion-matrix eigenvalues are taken. Real roots are
    polished with Newton steps.

    Args:
        coeffs: Coefficients in ascending order, c0 + c1 x + c2 x^2 + c3 x^3

    Returns:
        The real roots (sorted) and the complex ones, flagged separately

    Raises:
        DomainError: If the polynomial is all-zero, non-finite or of degree > 3

    """
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
        msg = "polynomial coefficients must be a finite 1-d sequence"
        raise DomainError(msg)
    significant = np.flatnonzero(np.abs(c) > LEADING_FLOOR)
    if significant.size == 0:
        msg = "all-zero polynomial has no roots"
        raise DomainError(msg)
    c = c[: significant[-1] + 1]
    degree = c.size - 1
    if degree > 3:
        msg = f"degree {degree} polynomials are not supported"
        raise DomainError(msg)

    if degree == 0:
        return PolyRoots(real=(), degree=0)
    if degree == 1:
        real, nonreal = [-c[0] / c[1]], []
    elif degree == 2:
        real, nonreal = _quadratic(c)
    else:
        real, nonreal = _cubic(c)

    polished = sorted(_polish(c, x) for x in real)
    return PolyRoots(real=tuple(polished), nonreal=tuple(nonreal), degree=degree)


def _quadratic(c: np.ndarray) -> tuple[list[float], list[complex]]:
    c0, c1, c2 = (float(x) for x in c)
    disc = c1 * c1 - 4.0 * c2 * c0
    if abs(disc) <= ILL_CONDITIONED * (c1 * c1 + abs(4.0 * c2 * c0)):
        return _companion(c)
    if disc > 0:
        q = -0.5 * (c1 + math.copysign(math.sqrt(disc), c1))
        return [q / c2, c0 / q], []
    re = -c1 / (2.0 * c2)
    im = math.sqrt(-disc) / (2.0 * abs(c2))
    return [], [complex(re, im), complex(re, -im)]


def _cubic(c: np.ndarray) -> tuple[list[float], list[complex]]:
    a, b, d = (float(x) for x in c[2::-1] / c[3])
    shift = -a / 3.0
    p = b - a * a / 3.0
    q = 2.0 * a**3 / 27.0 - a * b / 3.0 + d
    half_q, third_p = q / 2.0, p / 3.0
    delta = half_q**2 + third_p**3
    if abs(delta) <= ILL_CONDITIONED * (half_q**2 + abs(third_p) ** 3):
        return _companion(c)

    if delta < 0:
        m = 2.0 * math.sqrt(-third_p)
        phi = math.acos(max(-1.0, min(1.0, 3.0 * q / (p * m)))) / 3.0
        return [m * math.cos(phi - 2.0 * math.pi * k / 3.0) + shift for k in range(3)], []

    s = -half_q
    u = np.cbrt(s + math.copysign(math.sqrt(delta), s))
    v = -third_p / u if u != 0 else 0.0
    t = float(u + v)
    re = -t / 2.0 + shift
    im = math.sqrt(3.0) / 2.0 * abs(float(u - v))
    return [t + shift], [complex(re, im), complex(re, -im)]


def _companion(c: np.ndarray) -> tuple[list[float], list[complex]]:
    logger.debug("companion_fallback", degree=c.size - 1)
    real: list[float] = []
    nonreal: list[complex] = []
    for z in npoly.polyroots(c):
        if abs(z.imag) <= _IMAG_TOL * max(1.0, abs(z)):
            real.append(float(z.real))
        else:
            nonreal.append(complex(z))
    return real, nonreal


def _polish(c: np.ndarray, x: float, steps: int = 3) -> float:
    deriv = npoly.polyder(c)
    best = abs(npoly.polyval(x, c))
    for _ in range(steps):
        slope = npoly.polyval(x, deriv)
        if slope == 0 or best == 0:
            break
        candidate = x - npoly.polyval(x, c) / slope
        value = abs(npoly.polyval(candidate, c))
        if value >= best:
            break
        x, best = float(candidate), value
    return float(x)


# Quadrature -----------------------------------------------------------------
@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    pieces: int


@dataclass(frozen=True)
class Quadrature:
    """Adaptive Gauss-Kronrod quadrature split at flagged points.

    Attributes:
        abs_tol: Absolute tolerance of the whole integral
        rel_tol: Relative tolerance of the whole integral
        panels: Maximum number of subintervals per piece
        singular_points: Integrable singularities; pieces end there so the
            extrapolating rule only ever sees endpoint singularities

    """

    abs_tol: float = field(default_factory=lambda: settings.quad_abs_tol)
    rel_tol: float = field(default_factory=lambda: settings.quad_rel_tol)
    panels: int = field(default_factory=lambda: settings.quad_limit)
    singular_points: tuple[float, ...] = ()

    def integrate(
        self,
        func: Callable[[float], float],
        lower: float,
        upper: float,
        breakpoints: Sequence[float] = (),
    ) -> QuadratureResult:
        """Integrate func over [lower, upper]; upper may be infinite.

        Raises:
            IntegrationError: If the result is not finite or the error
                estimate exceeds max(abs_tol, rel_tol * |value|)

        """
        inner = {
            float(x)
            for x in (*self.singular_points, *breakpoints)
            if lower < x < upper and math.isfinite(x)
        }
        edges = [lower, *sorted(inner), upper]
        piece_abs = self.abs_tol / (len(edges) - 1)

        total, error = 0.0, 0.0
        for lo, hi in pairwise(edges):
            out = sp_integrate.quad(
                func,
                lo,
                hi,
                epsabs=piece_abs,
                epsrel=self.rel_tol,
                limit=self.panels,
                full_output=1,
            )
            value, estimate = float(out[0]), float(out[1])
            if not (math.isfinite(value) and math.isfinite(estimate)):
                msg = f"non-finite integral on [{lo}, {hi}]"
                raise IntegrationError(msg)
            if len(out) > 3:
                logger.debug("quad_not_converged", lower=lo, upper=hi, message=out[3])
            total += value
            error += estimate

        tolerance = max(self.abs_tol, self.rel_tol * abs(total))
        if error > tolerance:
            msg = f"quadrature error {error:.3e} exceeds tolerance {tolerance:.3e}"
            raise IntegrationError(msg)
        return QuadratureResult(value=total, error=error, pieces=len(edges) - 1)


def integrate(
    func: Callable[[float], float],
    lower: float,
    upper: float,
    singular_points: Sequence[float] = (),
    breakpoints: Sequence[float] = (),
    abs_tol: float | None = None,
    rel_tol: float | None = None,
) -> QuadratureResult:
    """Integrate func over [lower, upper] with the configured tolerances."""
    rule = Quadrature(
        abs_tol=settings.quad_abs_tol if abs_tol is None else abs_tol,
        rel_tol=settings.quad_rel_tol if rel_tol is None else rel_tol,
        singular_points=tuple(singular_points),
    )
    return rule.integrate(func, lower, upper, breakpoints)


# Poisson-kernel sums --------------------------------------------------------
def forward_differences(coeffs: ArrayLike, order: int) -> np.ndarray:
    """Apply (p_n) -> (p_{n+1} - p_n) `order` times, with p beyond the end zero.

    Since d/dI [e^{-I} I^n / n!] = kernel_{n-1} - kernel_n, the k-th
    derivative of sum p_n kernel_n is sum (D^k p)_n kernel_n.
    """
    out = np.asarray(coeffs)
    for _ in range(order):
        out = np.diff(out, append=0.0)
    return out


def log_poisson_kernel(count: int, intensity: ArrayLike) -> np.ndarray:
    """Log of e^{-I} I^n / n! for n = 0..count-1, broadcast over intensity."""
    n = np.arange(count, dtype=float)
    x = np.asarray(intensity, dtype=float)[..., None]
    return xlogy(n, x) - x - gammaln(n + 1.0)


def log_poisson_sum(
    coeffs: ArrayLike,
    intensity: ArrayLike,
) -> tuple[np.ndarray, np.ndarray]:
    """Log-magnitude and sign of sum_n p_n e^{-I} I^n / n! for real p_n."""
    c = np.asarray(coeffs, dtype=float)
    log_kernel = log_poisson_kernel(c.size, intensity)
    with np.errstate(divide="ignore"):
        log_abs, sign = logsumexp(log_kernel, axis=-1, b=c, return_sign=True)
    return np.asarray(log_abs), np.asarray(sign)


def poisson_sum(
    coeffs: ArrayLike,
    intensity: ArrayLike,
    order: int = 0,
) -> np.ndarray:
    """Evaluate sum_n p_n d^k/dI^k [e^{-I} I^n / n!].

    Args:
        coeffs: p_0..p_N, real or complex
        intensity: I >= 0, scalar or array
        order: Derivative order k, 0..5

    Returns:
        Array shaped like intensity (complex if the coefficients are)

    """
    if not 0 <= order <= MAX_DERIVATIVE_ORDER:
        msg = f"derivative order must be in 0..{MAX_DERIVATIVE_ORDER}"
        raise DomainError(msg)
    c = forward_differences(coeffs, order)
    if np.iscomplexobj(c):
        return _signed_sum(c.real, intensity) + 1j * _signed_sum(c.imag, intensity)
    return _signed_sum(c, intensity)


def _signed_sum(coeffs: np.ndarray, intensity: ArrayLike) -> np.ndarray:
    if not np.any(coeffs):
        return np.zeros(np.shape(intensity))
    log_abs, sign = log_poisson_sum(coeffs, intensity)
    return sign * np.exp(log_abs)
