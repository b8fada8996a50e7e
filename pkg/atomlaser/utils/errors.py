"""Exception hierarchy for the atomlaser package."""

from __future__ import annotations


class AtomLaserError(Exception):
    """Base class for all library errors.

    Attributes:
        reason: Short machine-readable code, used in scan output rows

    """

    reason = "error"


class DomainError(AtomLaserError, ValueError):
    """Input outside the mathematical domain of an operation."""

    reason = "domain"


class RegimeError(AtomLaserError):
    """Formula evaluated outside the parameter regime where it holds."""

    reason = "regime"


class NoLasingRegimeError(RegimeError):
    """No threshold exists (cooperativity c <= 8)."""

    reason = "no_lasing"


class DegenerateRegimeError(RegimeError):
    """Leading coefficient b42 or b52 vanishes."""

    reason = "degenerate"


class RootSelectionError(AtomLaserError):
    """No unique admissible root could be selected."""

    reason = "root_selection"


class IntegrationError(AtomLaserError):
    """Quadrature did not meet its tolerance or the integral diverges."""

    reason = "integration"


class NumericalError(AtomLaserError):
    """Linear solve failed or produced non-finite values."""

    reason = "numerical"


class CutoffTooSmallError(AtomLaserError):
    """Fock cutoff too small for the stationary photon distribution."""

    reason = "cutoff"

    def __init__(self, cutoff: int, tail_mass: float) -> None:
        super().__init__(
            f"tail mass {tail_mass:.3e} at cutoff {cutoff} exceeds the limit",
        )
        self.cutoff = cutoff
        self.tail_mass = tail_mass
