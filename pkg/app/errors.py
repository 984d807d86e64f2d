"""
Exception types.

All library errors derive from CoarseError. Errors caused by malformed input
also derive from ValueError.
"""

from typing import Any, Optional


class CoarseError(Exception):
    """Base class for every error raised by the toolkit."""


class AsymmetricInput(CoarseError, ValueError):
    """Distance table is not square or not symmetric within tolerance."""


class NegativeDistance(CoarseError, ValueError):
    """Distance table has a negative entry or a nonzero diagonal."""


class TriangleViolation(CoarseError, ValueError):
    """Strict metric requested but the triangle inequality fails."""


class MetricAxiomViolation(CoarseError, AssertionError):
    """A constructed space fails an axiom it is guaranteed to satisfy."""


class EmptySubset(CoarseError, ValueError):
    """A nonempty subset selection was required."""


class SizeLimit(CoarseError):
    """A configured size cap would be exceeded."""


class RingMismatch(CoarseError, ValueError):
    """Operands live over different rings, or the ring is not allowed here."""


class DimensionMismatch(CoarseError, ValueError):
    """Vector or matrix dimensions do not agree."""


class NotASubcomplex(CoarseError, ValueError):
    """Inclusion requested between complexes that are not nested."""


class MissingBasepoint(CoarseError, ValueError):
    """The operation needs a basepoint and the space has none."""


class EmptyTower(CoarseError):
    """No tower stage survived construction."""


class EmptyComplex(CoarseError, ValueError):
    """Cohomology of an empty complex was requested."""


class InsufficientStages(CoarseError, ValueError):
    """The tower is too short for the requested window and stability."""


class ComplementExhausted(CoarseError):
    """X - N_r(A) is empty for some requested radius."""


class CoverMismatch(CoarseError, ValueError):
    """A cover does not cover the space or is not adapted to the cochain."""


class FillingNotFound(CoarseError):
    """No filling chain exists inside the largest allowed neighbourhood."""

    def __init__(self, simplex: Any, cap: float, message: Optional[str] = None):
        self.simplex = simplex
        self.cap = cap
        super().__init__(message or f"No filling for {simplex} within radius {cap}")
