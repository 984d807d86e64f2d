"""
Coefficient ring interfaces.

This module contains protocol classes for the coefficient rings used by the
cochain, chain and matrix code, allowing GF(2), the rationals and the
integers to be plugged in interchangeably.
"""

from typing import Any, Iterator, Mapping, Optional, Protocol, Tuple, runtime_checkable


@runtime_checkable
class Ring(Protocol):
    """Protocol for element arithmetic in a commutative coefficient ring."""

    name: str
    zero: Any
    one: Any

    def convert(self, value: Any) -> Any:
        """Convert an int (or a rational for fields) into a ring element.

        Args:
            value: The value to convert

        Returns:
            The ring element
        """
        ...

    def is_zero(self, a: Any) -> bool:
        ...

    def add(self, a: Any, b: Any) -> Any:
        ...

    def neg(self, a: Any) -> Any:
        ...

    def mul(self, a: Any, b: Any) -> Any:
        ...

    def to_json(self, a: Any) -> Any:
        """Render an element for JSON output."""
        ...


@runtime_checkable
class Field(Ring, Protocol):
    """Protocol for a field together with its sparse vector representation.

    Vectors are indexed by nonnegative integers. Each backend chooses its own
    representation; callers only go through these methods.
    """

    def div(self, a: Any, b: Any) -> Any:
        ...

    def zero_vector(self) -> Any:
        ...

    def unit(self, index: int) -> Any:
        """The standard basis vector e_index."""
        ...

    def vector(self, entries: Mapping[int, Any]) -> Any:
        """Build a vector from a sparse mapping index -> value.

        Args:
            entries: Mapping from index to a value accepted by convert()

        Returns:
            The vector in the backend representation
        """
        ...

    def entries(self, v: Any) -> Iterator[Tuple[int, Any]]:
        """Iterate over the nonzero (index, coefficient) pairs of v in
        increasing index order."""
        ...

    def coeff(self, v: Any, index: int) -> Any:
        ...

    def pivot(self, v: Any) -> Optional[int]:
        """Lowest index with a nonzero coefficient, or None for the zero vector."""
        ...

    def axpy(self, y: Any, a: Any, x: Any) -> Any:
        """Return y + a*x."""
        ...

    def is_zero_vector(self, v: Any) -> bool:
        ...
