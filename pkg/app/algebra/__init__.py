"""
Exact algebra package.

This package provides the coefficient rings (GF(2), Q, Z), sparse matrices
and the elimination routines built on them.
"""

from app.algebra.gf2 import GF2Field
from app.algebra.interfaces import Field, Ring
from app.algebra.rational import RationalField
from app.algebra.smith import IntegerRing
from app.errors import RingMismatch

_RINGS = {
    "gf2": GF2Field(),
    "q": RationalField(),
    "z": IntegerRing(),
}


def get_ring(name: str) -> Ring:
    """Get the shared backend instance for a ring tag.

    Args:
        name: One of "gf2", "q", "z"

    Returns:
        The ring backend
    """
    try:
        return _RINGS[name]
    except KeyError:
        raise RingMismatch(f"Unknown ring {name!r}; expected one of {sorted(_RINGS)}") from None


__all__ = ["Field", "Ring", "GF2Field", "RationalField", "IntegerRing", "get_ring"]
