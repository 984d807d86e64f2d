"""
GF(2) backend.

Vectors are Python integers used as packed bitsets: bit i set means the
coordinate i is 1. Addition is XOR.
"""

from typing import Any, Iterator, Mapping, Optional, Tuple


class GF2Field:
    """The two-element field."""

    name = "gf2"
    zero = 0
    one = 1

    def convert(self, value: Any) -> int:
        return int(value) & 1

    def is_zero(self, a: int) -> bool:
        return a == 0

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def neg(self, a: int) -> int:
        return a

    def mul(self, a: int, b: int) -> int:
        return a & b

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero in GF(2)")
        return a

    def to_json(self, a: int) -> int:
        return int(a)

    def zero_vector(self) -> int:
        return 0

    def unit(self, index: int) -> int:
        return 1 << index

    def vector(self, entries: Mapping[int, Any]) -> int:
        bits = 0
        for i, value in entries.items():
            if int(value) & 1:
                bits |= 1 << i
        return bits

    def entries(self, v: int) -> Iterator[Tuple[int, int]]:
        while v:
            low = v & -v
            yield low.bit_length() - 1, 1
            v ^= low

    def coeff(self, v: int, index: int) -> int:
        return (v >> index) & 1

    def pivot(self, v: int) -> Optional[int]:
        if not v:
            return None
        return (v & -v).bit_length() - 1

    def axpy(self, y: int, a: int, x: int) -> int:
        return y ^ x if a else y

    def is_zero_vector(self, v: int) -> bool:
        return v == 0

    def __repr__(self) -> str:
        return "GF2Field()"
