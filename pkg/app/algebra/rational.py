"""
Exact rational backend.

Elements are sympy QQ rationals; vectors are dicts index -> nonzero QQ.
No floating point is involved anywhere in this module.
"""

from typing import Any, Dict, Iterator, Mapping, Optional, Tuple

from sympy.polys.domains import QQ


class RationalField:
    """The field of rational numbers."""

    name = "q"

    def __init__(self):
        self.zero = QQ.zero
        self.one = QQ.one

    def convert(self, value: Any) -> Any:
        if isinstance(value, int):
            return QQ(value)
        if hasattr(value, "numerator") and hasattr(value, "denominator"):
            return QQ(int(value.numerator), int(value.denominator))
        if isinstance(value, str):
            num, _, den = value.partition("/")
            return QQ(int(num), int(den or 1))
        raise TypeError(f"Cannot convert {value!r} to an exact rational")

    def is_zero(self, a: Any) -> bool:
        return a == 0

    def add(self, a: Any, b: Any) -> Any:
        return a + b

    def neg(self, a: Any) -> Any:
        return -a

    def mul(self, a: Any, b: Any) -> Any:
        return a * b

    def div(self, a: Any, b: Any) -> Any:
        return a / b

    def to_json(self, a: Any) -> str:
        return str(a)

    def zero_vector(self) -> Dict[int, Any]:
        return {}

    def unit(self, index: int) -> Dict[int, Any]:
        return {index: QQ.one}

    def vector(self, entries: Mapping[int, Any]) -> Dict[int, Any]:
        out = {}
        for i, value in entries.items():
            c = self.convert(value)
            if c != 0:
                out[i] = c
        return out

    def entries(self, v: Dict[int, Any]) -> Iterator[Tuple[int, Any]]:
        for i in sorted(v):
            yield i, v[i]

    def coeff(self, v: Dict[int, Any], index: int) -> Any:
        return v.get(index, QQ.zero)

    def pivot(self, v: Dict[int, Any]) -> Optional[int]:
        return min(v) if v else None

    def axpy(self, y: Dict[int, Any], a: Any, x: Dict[int, Any]) -> Dict[int, Any]:
        if a == 0 or not x:
            return y
        out = dict(y)
        for i, c in x.items():
            s = out.get(i, QQ.zero) + a * c
            if s == 0:
                out.pop(i, None)
            else:
                out[i] = s
        return out

    def is_zero_vector(self, v: Dict[int, Any]) -> bool:
        return not v

    def __repr__(self) -> str:
        return "RationalField()"
