"""
Finitely supported chains on tuples of points.

A degree-n chain is a finite combination of (n+1)-tuples of point IDs. Tuples
may repeat vertices and need not be increasing; the boundary is
d(x_0..x_n) = sum_i (-1)^i (x_0..^x_i..x_n) on every tuple.
"""

from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from app.algebra.linalg import field_for
from app.errors import DimensionMismatch, RingMismatch
from app.spaces.metric import FiniteMetricSpace

Simplex = Tuple[int, ...]


class Chain:
    """Sparse chain over GF(2) or Q."""

    __slots__ = ("degree", "ring", "terms", "_field")

    def __init__(self, degree: int, ring: str, terms: Optional[Mapping[Sequence[int], Any]] = None):
        self.degree = degree
        self.ring = ring
        self._field = field_for(ring)
        f = self._field
        clean: Dict[Simplex, Any] = {}
        for key, value in (terms or {}).items():
            simplex = tuple(key)
            if len(simplex) != degree + 1:
                raise DimensionMismatch(f"Tuple {simplex} does not have arity {degree + 1}")
            c = f.convert(value)
            if not f.is_zero(c):
                clean[simplex] = c
        self.terms = clean

    @classmethod
    def simplex(cls, simplex: Sequence[int], ring: str, coeff: Any = 1) -> "Chain":
        return cls(len(simplex) - 1, ring, {tuple(simplex): coeff})

    @classmethod
    def zero(cls, degree: int, ring: str) -> "Chain":
        return cls(degree, ring)

    @classmethod
    def edge(cls, p: int, q: int, ring: str) -> "Chain":
        """The oriented Rips edge from p to q, written on the increasing tuple."""
        if p < q:
            return cls(1, ring, {(p, q): 1})
        return cls(1, ring, {(q, p): -1})

    def _combine(self, other: "Chain", a: Any) -> "Chain":
        if other.ring != self.ring:
            raise RingMismatch(f"Chains over {self.ring} and {other.ring}")
        if other.degree != self.degree:
            raise DimensionMismatch(f"Chains of degree {self.degree} and {other.degree}")
        f = self._field
        out = dict(self.terms)
        for simplex, value in other.terms.items():
            s = f.add(out.get(simplex, f.zero), f.mul(a, value))
            if f.is_zero(s):
                out.pop(simplex, None)
            else:
                out[simplex] = s
        return self._raw(self.degree, out)

    def _raw(self, degree: int, terms: Dict[Simplex, Any]) -> "Chain":
        chain = Chain.__new__(Chain)
        chain.degree = degree
        chain.ring = self.ring
        chain._field = self._field
        chain.terms = terms
        return chain

    def __add__(self, other: "Chain") -> "Chain":
        return self._combine(other, self._field.one)

    def __sub__(self, other: "Chain") -> "Chain":
        return self._combine(other, self._field.neg(self._field.one))

    def __neg__(self) -> "Chain":
        f = self._field
        return self._raw(self.degree, {s: f.neg(c) for s, c in self.terms.items()})

    def scaled(self, a: Any) -> "Chain":
        f = self._field
        a = f.convert(a)
        if f.is_zero(a):
            return Chain.zero(self.degree, self.ring)
        return self._raw(self.degree, {s: f.mul(a, c) for s, c in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return self.degree == other.degree and self.ring == other.ring and self.terms == other.terms

    def __iter__(self) -> Iterator[Tuple[Simplex, Any]]:
        for simplex in sorted(self.terms):
            yield simplex, self.terms[simplex]

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, simplex: Sequence[int]) -> Any:
        return self.terms.get(tuple(simplex), self._field.zero)

    @property
    def support(self) -> List[Simplex]:
        return sorted(self.terms)

    def vertices(self) -> Set[int]:
        return {v for simplex in self.terms for v in simplex}

    def boundary(self) -> "Chain":
        if self.degree == 0:
            raise DimensionMismatch("Boundary of a 0-chain is not defined here")
        f = self._field
        out: Dict[Simplex, Any] = {}
        for simplex, value in self.terms.items():
            negated = f.neg(value)
            for i in range(len(simplex)):
                face = simplex[:i] + simplex[i + 1:]
                s = f.add(out.get(face, f.zero), negated if i % 2 else value)
                if f.is_zero(s):
                    out.pop(face, None)
                else:
                    out[face] = s
        return self._raw(self.degree - 1, out)

    def cone(self, v: int) -> "Chain":
        """T_v(x_0..x_n) = (v, x_0..x_n)."""
        return self._raw(self.degree + 1, {(v,) + s: c for s, c in self.terms.items()})

    def augmentation(self) -> Any:
        f = self._field
        total = f.zero
        for value in self.terms.values():
            total = f.add(total, value)
        return total

    def to_json(self) -> Dict[str, Any]:
        f = self._field
        return {
            "degree": self.degree,
            "ring": self.ring,
            "terms": [[list(s), f.to_json(c)] for s, c in self],
        }

    def __repr__(self) -> str:
        return f"Chain(degree={self.degree}, ring={self.ring}, terms={len(self.terms)})"



def distance_to_simplex(X: FiniteMetricSpace, points: Iterable[int], simplex: Sequence[int]) -> float:
    """max over the given points of their distance to the nearest vertex of simplex."""
    pts = sorted(set(points))
    if not pts:
        return 0.0
    return float(X.dist[list(simplex)][:, pts].min(axis=0).max())

