"""
Raw cochains on tuples of points.

A degree-n cochain assigns a ring element to every (n+1)-tuple of points of a
finite space. Cochains are stored sparsely (absent tuples are zero). This
module holds the coboundary, support bookkeeping (diagonal trace and
near-diagonal support), the bounded-support and coarseness predicates on a
truncation, and the cohomology of the full tuple complex of a small space.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from app.algebra import get_ring
from app.algebra.linalg import SparseMatrix
from app.cohomology import CohomologyGroup, groups_from_coboundaries
from app.config import get_default_params
from app.errors import DimensionMismatch, MissingBasepoint, RingMismatch, SizeLimit
from app.spaces.metric import TOL, FiniteMetricSpace, neighborhood

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]

# Highest degree for which the full tuple complex is ever materialized
FULL_COMPLEX_MAX_DEGREE = 3


class RawCochain:
    """Sparse map from (degree+1)-tuples of point IDs to ring elements."""

    def __init__(self, degree: int, ring: str, values: Optional[Mapping[Sequence[int], Any]] = None,
                 size: Optional[int] = None):
        if degree < 0:
            raise ValueError("Cochain degree must be nonnegative")
        self.degree = degree
        self.ring = ring
        self.size = size
        backend = get_ring(ring)
        self._backend = backend
        clean: Dict[Simplex, Any] = {}
        for key, value in (values or {}).items():
            simplex = tuple(int(v) for v in key)
            if len(simplex) != degree + 1:
                raise DimensionMismatch(f"Tuple {simplex} has arity {len(simplex)}, expected {degree + 1}")
            if size is not None and any(not 0 <= v < size for v in simplex):
                raise DimensionMismatch(f"Tuple {simplex} leaves a space of {size} points")
            c = backend.convert(value)
            if not backend.is_zero(c):
                clean[simplex] = c
        self.values = clean

    @property
    def support(self) -> List[Simplex]:
        return sorted(self.values)

    def __call__(self, simplex: Sequence[int]) -> Any:
        return self.values.get(tuple(simplex), self._backend.zero)

    def __len__(self) -> int:
        return len(self.values)

    def is_zero(self) -> bool:
        return not self.values

    def vertices(self) -> Set[int]:
        return {v for simplex in self.values for v in simplex}

    def evaluate(self, chain: Mapping[Simplex, Any]) -> Any:
        """Pair the cochain with a chain given as tuple -> coefficient."""
        ring = self._backend
        total = ring.zero
        for simplex, coeff in chain.items():
            value = self.values.get(simplex)
            if value is not None:
                total = ring.add(total, ring.mul(value, ring.convert(coeff)))
        return total

    def __add__(self, other: "RawCochain") -> "RawCochain":
        _check_compatible(self, other)
        ring = self._backend
        out = dict(self.values)
        for simplex, value in other.values.items():
            out[simplex] = ring.add(out.get(simplex, ring.zero), value)
        return RawCochain(self.degree, self.ring, out, self.size)

    def __neg__(self) -> "RawCochain":
        ring = self._backend
        return RawCochain(self.degree, self.ring, {s: ring.neg(v) for s, v in self.values.items()}, self.size)

    def __sub__(self, other: "RawCochain") -> "RawCochain":
        return self + (-other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RawCochain):
            return NotImplemented
        return self.degree == other.degree and self.ring == other.ring and self.values == other.values

    def __repr__(self) -> str:
        return f"RawCochain(degree={self.degree}, ring={self.ring}, support={len(self.values)})"

    def to_json(self) -> Dict[str, Any]:
        return {
            "degree": self.degree,
            "ring": self.ring,
            "entries": [[list(s), self._backend.to_json(self.values[s])] for s in self.support],
        }


def _check_compatible(a: RawCochain, b: RawCochain) -> None:
    if a.ring != b.ring:
        raise RingMismatch(f"Cochains over {a.ring} and {b.ring}")
    if a.degree != b.degree:
        raise DimensionMismatch(f"Cochains of degree {a.degree} and {b.degree}")


def cochain_from_json(data: Mapping[str, Any], size: Optional[int] = None) -> RawCochain:
    """Parse {"degree": n, "ring": r, "entries": [[[x0, ..., xn], value], ...]}."""
    ring = data.get("ring", "gf2")
    values: Dict[Simplex, Any] = {}
    backend = get_ring(ring)
    for simplex, value in data.get("entries", []):
        key = tuple(int(v) for v in simplex)
        c = backend.convert(value)
        values[key] = backend.add(values.get(key, backend.zero), c)
    return RawCochain(int(data["degree"]), ring, values, size)


def coboundary(phi: RawCochain, X: FiniteMetricSpace) -> RawCochain:
    """(d phi)(x_0..x_{n+1}) = sum_i (-1)^i phi(x_0..^x_i..x_{n+1}).

    Computed from the support: a tuple tau of phi contributes to every tuple
    obtained by inserting a point of X at position i, with sign (-1)^i.
    """
    if phi.size is not None and phi.size != X.size:
        raise DimensionMismatch(f"Cochain lives on {phi.size} points, space has {X.size}")
    ring = get_ring(phi.ring)
    out: Dict[Simplex, Any] = {}
    for tau, value in phi.values.items():
        negated = ring.neg(value)
        for i in range(len(tau) + 1):
            contribution = negated if i % 2 else value
            head, tail = tau[:i], tau[i:]
            for x in X.points:
                sigma = head + (x,) + tail
                out[sigma] = ring.add(out.get(sigma, ring.zero), contribution)
    return RawCochain(phi.degree + 1, phi.ring, out, X.size)


def stabilized_distance(X: FiniteMetricSpace, sigma: Sequence[int], tau: Sequence[int]) -> float:
    """Sup-distance between tuples after repeating the last coordinate of the
    shorter one until the arities agree."""
    n = max(len(sigma), len(tau))
    a = list(sigma) + [sigma[-1]] * (n - len(sigma))
    b = list(tau) + [tau[-1]] * (n - len(tau))
    return float(X.dist[a, b].max())


def diagonal_distance(X: FiniteMetricSpace, sigma: Sequence[int]) -> float:
    """Distance of a tuple to the diagonal: min over x of max_i d(sigma_i, x)."""
    return float(X.dist[list(sigma)].max(axis=0).min())


@dataclass
class SupportReport:
    """Diagonal trace ||phi|| and the near-diagonal support per radius."""

    diag_trace: Set[int]
    near_diag: Dict[float, List[Simplex]] = field(default_factory=dict)

    def near_vertices(self, r: float) -> Set[int]:
        return {v for simplex in self.near_diag.get(r, []) for v in simplex}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "diag_trace": sorted(self.diag_trace),
            "near_diag": {f"{r:g}": [list(s) for s in simplices]
                          for r, simplices in sorted(self.near_diag.items())},
        }


def support_report(phi: RawCochain, X: FiniteMetricSpace, r_grid: Iterable[float]) -> SupportReport:
    """Compute ||phi|| and |phi| intersected with N_r(diagonal) for each grid radius.

    ||phi|| is the set of points x whose constant tuple (x,..,x) lies in the
    support of phi; on a finite space the closure adds nothing.
    """
    diag_trace = {simplex[0] for simplex in phi.values if len(set(simplex)) == 1}
    distances = {simplex: diagonal_distance(X, simplex) for simplex in phi.values}
    near = {}
    for r in r_grid:
        near[r] = sorted(s for s, dist in distances.items() if dist <= r + TOL)
    return SupportReport(diag_trace=diag_trace, near_diag=near)


def is_boundedly_supported(phi: RawCochain, X: FiniteMetricSpace, bound_radius: float) -> bool:
    """Whether ||phi|| lies inside N_bound(b).

    Raises:
        MissingBasepoint: if X has no basepoint
    """
    if X.basepoint is None:
        raise MissingBasepoint("Bounded support is measured from the basepoint")
    ball = neighborhood(X, X.base_selection(), bound_radius)
    trace = support_report(phi, X, []).diag_trace
    return trace <= ball.members


def is_coarse_on_truncation(phi: RawCochain, X: FiniteMetricSpace, r_grid: Iterable[float],
                            bound_radius: float) -> bool:
    """Whether, for every grid r, each tuple of |phi| within r of the diagonal
    has all its vertices in N_bound(b).

    Raises:
        MissingBasepoint: if X has no basepoint
    """
    if X.basepoint is None:
        raise MissingBasepoint("Coarseness is measured from the basepoint")
    ball = neighborhood(X, X.base_selection(), bound_radius)
    report = support_report(phi, X, r_grid)
    for r, simplices in report.near_diag.items():
        outside = [s for s in simplices if not set(s) <= ball.members]
        if outside:
            logger.debug(f"Tuple {outside[0]} is within {r} of the diagonal but leaves N_{bound_radius}(b)")
            return False
    return True


def _tuple_index(simplex: Sequence[int], n: int) -> int:
    index = 0
    for v in simplex:
        index = index * n + v
    return index


def full_coboundary_matrix(n: int, degree: int, ring: str) -> SparseMatrix:
    """delta^degree of the full tuple complex on n points.

    Columns are the n^(degree+1) tuples and rows the n^(degree+2) tuples, both
    in lexicographic order.
    """
    columns = []
    for tau in itertools.product(range(n), repeat=degree + 1):
        col: Dict[int, int] = {}
        for i in range(degree + 2):
            sign = -1 if i % 2 else 1
            for x in range(n):
                row = _tuple_index(tau[:i] + (x,) + tau[i:], n)
                col[row] = col.get(row, 0) + sign
        columns.append(col)
    return SparseMatrix(n ** (degree + 2), n ** (degree + 1), columns, ring)


def full_complex_cohomology(X: FiniteMetricSpace, max_degree: int = 3,
                            ring: str = "gf2") -> List[CohomologyGroup]:
    """Cohomology of the full tuple complex C*(X) (unreduced).

    The complex is acyclic, so the expected answer is the ring in degree 0
    and 0 above; this is the ground truth for bounded spaces.

    Args:
        X: A small space
        max_degree: Highest degree, at most 3
        ring: "gf2", "q" or "z"

    Returns:
        List of CohomologyGroup for degrees 0..max_degree

    Raises:
        SizeLimit: if X exceeds the configured point cap or max_degree > 3
    """
    cap = get_default_params()["full_complex_max_points"]
    if X.size > cap:
        raise SizeLimit(f"Full tuple complex on {X.size} points exceeds the cap of {cap}")
    if not 0 <= max_degree <= FULL_COMPLEX_MAX_DEGREE:
        raise SizeLimit(f"Full tuple complex is only built up to degree {FULL_COMPLEX_MAX_DEGREE}")
    get_ring(ring)
    n = X.size
    dims = [n ** (k + 1) for k in range(max_degree + 1)]
    coboundaries = {k: full_coboundary_matrix(n, k, ring) for k in range(max_degree + 1)}
    groups = groups_from_coboundaries(dims, coboundaries, ring, max_degree)
    logger.info(f"Full complex of {X.name} ({n} points, {ring}): "
                f"{[g.free_rank for g in groups]}")
    return groups


def random_cochain(X: FiniteMetricSpace, degree: int, ring: str, terms: int,
                   rng: np.random.Generator, support: Optional[Sequence[int]] = None) -> RawCochain:
    """Seeded random sparse cochain on tuples of the given points (default all)."""
    points = list(support) if support is not None else list(X.points)
    values: Dict[Simplex, Any] = {}
    for _ in range(terms):
        simplex = tuple(int(p) for p in rng.choice(points, size=degree + 1))
        if ring == "gf2":
            value = 1
        else:
            value = int(rng.integers(1, 4)) * (1 if rng.random() < 0.5 else -1)
        values[simplex] = value
    return RawCochain(degree, ring, values, X.size)
