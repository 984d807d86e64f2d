"""
Finite (pseudo)metric spaces.

This module provides the FiniteMetricSpace and SubsetSelection types, table
validation, the d_A pseudometric and the quotient X/A, and closed
neighbourhoods N_r(A) with their complements.
"""

import logging
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from app.errors import (
    AsymmetricInput,
    EmptySubset,
    MetricAxiomViolation,
    MissingBasepoint,
    NegativeDistance,
    TriangleViolation,
)

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)

# Absolute tolerance for every comparison of distances
TOL = 1e-9
# Symmetry tolerance for ingested tables
SYMMETRY_TOL = 1e-12


class SubsetSelection:
    """An immutable set of point IDs of a parent space of the given size."""

    __slots__ = ("members", "size")

    def __init__(self, members: Iterable[int], size: int):
        members = frozenset(int(m) for m in members)
        bad = [m for m in members if not 0 <= m < size]
        if bad:
            raise ValueError(f"Point IDs {sorted(bad)[:5]} do not belong to a space of {size} points")
        self.members: FrozenSet[int] = members
        self.size = size

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, item: int) -> bool:
        return item in self.members

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SubsetSelection):
            return NotImplemented
        return self.members == other.members and self.size == other.size

    def __hash__(self) -> int:
        return hash((self.members, self.size))

    def __repr__(self) -> str:
        shown = sorted(self.members)
        more = "..." if len(shown) > 8 else ""
        return f"SubsetSelection({shown[:8]}{more}, of {self.size})"

    def sorted(self) -> List[int]:
        return sorted(self.members)

    def to_array(self) -> np.ndarray:
        return np.array(sorted(self.members), dtype=np.int64)

    def issubset(self, other: "SubsetSelection") -> bool:
        return self.members <= other.members

    def union(self, other: "SubsetSelection") -> "SubsetSelection":
        return SubsetSelection(self.members | other.members, self.size)

    def difference(self, other: "SubsetSelection") -> "SubsetSelection":
        return SubsetSelection(self.members - other.members, self.size)


class FiniteMetricSpace:
    """A finite point set with a symmetric distance table.

    Points are the integers 0..n-1; labels and coordinates are optional
    annotations for input/output. Instances are immutable.
    """

    def __init__(self, dist: np.ndarray, labels: Optional[Sequence[Any]] = None,
                 coords: Optional[np.ndarray] = None, basepoint: Optional[int] = None,
                 unbounded_model: bool = False, truncation_radius: Optional[float] = None,
                 groups: Optional[Dict[str, Iterable[int]]] = None, pseudometric: bool = False,
                 name: str = "space", source_index: Optional[Sequence[int]] = None,
                 sample_spacing: Optional[float] = None):
        dist = np.array(dist, dtype=np.float64)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise AsymmetricInput(f"Distance table must be square, got shape {dist.shape}")
        n = dist.shape[0]
        if n == 0:
            raise EmptySubset("A metric space needs at least one point")
        if basepoint is not None and not 0 <= basepoint < n:
            raise ValueError(f"Basepoint {basepoint} outside the space")
        if unbounded_model and basepoint is None:
            raise MissingBasepoint("An unbounded model needs a basepoint")
        dist.setflags(write=False)
        self.dist = dist
        self.labels = list(labels) if labels is not None else list(range(n))
        if coords is not None:
            coords = np.array(coords, dtype=np.float64)
            coords.setflags(write=False)
        self.coords = coords
        self.basepoint = basepoint
        self.unbounded_model = unbounded_model
        self.truncation_radius = truncation_radius
        self.pseudometric = pseudometric
        self.name = name
        self.sample_spacing = sample_spacing
        self.source_index = list(source_index) if source_index is not None else list(range(n))
        self.groups: Dict[str, SubsetSelection] = {
            key: SubsetSelection(members, n) for key, members in (groups or {}).items()
        }

    @property
    def size(self) -> int:
        return self.dist.shape[0]

    @property
    def points(self) -> range:
        return range(self.size)

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    def d(self, x: int, y: int) -> float:
        return float(self.dist[x, y])

    def select(self, ids: Iterable[int]) -> SubsetSelection:
        return SubsetSelection(ids, self.size)

    def everything(self) -> SubsetSelection:
        return SubsetSelection(range(self.size), self.size)

    def group(self, name: str) -> SubsetSelection:
        if name not in self.groups:
            raise KeyError(f"Space {self.name!r} has no group {name!r}; known: {sorted(self.groups)}")
        return self.groups[name]

    def base_selection(self) -> SubsetSelection:
        if self.basepoint is None:
            raise MissingBasepoint(f"Space {self.name!r} has no basepoint")
        return self.select([self.basepoint])

    def distance_to(self, subset: Iterable[int]) -> np.ndarray:
        """Vector of d(x, A) for every point x."""
        ids = sorted(subset)
        if not ids:
            raise EmptySubset("Distance to an empty subset is undefined")
        return self.dist[:, ids].min(axis=1)

    def diameter_of(self, ids: Iterable[int]) -> float:
        ids = sorted(set(ids))
        if not ids:
            return 0.0
        return float(self.dist[np.ix_(ids, ids)].max())

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready description of the space."""
        out: Dict[str, Any] = {
            "name": self.name,
            "points": [str(label) for label in self.labels],
            "dist": self.dist.tolist(),
            "basepoint": self.basepoint,
            "unbounded_model": self.unbounded_model,
            "truncation_radius": self.truncation_radius,
            "sample_spacing": self.sample_spacing,
            "groups": {key: sel.sorted() for key, sel in sorted(self.groups.items())},
        }
        if self.coords is not None:
            out["coords"] = self.coords.tolist()
        return out

    def __repr__(self) -> str:
        kind = "pseudometric" if self.pseudometric else "metric"
        return f"FiniteMetricSpace({self.name!r}, {self.size} points, {kind})"


def check_triangle(dist: np.ndarray, tol: float = TOL) -> Optional[tuple]:
    """Find a triangle-inequality violation.

    Returns:
        A triple (i, j, k) with d(i,j) > d(i,k) + d(k,j) + tol, or None
    """
    n = dist.shape[0]
    for k in range(n):
        excess = dist - (dist[:, k][:, None] + dist[k, :][None, :])
        if excess.max() > tol:
            i, j = np.unravel_index(int(np.argmax(excess)), excess.shape)
            return int(i), int(j), k
    return None


def from_distance_matrix(table: Any, labels: Optional[Sequence[Any]] = None, strict: bool = False,
                         basepoint: Optional[int] = None, unbounded_model: bool = False,
                         truncation_radius: Optional[float] = None,
                         groups: Optional[Dict[str, Iterable[int]]] = None,
                         name: str = "table", sample_spacing: Optional[float] = None) -> FiniteMetricSpace:
    """Validate a distance table and wrap it as a space.

    Args:
        table: Square table of reals
        labels: Optional external point labels
        strict: Also check the triangle inequality
        basepoint: Optional basepoint index
        unbounded_model: Mark the space as a truncation of an unbounded space
        truncation_radius: Radius around the basepoint represented faithfully
        groups: Named point selections
        name: Name used in logs and reports
        sample_spacing: Spacing of the sample when it models a continuum

    Returns:
        FiniteMetricSpace: The validated space
    """
    dist = np.array(table, dtype=np.float64)
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        raise AsymmetricInput(f"Distance table must be square, got shape {dist.shape}")
    if not np.allclose(dist, dist.T, rtol=0.0, atol=SYMMETRY_TOL):
        raise AsymmetricInput("Distance table is not symmetric")
    if (dist < 0).any():
        raise NegativeDistance("Distance table has negative entries")
    if np.abs(np.diag(dist)).max(initial=0.0) > SYMMETRY_TOL:
        raise NegativeDistance("Distance table has a nonzero diagonal")
    dist = (dist + dist.T) / 2.0
    np.fill_diagonal(dist, 0.0)
    if strict:
        bad = check_triangle(dist)
        if bad is not None:
            i, j, k = bad
            raise TriangleViolation(f"d({i},{j}) > d({i},{k}) + d({k},{j})")
    if labels is not None and len(labels) != dist.shape[0]:
        raise ValueError(f"Got {len(labels)} labels for {dist.shape[0]} points")
    return FiniteMetricSpace(dist, labels=labels, basepoint=basepoint, unbounded_model=unbounded_model,
                             truncation_radius=truncation_radius, groups=groups, name=name,
                             sample_spacing=sample_spacing)


def point_cloud(coords: Any, labels: Optional[Sequence[Any]] = None, basepoint: Optional[int] = None,
                unbounded_model: bool = False, truncation_radius: Optional[float] = None,
                groups: Optional[Dict[str, Iterable[int]]] = None,
                name: str = "cloud", sample_spacing: Optional[float] = None) -> FiniteMetricSpace:
    """Euclidean space on a list of coordinate vectors."""
    coords = np.atleast_2d(np.array(coords, dtype=np.float64))
    if coords.shape[0] == 0:
        raise EmptySubset("A point cloud needs at least one point")
    dist = squareform(pdist(coords)) if coords.shape[0] > 1 else np.zeros((1, 1))
    return FiniteMetricSpace(dist, labels=labels, coords=coords, basepoint=basepoint,
                             unbounded_model=unbounded_model, truncation_radius=truncation_radius,
                             groups=groups, name=name,
                             sample_spacing=sample_spacing)


def _require_nonempty(A: SubsetSelection) -> None:
    if len(A) == 0:
        raise EmptySubset("The subset A must be nonempty")


def d_A_pseudometric(X: FiniteMetricSpace, A: SubsetSelection) -> FiniteMetricSpace:
    """Replace d by d_A(x, y) = min{d(x,A) + d(y,A), d(x,y)}.

    Raises:
        EmptySubset: if A is empty
        MetricAxiomViolation: if the result breaks the triangle inequality
    """
    _require_nonempty(A)
    dx = X.distance_to(A)
    dist = np.minimum(dx[:, None] + dx[None, :], X.dist)
    np.fill_diagonal(dist, 0.0)
    bad = check_triangle(dist)
    if bad is not None:
        raise MetricAxiomViolation(f"d_A breaks the triangle inequality at {bad}")
    return FiniteMetricSpace(dist, labels=X.labels, coords=X.coords, basepoint=X.basepoint,
                             unbounded_model=X.unbounded_model, truncation_radius=X.truncation_radius,
                             groups={k: v.members for k, v in X.groups.items()}, pseudometric=True,
                             name=f"{X.name}/d_A", source_index=X.source_index,
                             sample_spacing=X.sample_spacing)


def quotient_by_subset(X: FiniteMetricSpace, A: SubsetSelection) -> FiniteMetricSpace:
    """The metric quotient X/A under d_A.

    Every point at d_A-distance 0 from A is collapsed into a single point [A],
    which gets index 0 and becomes the basepoint. The remaining points keep
    their relative order. source_index maps quotient points back to X (for
    [A] the smallest member of A).

    Raises:
        EmptySubset: if A is empty
        MetricAxiomViolation: if the quotient is not a metric space
    """
    _require_nonempty(A)
    dx = X.distance_to(A)
    keep = [i for i in X.points if dx[i] > TOL]
    dA = np.minimum(dx[:, None] + dx[None, :], X.dist)
    n = len(keep) + 1
    dist = np.zeros((n, n))
    if keep:
        dist[0, 1:] = dx[keep]
        dist[1:, 0] = dx[keep]
        dist[1:, 1:] = dA[np.ix_(keep, keep)]
    np.fill_diagonal(dist, 0.0)
    off_diagonal = dist + np.eye(n) * (1.0 + TOL)
    if n > 1 and off_diagonal.min() <= TOL:
        raise MetricAxiomViolation("Quotient has distinct points at distance 0")
    bad = check_triangle(dist)
    if bad is not None:
        raise MetricAxiomViolation(f"Quotient breaks the triangle inequality at {bad}")

    new_index = {old: k + 1 for k, old in enumerate(keep)}
    groups = {}
    for key, sel in X.groups.items():
        groups[key] = {new_index.get(i, 0) for i in sel}
    labels = ["[A]"] + [X.labels[i] for i in keep]
    source = [X.source_index[min(A)]] + [X.source_index[i] for i in keep]
    logger.debug(f"Quotient of {X.name} by {len(A)} points: {X.size} -> {n} points")
    return FiniteMetricSpace(dist, labels=labels, basepoint=0, unbounded_model=X.unbounded_model,
                             truncation_radius=X.truncation_radius, groups=groups,
                             name=f"{X.name}/A", source_index=source,
                             sample_spacing=X.sample_spacing)


def neighborhood(X: FiniteMetricSpace, A: SubsetSelection, r: float) -> SubsetSelection:
    """Closed neighbourhood N_r(A) = {x : d(x, A) <= r}."""
    if r < 0:
        raise ValueError("Neighbourhood radius must be nonnegative")
    if len(A) == 0:
        return X.select([])
    dx = X.distance_to(A)
    return X.select(np.nonzero(dx <= r + TOL)[0].tolist())


def complement(X: FiniteMetricSpace, S: SubsetSelection) -> SubsetSelection:
    return X.everything().difference(S)


def far_ball_isometry(X: FiniteMetricSpace, A: SubsetSelection, x: int, r: float) -> bool:
    """Check that the r-ball about x looks the same under d and under d_A.

    The ball B(x, r) in (X, d) is compared to the ball about q(x) in the
    quotient (X/A, d_A): same points (through source_index) and the same
    pairwise distances. This always holds when d(x, A) > 2r.
    """
    Q = quotient_by_subset(X, A)
    position = {src: k for k, src in enumerate(Q.source_index) if k > 0}
    if x not in position:
        return False
    qx = position[x]
    ball = sorted(np.nonzero(X.dist[x] <= r + TOL)[0].tolist())
    qball = sorted(np.nonzero(Q.dist[qx] <= r + TOL)[0].tolist())
    if 0 in qball:
        return False
    mapped = sorted(Q.source_index[k] for k in qball)
    if mapped != ball:
        return False
    qorder = [position[i] for i in ball]
    return bool(np.allclose(X.dist[np.ix_(ball, ball)], Q.dist[np.ix_(qorder, qorder)], rtol=0.0, atol=TOL))


def is_coarsely_disjoint(X: FiniteMetricSpace, A: SubsetSelection, B: SubsetSelection,
                         r_grid: Sequence[float], bound: float) -> bool:
    """Truncated form of "N_r(A) and N_r(B) meet in a bounded set for all r".

    For each r in the grid, N_r(A) intersected with N_r(B) must lie inside
    N_bound(b).
    """
    ball = neighborhood(X, X.base_selection(), bound)
    for r in r_grid:
        meet = neighborhood(X, A, r).members & neighborhood(X, B, r).members
        if not meet <= ball.members:
            logger.debug(f"N_{r}(A) and N_{r}(B) meet outside N_{bound}(b)")
            return False
    return True
