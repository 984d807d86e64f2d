"""
Vietoris-Rips complexes, boundary matrices and inclusions.

Simplices are increasing tuples of point IDs of the parent space, sorted
lexicographically within each dimension so that every matrix built from a
complex is reproducible.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from app.algebra.linalg import SparseMatrix
from app.cohomology import CohomologyGroup, groups_from_coboundaries
from app.config import get_default_params
from app.errors import EmptyComplex, NotASubcomplex, SizeLimit
from app.spaces.metric import TOL, FiniteMetricSpace

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]

DEFAULT_MAX_DIM = 3


class SimplicialComplex:
    """Face-closed collection of increasing vertex tuples, per dimension."""

    def __init__(self, simplices: Sequence[Sequence[Simplex]], scale: Optional[float] = None,
                 parent: Optional[FiniteMetricSpace] = None):
        self.simplices: List[List[Simplex]] = [sorted(set(level)) for level in simplices]
        while len(self.simplices) > 1 and not self.simplices[-1]:
            self.simplices.pop()
        self.scale = scale
        self.parent = parent
        self._index: List[Dict[Simplex, int]] = [
            {s: i for i, s in enumerate(level)} for level in self.simplices
        ]

    @property
    def vertices(self) -> List[int]:
        return [s[0] for s in self.simplices[0]] if self.simplices else []

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def count(self, k: int) -> int:
        return len(self.simplices[k]) if 0 <= k < len(self.simplices) else 0

    def counts(self) -> List[int]:
        return [len(level) for level in self.simplices]

    def level(self, k: int) -> List[Simplex]:
        return self.simplices[k] if 0 <= k < len(self.simplices) else []

    def index(self, k: int) -> Dict[Simplex, int]:
        return self._index[k] if 0 <= k < len(self._index) else {}

    def __contains__(self, simplex: Simplex) -> bool:
        return tuple(simplex) in self.index(len(simplex) - 1)

    def is_empty(self) -> bool:
        return not self.simplices or not self.simplices[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.simplices == other.simplices

    def __repr__(self) -> str:
        return f"SimplicialComplex(counts={self.counts()}, scale={self.scale})"


def proximity_graph(X: FiniteMetricSpace, scale: float,
                    selection: Optional[Iterable[int]] = None) -> nx.Graph:
    """Graph on the selected points with an edge whenever d(x, y) <= scale.

    Edges carry the distance as "weight".
    """
    ids = sorted(selection) if selection is not None else list(X.points)
    graph = nx.Graph()
    graph.add_nodes_from(ids)
    if len(ids) > 1:
        sub = X.dist[np.ix_(ids, ids)]
        rows, cols = np.nonzero(np.triu(sub <= scale + TOL, k=1))
        graph.add_weighted_edges_from(
            (ids[i], ids[j], float(sub[i, j])) for i, j in zip(rows.tolist(), cols.tolist())
        )
    return graph


def rips_complex(X: FiniteMetricSpace, scale: float, max_dim: int = DEFAULT_MAX_DIM,
                 selection: Optional[Iterable[int]] = None,
                 max_simplices: Optional[int] = None) -> SimplicialComplex:
    """Clique complex of the scale-proximity graph, up to dimension max_dim.

    Args:
        X: The parent space
        scale: Rips scale (edges have length <= scale)
        max_dim: Highest simplex dimension
        selection: Restrict to these points (default: all of X)
        max_simplices: Override of the configured simplex cap

    Returns:
        SimplicialComplex: Deterministically ordered complex
    """
    if scale < 0 or max_dim < 0:
        raise ValueError("Rips scale and dimension must be nonnegative")
    cap = max_simplices if max_simplices is not None else get_default_params()["max_simplices"]
    graph = proximity_graph(X, scale, selection)
    levels: List[List[Simplex]] = [[] for _ in range(max_dim + 1)]
    total = 0
    for clique in nx.enumerate_all_cliques(graph):
        k = len(clique) - 1
        if k > max_dim:
            break
        levels[k].append(tuple(sorted(clique)))
        total += 1
        if total > cap:
            raise SizeLimit(f"Rips complex exceeds {cap} simplices at scale {scale}")
    complex_ = SimplicialComplex(levels, scale=scale, parent=X)
    logger.debug(f"Rips complex at scale {scale}: counts {complex_.counts()}")
    return complex_


def from_simplices(simplices: Iterable[Sequence[int]], parent: Optional[FiniteMetricSpace] = None,
                   scale: Optional[float] = None) -> SimplicialComplex:
    """Face closure of an explicit simplex list."""
    levels: Dict[int, set] = {}
    for simplex in simplices:
        top = tuple(sorted(set(int(v) for v in simplex)))
        for k in range(len(top)):
            for face in itertools.combinations(top, k + 1):
                levels.setdefault(k, set()).add(face)
    if not levels:
        return SimplicialComplex([[]], scale=scale, parent=parent)
    return SimplicialComplex([levels.get(k, set()) for k in range(max(levels) + 1)],
                             scale=scale, parent=parent)


def export_complex(K: SimplicialComplex) -> Dict[str, Any]:
    return {
        "scale": K.scale,
        "counts": K.counts(),
        "simplices": [[list(s) for s in level] for level in K.simplices],
    }


def boundary_matrix(K: SimplicialComplex, dim: int, ring: str = "z") -> SparseMatrix:
    """Matrix of the boundary map C_dim -> C_{dim-1}.

    Columns are dim-simplices, rows (dim-1)-simplices, both in complex order;
    the face without vertex i enters with sign (-1)^i.
    """
    if dim < 1:
        raise ValueError("Boundary matrices start in dimension 1")
    rows = K.index(dim - 1)
    columns = []
    for simplex in K.level(dim):
        col = {}
        for i in range(len(simplex)):
            face = simplex[:i] + simplex[i + 1:]
            col[rows[face]] = -1 if i % 2 else 1
        columns.append(col)
    return SparseMatrix(len(rows), len(columns), columns, ring)


def coboundary_matrix(K: SimplicialComplex, dim: int, ring: str = "z") -> SparseMatrix:
    """delta^dim : C^dim -> C^{dim+1}, the transpose of the boundary."""
    if K.count(dim + 1) == 0:
        return SparseMatrix(0, K.count(dim), None, ring)
    return boundary_matrix(K, dim + 1, ring).transpose()


def cochain_data(K: SimplicialComplex, max_degree: int, ring: str) -> Tuple[List[int], Dict[int, SparseMatrix]]:
    dims = [K.count(k) for k in range(max_degree + 1)]
    coboundaries = {k: coboundary_matrix(K, k, ring) for k in range(max_degree + 1)}
    return dims, coboundaries


def cohomology(K: SimplicialComplex, ring: str = "gf2", max_degree: int = 2,
               reduced: bool = False) -> List[CohomologyGroup]:
    """Simplicial cohomology H^0..H^max_degree of K.

    K must contain simplices up to dimension max_degree + 1 where they exist
    in the underlying flag complex, otherwise the top degree is overcounted.

    Raises:
        EmptyComplex: if K has no vertices
    """
    if K.is_empty():
        raise EmptyComplex("Cohomology of an empty complex")
    dims, coboundaries = cochain_data(K, max_degree, ring)
    return groups_from_coboundaries(dims, coboundaries, ring, max_degree, augmented=reduced)


@dataclass
class InclusionMap:
    """Validated inclusion K -> L; positions[k][i] is the index in L of the
    i-th k-simplex of K."""

    source: SimplicialComplex
    target: SimplicialComplex
    positions: List[List[int]]

    def restrict(self, field: Any, vector: Any, dim: int) -> Any:
        """Restrict a dim-cochain on the target to the source."""
        if dim >= len(self.positions):
            return field.zero_vector()
        where = {t: s for s, t in enumerate(self.positions[dim])}
        return field.vector({where[t]: c for t, c in field.entries(vector) if t in where})

    def push(self, field: Any, vector: Any, dim: int) -> Any:
        """Push a dim-chain on the source forward to the target."""
        if dim >= len(self.positions):
            return field.zero_vector()
        moved = self.positions[dim]
        return field.vector({moved[s]: c for s, c in field.entries(vector)})


def inclusion(K: SimplicialComplex, L: SimplicialComplex) -> InclusionMap:
    """Check that K is a subcomplex of L (same parent and scale).

    Raises:
        NotASubcomplex: on mismatched scales/parents or a missing simplex
    """
    if K.parent is not L.parent:
        raise NotASubcomplex("Complexes live over different spaces")
    if (K.scale is None) != (L.scale is None) or (
            K.scale is not None and abs(K.scale - L.scale) > TOL):
        raise NotASubcomplex(f"Scales differ: {K.scale} vs {L.scale}")
    positions = []
    for k, level in enumerate(K.simplices):
        target = L.index(k)
        try:
            positions.append([target[s] for s in level])
        except KeyError as e:
            raise NotASubcomplex(f"Simplex {e.args[0]} of the source is missing from the target") from None
    return InclusionMap(source=K, target=L, positions=positions)

