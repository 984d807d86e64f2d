"""
Controlled chain maps.

- filling_map_M: fills every far tuple by a Rips chain inside a growing
  neighbourhood, dimension by dimension, so that dM = Md
- cover_filling_S: the same with every output simplex inside one member of
  a cover
- random_controlled_map: combinations of close vertex maps

Images are computed lazily and memoized; the realized displacement of each
image is recorded and turned into the certificate rho_n.
"""

import logging
import threading
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from app.algebra.linalg import field_for, solve_in_subspace
from app.control import ControlFunction, ControlFunctions
from app.errors import CoverMismatch, FillingNotFound
from app.fillings.chains import Chain, distance_to_simplex
from app.simplicial import SimplicialComplex, boundary_matrix, proximity_graph, rips_complex
from app.spaces.metric import TOL, FiniteMetricSpace, SubsetSelection

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]

# Neighbourhood radii grow by this factor between attempts
DEFAULT_GROWTH = 1.5


@dataclass
class FarSubcomplexSpec:
    """C^F: tuples sigma with d(sigma, base) >= mu_n(diam sigma).

    d(sigma, base) is the distance from the closest vertex of sigma.
    """

    controls: ControlFunctions
    base: SubsetSelection

    def __post_init__(self) -> None:
        """mu_n must be nondecreasing in n as well as in r.

        Both tables are piecewise linear: comparing them at the union of
        their breakpoints and comparing the slopes past the last one decides it.

        Raises:
            ValueError: if some mu_{n+1} drops below mu_n
        """
        top = max(self.controls.mu_n, default=0)
        for n in range(top):
            lower, upper = self.controls.mu_at(n), self.controls.mu_at(n + 1)
            radii = sorted({r for r, _ in lower.points} | {r for r, _ in upper.points})
            if not upper.dominates(lower, radii):
                bad = next(r for r in radii if upper(r) < lower(r) - TOL)
                raise ValueError(f"mu_{n + 1} drops below mu_{n} at r={bad:g}")
            last = radii[-1]
            if upper(last + 1.0) - upper(last) < lower(last + 1.0) - lower(last) - TOL:
                raise ValueError(f"mu_{n + 1} grows slower than mu_{n} past r={last:g}")

    def is_far(self, X: FiniteMetricSpace, simplex: Sequence[int]) -> bool:
        n = len(simplex) - 1
        ids = list(simplex)
        to_base = float(X.dist[np.ix_(ids, self.base.sorted())].min())
        return to_base >= self.controls.mu_at(n)(X.diameter_of(ids)) - TOL

    def to_dict(self) -> Dict[str, Any]:
        return {"controls": self.controls.to_dict(), "base": self.base.sorted()}


class ControlledChainMap:
    """A chain map given by its images on tuples, with a displacement certificate.

    Args:
        X: The space
        ring: "gf2" or "q"
        image_fn: Computes the image of a single tuple
        name: Used in logs and reports
        certificate: Fixed rho_n (otherwise the realized displacement envelope)
    """

    def __init__(self, X: FiniteMetricSpace, ring: str, image_fn: Callable[[Simplex], Chain],
                 name: str, certificate: Optional[Dict[int, ControlFunction]] = None):
        self.X = X
        self.ring = ring
        self.name = name
        self._image_fn = image_fn
        self._images: Dict[Simplex, Chain] = {}
        self._samples: Dict[int, List[Tuple[float, float]]] = {}
        self._fixed = certificate
        self._lock = threading.RLock()

    def image(self, simplex: Sequence[int]) -> Chain:
        key = tuple(simplex)
        with self._lock:
            hit = self._images.get(key)
            if hit is not None:
                return hit
            result = self._image_fn(key)
            self._images[key] = result
            realized = distance_to_simplex(self.X, result.vertices(), key)
            self._samples.setdefault(len(key) - 1, []).append((self.X.diameter_of(key), realized))
            return result

    def apply(self, chain: Chain) -> Chain:
        total = Chain.zero(chain.degree, self.ring)
        for simplex, coeff in chain:
            total = total + self.image(simplex).scaled(coeff)
        return total

    def rho(self, n: int) -> ControlFunction:
        """Displacement certificate in dimension n: |f(sigma)| lies in
        N_{rho_n(diam sigma)}(sigma). Realized certificates are cumulative
        over dimensions <= n."""
        if self._fixed is not None:
            return self._fixed.get(n, self._fixed[max(self._fixed)])
        with self._lock:
            samples = [s for k, values in self._samples.items() if k <= n for s in values]
        return ControlFunction.envelope(samples)

    def computed(self) -> Dict[Simplex, Chain]:
        with self._lock:
            return dict(self._images)

    def check_chain_map(self, simplex: Sequence[int]) -> bool:
        """Whether d f(sigma) = f(d sigma) on one tuple."""
        key = tuple(simplex)
        if len(key) == 1:
            return True
        lhs = self.image(key).boundary()
        rhs = self.apply(Chain.simplex(key, self.ring).boundary())
        return lhs == rhs

    def check_displacement(self, simplex: Sequence[int]) -> bool:
        key = tuple(simplex)
        image = self.image(key)
        bound = self.rho(len(key) - 1)(self.X.diameter_of(key))
        return distance_to_simplex(self.X, image.vertices(), key) <= bound + TOL

    def certificate_dict(self, max_dim: int) -> Dict[str, Any]:
        return {str(n): self.rho(n).to_dict() for n in range(max_dim + 1)}

    def __repr__(self) -> str:
        return f"ControlledChainMap({self.name!r}, ring={self.ring}, computed={len(self._images)})"


class _Filler:
    """Fills tuples by Rips chains inside growing neighbourhoods N_R(sigma)."""

    def __init__(self, X: FiniteMetricSpace, scale: float, ring: str, cap: float,
                 cover: Optional[List[SubsetSelection]] = None, growth: float = DEFAULT_GROWTH):
        self.X = X
        self.scale = scale
        self.ring = ring
        self.cap = cap
        self.growth = growth
        self.cover = cover
        self.field = field_for(ring)
        self.graph = proximity_graph(X, scale)
        self.owner: Optional[List[List[int]]] = None
        if cover is not None:
            owner: List[List[int]] = [[] for _ in X.points]
            for k, member in enumerate(cover):
                for p in member:
                    owner[p].append(k)
            self.owner = owner
        self.map: Optional[ControlledChainMap] = None

    def _in_one_member(self, simplex: Sequence[int]) -> bool:
        if self.owner is None:
            return True
        common = set(self.owner[simplex[0]])
        for v in simplex[1:]:
            common &= set(self.owner[v])
            if not common:
                return False
        return bool(common)

    def _region(self, simplex: Simplex, radius: float) -> List[int]:
        near = self.X.dist[list(simplex)].min(axis=0)
        return np.nonzero(near <= radius + TOL)[0].tolist()

    def _radii(self, simplex: Simplex, target: Chain) -> List[float]:
        start = max(self.X.diameter_of(simplex), distance_to_simplex(self.X, target.vertices(), simplex))
        if start <= TOL:
            start = self.scale
        radii = []
        r = start
        while r < self.cap - TOL:
            radii.append(r)
            r *= self.growth
        radii.append(self.cap)
        return radii

    def fill(self, simplex: Simplex) -> Chain:
        n = len(simplex) - 1
        if n == 0:
            return Chain.simplex(simplex, self.ring)
        assert self.map is not None
        target = self.map.apply(Chain.simplex(simplex, self.ring).boundary())
        if target.is_zero():
            return Chain.zero(n, self.ring)
        for radius in self._radii(simplex, target):
            region = self._region(simplex, radius)
            chain = self._fill_edge(simplex, region) if n == 1 else self._fill_higher(n, target, region)
            if chain is not None:
                return chain
        raise FillingNotFound(simplex, self.cap)

    def _fill_edge(self, simplex: Simplex, region: List[int]) -> Optional[Chain]:
        x, y = simplex[0], simplex[-1]
        sub = self.graph.subgraph(region)
        if self.owner is not None:
            sub = nx.subgraph_view(sub, filter_edge=lambda p, q: self._in_one_member((p, q)))
        try:
            path = nx.shortest_path(sub, x, y, weight="weight")
        except (nx.NetworkXNoPath, nx.NodeNotFound):
            return None
        chain = Chain.zero(1, self.ring)
        for p, q in zip(path, path[1:]):
            chain = chain + Chain.edge(p, q, self.ring)
        return chain

    def _fill_higher(self, n: int, target: Chain, region: List[int]) -> Optional[Chain]:
        K: SimplicialComplex = rips_complex(self.X, self.scale, n, selection=region)
        rows = K.index(n - 1)
        z = {}
        for simplex, coeff in target:
            if simplex not in rows:
                return None
            z[rows[simplex]] = coeff
        columns = K.level(n)
        mask = [j for j, s in enumerate(columns) if self._in_one_member(s)]
        solution = solve_in_subspace(boundary_matrix(K, n, self.ring), z, mask)
        if solution is None:
            return None
        return Chain(n, self.ring, {columns[j]: c for j, c in solution.items()})


def _default_cap(X: FiniteMetricSpace, scale: float) -> float:
    return X.diameter + scale


def filling_map_M(X: FiniteMetricSpace, spec: FarSubcomplexSpec, scale: float, max_dim: int = 2,
                  ring: str = "gf2", cap: Optional[float] = None) -> ControlledChainMap:
    """The filling chain map M from far tuples into Rips chains at the given scale.

    M(x) = x; a 1-tuple (x, y) goes to a shortest Rips path from x to y inside
    N_R(sigma); a higher tuple goes to a Rips chain c in N_R(sigma) with
    dc = M(d sigma). R starts at max(diam sigma, spread of M(d sigma)) and
    grows by 1.5 up to the cap. Images are computed on demand.

    Raises (on demand):
        FillingNotFound: if no filling exists within the cap
    """
    filler = _Filler(X, scale, ring, cap if cap is not None else _default_cap(X, scale))
    chain_map = ControlledChainMap(X, ring, _guarded(filler, spec, max_dim), name="M")
    filler.map = chain_map
    return chain_map


def cover_filling_S(X: FiniteMetricSpace, spec: FarSubcomplexSpec, cover: Sequence[SubsetSelection],
                    scale: float, max_dim: int = 2, ring: str = "gf2",
                    cap: Optional[float] = None) -> ControlledChainMap:
    """Like filling_map_M, but every simplex of every image lies inside a
    single cover member.

    Raises:
        CoverMismatch: if the cover does not cover X
    """
    members = list(cover)
    covered = set()
    for member in members:
        covered |= member.members
    missing = set(X.points) - covered
    if missing:
        raise CoverMismatch(f"Cover misses {len(missing)} points, e.g. {sorted(missing)[:5]}")
    filler = _Filler(X, scale, ring, cap if cap is not None else _default_cap(X, scale), cover=members)
    chain_map = ControlledChainMap(X, ring, _guarded(filler, spec, max_dim), name="S")
    filler.map = chain_map
    return chain_map


def _guarded(filler: _Filler, spec: FarSubcomplexSpec, max_dim: int) -> Callable[[Simplex], Chain]:
    def image(simplex: Simplex) -> Chain:
        if len(simplex) - 1 > max_dim:
            raise ValueError(f"Tuple {simplex} is above the map's dimension {max_dim}")
        if not spec.is_far(filler.X, simplex):
            raise ValueError(f"Tuple {simplex} is not in the far subcomplex")
        return filler.fill(simplex)
    return image


def far_domain(X: FiniteMetricSpace, spec: FarSubcomplexSpec, domain_diameter: float,
               max_dim: int) -> List[List[Simplex]]:
    """Increasing tuples of Rips(X, domain_diameter) in C^F, per dimension."""
    K = rips_complex(X, domain_diameter, max_dim)
    return [[s for s in K.level(k) if spec.is_far(X, s)] for k in range(max_dim + 1)]


def random_controlled_map(X: FiniteMetricSpace, ring: str, displacement: float, terms: int = 3,
                          seed: int = 0) -> ControlledChainMap:
    """f = sum_k a_k (g_k)_* for vertex maps g_k moving points by at most the
    displacement, with sum_k a_k = 1 (an odd number of terms over GF(2)).

    The certificate is rho_n = displacement in every dimension.
    """
    rng = np.random.default_rng(seed)
    terms = max(1, terms)
    if ring == "gf2" and terms % 2 == 0:
        terms += 1
    close = [np.nonzero(X.dist[x] <= displacement + TOL)[0] for x in X.points]
    vertex_maps = [[int(rng.choice(close[x])) for x in X.points] for _ in range(terms)]
    if ring == "gf2":
        coeffs = [1] * terms
    else:
        coeffs = [int(a) for a in rng.integers(-2, 3, size=terms - 1)]
        coeffs.append(1 - sum(coeffs))

    def image(simplex: Simplex) -> Chain:
        out: Dict[Simplex, Any] = {}
        f = field_for(ring)
        for a, g in zip(coeffs, vertex_maps):
            moved = tuple(g[v] for v in simplex)
            out[moved] = f.add(out.get(moved, f.zero), f.convert(a))
        return Chain(len(simplex) - 1, ring, out)

    flat = ControlFunction.constant(displacement)
    return ControlledChainMap(X, ring, image, name=f"random({seed})", certificate={0: flat})


def identity_map(X: FiniteMetricSpace, ring: str) -> ControlledChainMap:
    return ControlledChainMap(X, ring, lambda s: Chain.simplex(s, ring), name="identity",
                              certificate={0: ControlFunction.constant(0.0)})
