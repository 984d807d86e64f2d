"""
Complement towers.

A tower is the directed system r -> X - N_r(A) of complement complexes at a
fixed Rips scale. Each stage carries its reduced cohomology; restriction of
cocycles along the inclusions of later (smaller) stages into earlier ones
gives the maps H(stage i) -> H(stage j) for i < j, whose ranks approximate
the colimit.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from app.algebra.linalg import field_for
from app.cohomology import CohomologyGroup, QuotientBasis, cohomology_basis, induced_rank
from app.config import get_default_params
from app.errors import EmptyTower, InsufficientStages
from app.simplicial import SimplicialComplex, cochain_data, cohomology, inclusion, rips_complex
from app.spaces.metric import TOL, FiniteMetricSpace, SubsetSelection

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)

DEFAULT_STAGE_COUNT = 12
DEFAULT_WINDOW = 2
DEFAULT_STABILITY = 3

STABILIZED = "STABILIZED"
NON_STABILIZED = "NON_STABILIZED"


@dataclass
class Stage:
    """One complement X - N_r(A) with its complex and reduced cohomology."""

    index: int
    r: float
    selection: SubsetSelection
    complex: SimplicialComplex
    groups: List[CohomologyGroup]
    bases: Dict[int, QuotientBasis] = field(default_factory=dict, repr=False)
    trusted: bool = True

    def betti(self, degree: int) -> int:
        return self.groups[degree].free_rank

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "points": len(self.selection),
            "simplex_counts": self.complex.counts(),
            "trusted": self.trusted,
            "groups": [g.to_dict() for g in self.groups],
        }


@dataclass
class Tower:
    """Stages ordered by increasing r plus all induced maps i -> j (i <= j).

    maps[(i, j, k)] lists, for each basis class of stage i in degree k, its
    coordinates in the basis of stage j.
    """

    space: FiniteMetricSpace
    base: SubsetSelection
    scale: float
    ring: str
    max_degree: int
    stages: List[Stage]
    maps: Dict[Tuple[int, int, int], List[Any]] = field(default_factory=dict, repr=False)
    ranks: Dict[Tuple[int, int, int], int] = field(default_factory=dict)

    @property
    def radii(self) -> List[float]:
        return [stage.r for stage in self.stages]

    def rank(self, i: int, j: int, degree: int) -> int:
        """Rank of the map H(stage i) -> H(stage j) in the given degree."""
        if i == j:
            return self.stages[i].betti(degree)
        return self.ranks[(i, j, degree)]

    def trusted_indices(self) -> List[int]:
        return [stage.index for stage in self.stages if stage.trusted]


@dataclass
class ColimitReport:
    degree: int
    sequence: List[int]
    verdict: str
    rank: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        label = f"{self.verdict}({self.rank})" if self.verdict == STABILIZED else self.verdict
        return {"degree": self.degree, "sequence": self.sequence, "verdict": label, "rank": self.rank}


def reduced_cohomology(K: SimplicialComplex, ring: str = "gf2", max_degree: int = 2) -> List[CohomologyGroup]:
    """Reduced cohomology of K through the augmented cochain complex.

    Raises:
        EmptyComplex: if K is empty
    """
    return cohomology(K, ring, max_degree, reduced=True)


def default_r_grid(X: FiniteMetricSpace, scale: float, stages: int = DEFAULT_STAGE_COUNT) -> List[float]:
    """Geometric grid from the Rips scale to half the truncation radius."""
    top = (X.truncation_radius if X.truncation_radius is not None else X.diameter) / 2.0
    low = max(scale, TOL)
    if top <= low or stages < 2:
        return [low]
    ratio = math.exp(math.log(top / low) / (stages - 1))
    return [round(low * ratio ** i, 9) for i in range(stages)]


def _complement(X: FiniteMetricSpace, base: SubsetSelection, r: float) -> SubsetSelection:
    dx = X.distance_to(base)
    return X.select(i for i in X.points if dx[i] > r + TOL)


def _build_stage(X: FiniteMetricSpace, index: int, r: float, selection: SubsetSelection, scale: float,
                 ring: str, max_degree: int, trusted: bool) -> Stage:
    K = rips_complex(X, scale, max_degree + 1, selection=selection.members)
    groups = reduced_cohomology(K, ring, max_degree)
    dims, coboundaries = cochain_data(K, max_degree, ring)
    bases = {k: cohomology_basis(ring, dims, coboundaries, k, augmented=True) for k in range(max_degree + 1)}
    logger.info(f"Stage r={r:g}: {len(selection)} points, counts {K.counts()}, "
                f"betti {[g.free_rank for g in groups]}")
    return Stage(index=index, r=r, selection=selection, complex=K, groups=groups, bases=bases, trusted=trusted)


def build_complement_tower(X: FiniteMetricSpace, base: Optional[SubsetSelection], r_grid: Sequence[float],
                           scale: float, max_degree: int = 2, ring: str = "gf2",
                           threads: Optional[int] = None) -> Tower:
    """Build the tower r -> X - N_r(base) and all induced maps.

    Args:
        X: The space
        base: Base selection A (default: the basepoint)
        r_grid: Strictly increasing radii
        scale: Rips scale, the same at every stage
        max_degree: Highest cohomology degree (complexes go one dimension higher)
        ring: "gf2", "q" or "z" (maps over Z are computed on the free part over Q)
        threads: Worker cap for stage construction

    Returns:
        Tower: Immutable tower

    Raises:
        EmptyTower: if not even the first complement is nonempty
    """
    if base is None:
        base = X.base_selection()
    if any(b <= a for a, b in zip(r_grid, r_grid[1:])):
        raise ValueError("r_grid must be strictly increasing")
    workers = threads or get_default_params()["threads"]

    selections = []
    for r in r_grid:
        selection = _complement(X, base, r)
        if len(selection) == 0:
            logger.warning(f"Complement at r={r:g} is empty; truncating the tower after {len(selections)} stages")
            break
        selections.append((r, selection))
    if not selections:
        raise EmptyTower(f"Every complement of {X.name} in the grid is empty")

    limit = X.truncation_radius
    trusted = [limit is None or r <= limit - 2 * scale + TOL for r, _ in selections]
    for (r, _), ok in zip(selections, trusted):
        if not ok:
            logger.warning(f"Stage r={r:g} lies within 2*scale of the truncation edge; marked untrusted")

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [pool.submit(_build_stage, X, i, r, sel, scale, ring, max_degree, trusted[i])
                   for i, (r, sel) in enumerate(selections)]
        stages = [f.result() for f in futures]

    tower = Tower(space=X, base=base, scale=scale, ring=ring, max_degree=max_degree, stages=stages)
    field_ = field_for("q" if ring == "z" else ring)
    for i, source in enumerate(stages):
        for j in range(i + 1, len(stages)):
            target = stages[j]
            inc = inclusion(target.complex, source.complex)
            for k in range(max_degree + 1):
                columns = [target.bases[k].coordinates(inc.restrict(field_, rep, k))
                           for rep in source.bases[k].reps]
                tower.maps[(i, j, k)] = columns
                tower.ranks[(i, j, k)] = induced_rank(field_, columns)
    logger.info(f"Built tower of {len(stages)} stages over {X.name} (scale {scale:g}, ring {ring})")
    return tower


def colimit_analysis(tower: Tower, window: int = DEFAULT_WINDOW,
                     stability: int = DEFAULT_STABILITY) -> List[ColimitReport]:
    """Persistent ranks rank map(i, i+window) over the trusted stages, and a
    stabilization verdict per degree.

    The verdict is a finite-grid heuristic: STABILIZED(rank) when the last
    `stability` values agree.

    Raises:
        InsufficientStages: with fewer than window + stability trusted stages
    """
    if window < 1 or stability < 1:
        raise ValueError("window and stability must be positive")
    trusted = tower.trusted_indices()
    if len(trusted) < window + stability:
        raise InsufficientStages(f"Need {window + stability} trusted stages, tower has {len(trusted)}")
    reports = []
    for k in range(tower.max_degree + 1):
        sequence = [tower.rank(trusted[p], trusted[p + window], k) for p in range(len(trusted) - window)]
        tail = sequence[-stability:]
        if len(set(tail)) == 1:
            reports.append(ColimitReport(degree=k, sequence=sequence, verdict=STABILIZED, rank=tail[0]))
        else:
            reports.append(ColimitReport(degree=k, sequence=sequence, verdict=NON_STABILIZED))
    return reports


def tower_rows(tower: Tower) -> List[Dict[str, Any]]:
    """Plot table: one row per (stage, degree); the persistent rank is that of
    the map to the next stage (the Betti number at the last stage)."""
    rows = []
    last = len(tower.stages) - 1
    for stage in tower.stages:
        for k in range(tower.max_degree + 1):
            nxt = stage.index + 1 if stage.index < last else stage.index
            rows.append({
                "r": stage.r,
                "degree": k,
                "betti": stage.betti(k),
                "persistent_rank": tower.rank(stage.index, nxt, k),
            })
    return rows


def tower_to_dict(tower: Tower) -> Dict[str, Any]:
    return {
        "space": tower.space.name,
        "base": tower.base.sorted(),
        "scale": tower.scale,
        "ring": tower.ring,
        "max_degree": tower.max_degree,
        "truncation_radius": tower.space.truncation_radius,
        "stages": [stage.to_dict() for stage in tower.stages],
        "persistent_ranks": [
            {"from": i, "to": j, "degree": k, "rank": rank}
            for (i, j, k), rank in sorted(tower.ranks.items())
        ],
    }
