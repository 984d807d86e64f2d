"""
High-level drivers.

- coarse_cohomology: Hx(X) as the degree-shifted colimit of the reduced
  cohomology of ball complements (or the full-complex answer for bounded X)
- boundedly_supported_cohomology: Hb(X) by the same rules
- coarse_cohomology_of_complement: Hx(X - A) from the tower about A
- consistency_check_dA: the same tower over (X, d) and over (X/A, d_A)
- check_acyclicity_at_infinity: sampled check that far sets include
  homologically trivially into their controlled neighbourhoods
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

from app.algebra.linalg import SparseMatrix, field_for, solve_in_subspace
from app.cochains import full_complex_cohomology
from app.cohomology import QuotientBasis
from app.config import RINGS
from app.control import ControlFunctions
from app.errors import ComplementExhausted, MissingBasepoint
from app.simplicial import SimplicialComplex, boundary_matrix, inclusion, rips_complex
from app.spaces.generators import default_scale
from app.spaces.metric import TOL, FiniteMetricSpace, SubsetSelection, quotient_by_subset
from app.towers import (
    STABILIZED,
    ColimitReport,
    Tower,
    build_complement_tower,
    colimit_analysis,
    default_r_grid,
    tower_rows,
    tower_to_dict,
)

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)

CAVEAT = ("The identification of coarse cohomology with the colimit of complement cohomology "
          "assumes X is uniformly contractible at infinity; only the acyclicity surrogate is "
          "checked (see check_acyclicity_at_infinity).")

ZERO = "ZERO"
EXACT = "EXACT"


class CoarseParams(BaseModel):
    """Tower parameters shared by the drivers."""

    scale: Optional[float] = Field(default=None, ge=0.0)
    r_grid: Optional[List[float]] = None
    max_degree: int = Field(default=3, ge=0)
    ring: str = "gf2"
    window: int = Field(default=2, ge=1)
    stability: int = Field(default=3, ge=1)
    threads: Optional[int] = Field(default=None, ge=1)
    bounded: Optional[bool] = None

    @field_validator("ring")
    @classmethod
    def _known_ring(cls, value: str) -> str:
        if value not in RINGS:
            raise ValueError(f"ring must be one of {RINGS}, got {value!r}")
        return value


@dataclass
class DegreeResult:
    degree: int
    verdict: str
    rank: Optional[int]
    sequence: List[int] = field(default_factory=list)
    stage_betti: List[int] = field(default_factory=list)
    torsion: List[int] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        label = f"{self.verdict}({self.rank})" if self.verdict == STABILIZED else self.verdict
        return {
            "degree": self.degree,
            "verdict": label,
            "rank": self.rank,
            "sequence": self.sequence,
            "stage_betti": self.stage_betti,
            "torsion": self.torsion,
        }


@dataclass
class CoarseProfile:
    """Per-degree results with their provenance."""

    kind: str
    space: str
    bounded: bool
    degrees: List[DegreeResult]
    provenance: Dict[str, Any]
    caveat: str = CAVEAT
    tower: Optional[Tower] = field(default=None, repr=False)

    def rank(self, degree: int) -> Optional[int]:
        return self.degrees[degree].rank

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "kind": self.kind,
            "space": self.space,
            "bounded": self.bounded,
            "degrees": [d.to_dict() for d in self.degrees],
            "provenance": self.provenance,
            "caveat": self.caveat,
        }
        if self.tower is not None:
            out["tower"] = tower_to_dict(self.tower)
        return out


def _is_bounded(X: FiniteMetricSpace, params: CoarseParams) -> bool:
    if params.bounded is not None:
        return params.bounded
    return not X.unbounded_model


def _bounded_profile(X: FiniteMetricSpace, params: CoarseParams, kind: str) -> CoarseProfile:
    groups = full_complex_cohomology(X, min(params.max_degree, 3), params.ring)
    degrees = [DegreeResult(degree=g.degree, verdict=EXACT, rank=g.free_rank, torsion=g.torsion)
               for g in groups]
    for k in range(len(groups), params.max_degree + 1):
        degrees.append(DegreeResult(degree=k, verdict=EXACT, rank=0))
    return CoarseProfile(kind=kind, space=X.name, bounded=True, degrees=degrees,
                         provenance={"method": "full_complex", "points": X.size, "ring": params.ring})


def _resolved(X: FiniteMetricSpace, params: CoarseParams) -> Tuple[float, List[float]]:
    scale = params.scale if params.scale is not None else default_scale(X)
    r_grid = params.r_grid if params.r_grid is not None else default_r_grid(X, scale)
    return scale, r_grid


def _shifted_profile(X: FiniteMetricSpace, tower: Tower, params: CoarseParams, kind: str,
                     scale: float, r_grid: Sequence[float]) -> CoarseProfile:
    """Degree 0 is 0; degree n >= 1 is the colimit analysis of tower degree n - 1."""
    reports: List[ColimitReport] = colimit_analysis(tower, params.window, params.stability)
    degrees = [DegreeResult(degree=0, verdict=ZERO, rank=0)]
    for report in reports[:params.max_degree]:
        degrees.append(DegreeResult(
            degree=report.degree + 1,
            verdict=report.verdict,
            rank=report.rank,
            sequence=report.sequence,
            stage_betti=[stage.betti(report.degree) for stage in tower.stages],
        ))
    provenance = {
        "method": "complement_tower",
        "scale": scale,
        "r_grid": list(r_grid),
        "stages_used": tower.radii,
        "trusted_stages": [tower.stages[i].r for i in tower.trusted_indices()],
        "truncation_radius": X.truncation_radius,
        "ring": params.ring,
        "window": params.window,
        "stability": params.stability,
        "base": tower.base.sorted(),
    }
    for d in degrees[1:]:
        logger.info(f"{kind} of {X.name}: degree {d.degree} -> {d.to_dict()['verdict']} {d.sequence}")
    return CoarseProfile(kind=kind, space=X.name, bounded=False, degrees=degrees,
                         provenance=provenance, tower=tower)


def coarse_cohomology(X: FiniteMetricSpace, params: Optional[CoarseParams] = None) -> CoarseProfile:
    """Coarse cohomology Hx(X) up to params.max_degree.

    For an unbounded model the tower about the basepoint is built with
    cohomology degrees up to max_degree - 1; bounded spaces get the
    full-complex answer.

    Raises:
        MissingBasepoint: for an unbounded model without basepoint
        EmptyTower: if every complement is empty
    """
    params = params or CoarseParams()
    if _is_bounded(X, params):
        return _bounded_profile(X, params, "coarse")
    if X.basepoint is None:
        raise MissingBasepoint("Coarse cohomology of an unbounded model needs a basepoint")
    logger.warning(CAVEAT)
    scale, r_grid = _resolved(X, params)
    tower = build_complement_tower(X, X.base_selection(), r_grid, scale, max(params.max_degree - 1, 0),
                                   params.ring, params.threads)
    return _shifted_profile(X, tower, params, "coarse", scale, r_grid)


def boundedly_supported_cohomology(X: FiniteMetricSpace, params: Optional[CoarseParams] = None) -> CoarseProfile:
    """Hb(X): the ring in degree 0 for bounded X; for an unbounded model 0 in
    degree 0 and the shifted colimit above, shared with coarse_cohomology."""
    params = params or CoarseParams()
    if _is_bounded(X, params):
        return _bounded_profile(X, params, "bounded_support")
    profile = coarse_cohomology(X, params)
    profile.kind = "bounded_support"
    return profile


def coarse_cohomology_of_complement(X: FiniteMetricSpace, A: SubsetSelection,
                                    params: Optional[CoarseParams] = None) -> CoarseProfile:
    """Hx(X - A) as the shifted colimit of the tower r -> X - N_r(A).

    Raises:
        ComplementExhausted: if X - N_r(A) is empty for some grid radius
    """
    params = params or CoarseParams()
    scale, r_grid = _resolved(X, params)
    dx = X.distance_to(A)
    for r in r_grid:
        if not (dx > r + TOL).any():
            raise ComplementExhausted(f"X - N_{r:g}(A) is empty")
    tower = build_complement_tower(X, A, r_grid, scale, max(params.max_degree - 1, 0),
                                   params.ring, params.threads)
    return _shifted_profile(X, tower, params, "complement", scale, r_grid)


@dataclass
class DACheckReport:
    passed: bool
    compared_radii: List[float]
    mismatches: List[str]
    rows_d: List[Dict[str, Any]]
    rows_dA: List[Dict[str, Any]]
    colimit_d: List[Dict[str, Any]] = field(default_factory=list)
    colimit_dA: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": "PASS" if self.passed else "FAIL",
            "compared_radii": self.compared_radii,
            "mismatches": self.mismatches,
            "tower_d": self.rows_d,
            "tower_dA": self.rows_dA,
            "colimit_d": self.colimit_d,
            "colimit_dA": self.colimit_dA,
        }


def _mapped_simplices(K: SimplicialComplex, source_index: Sequence[int]) -> List[List[tuple]]:
    return [sorted(tuple(sorted(source_index[v] for v in s)) for s in level) for level in K.simplices]


def consistency_check_dA(X: FiniteMetricSpace, A: SubsetSelection,
                         params: Optional[CoarseParams] = None) -> DACheckReport:
    """Compare the tower about A over (X, d) with the tower about [A] over (X/A, d_A).

    For every stage with r > 2 * scale the two complexes must coincide (after
    mapping quotient points back to X), and so must the Betti numbers and the
    persistent ranks between compared stages.
    """
    params = params or CoarseParams()
    scale, r_grid = _resolved(X, params)
    degree = max(params.max_degree - 1, 0)
    Q = quotient_by_subset(X, A)
    tower_d = build_complement_tower(X, A, r_grid, scale, degree, params.ring, params.threads)
    tower_q = build_complement_tower(Q, Q.base_selection(), r_grid, scale, degree, params.ring, params.threads)

    mismatches = []
    if tower_d.radii != tower_q.radii:
        mismatches.append(f"Stage radii differ: {tower_d.radii} vs {tower_q.radii}")
    compared = [i for i, r in enumerate(tower_d.radii)
                if r > 2 * scale + TOL and i < len(tower_q.stages)]
    for i in compared:
        sd, sq = tower_d.stages[i], tower_q.stages[i]
        if _mapped_simplices(sd.complex, X.source_index) != _mapped_simplices(sq.complex, Q.source_index):
            mismatches.append(f"Complexes differ at r={sd.r:g}")
        for k in range(degree + 1):
            if sd.betti(k) != sq.betti(k):
                mismatches.append(f"Betti mismatch at r={sd.r:g}, degree {k}: {sd.betti(k)} vs {sq.betti(k)}")
    for a, i in enumerate(compared):
        for j in compared[a + 1:]:
            for k in range(degree + 1):
                if tower_d.rank(i, j, k) != tower_q.rank(i, j, k):
                    mismatches.append(f"Rank mismatch {i}->{j}, degree {k}")

    def _colimit(tower: Tower) -> List[Dict[str, Any]]:
        if len(tower.trusted_indices()) < params.window + params.stability:
            return []
        return [r.to_dict() for r in colimit_analysis(tower, params.window, params.stability)]

    passed = not mismatches
    if passed:
        logger.info(f"d_A consistency on {X.name}: PASS over {len(compared)} compared stages")
    else:
        logger.warning(f"d_A consistency on {X.name}: FAIL ({len(mismatches)} mismatches)")
    return DACheckReport(passed=passed, compared_radii=[tower_d.radii[i] for i in compared],
                         mismatches=mismatches, rows_d=tower_rows(tower_d), rows_dA=tower_rows(tower_q),
                         colimit_d=_colimit(tower_d), colimit_dA=_colimit(tower_q))


class SampleSpec(BaseModel):
    """Which far balls the acyclicity checker looks at."""

    radii: Optional[List[float]] = None
    centers_per_radius: int = Field(default=8, ge=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    centers: Optional[List[int]] = None


@dataclass
class Violation:
    center: int
    radius: float
    degree: int
    witness: List[Any]

    def to_dict(self) -> Dict[str, Any]:
        return {"center": self.center, "radius": self.radius, "degree": self.degree, "witness": self.witness}


@dataclass
class AcyclicityReport:
    passed: bool
    mode: str
    samples: int
    vacuous: bool
    violations: List[Violation]
    label: str = "necessary-condition check"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": "PASS" if self.passed else "FAIL",
            "mode": self.mode,
            "label": self.label,
            "samples": self.samples,
            "vacuous": self.vacuous,
            "violations": [v.to_dict() for v in self.violations],
        }


def _homology_basis(field_: Any, K: SimplicialComplex, k: int) -> QuotientBasis:
    """Reduced homology H_k(K) as cycles modulo boundaries."""
    if k == 0:
        augmentation = SparseMatrix(1, K.count(0), [{0: 1} for _ in range(K.count(0))], field_.name)
        kernel = augmentation
    else:
        kernel = boundary_matrix(K, k, field_.name)
    return QuotientBasis(field_, K.count(k), kernel, boundary_matrix(K, k + 1, field_.name))


def _ball(X: FiniteMetricSpace, x: int, r: float) -> SubsetSelection:
    return X.select(np.nonzero(X.dist[x] <= r + TOL)[0].tolist())


def check_acyclicity_at_infinity(X: FiniteMetricSpace, controls: ControlFunctions, sample: SampleSpec,
                                 scale: float, max_dim: int = 2, ring: str = "gf2", mode: str = "infinity",
                                 base: Optional[SubsetSelection] = None) -> AcyclicityReport:
    """Sampled check of uniform acyclicity at infinity.

    mode "infinity": B is a ball about a sampled center with
    d(b, B) >= mu(diam B); the target is N_{rho(diam B)}(B).
    mode "away": base A replaces b; B = B(x, r) with d(x, A) >= mu(r), the
    target is B(x, rho(r)) (never smaller than B).

    Every reduced homology class of Rips(B) in degrees < max_dim must bound
    in Rips(target); each class that does not is reported with its cycle.
    Failures are collected, not raised.
    """
    if mode not in ("infinity", "away"):
        raise ValueError(f"Unknown mode {mode!r}")
    if base is None:
        base = X.base_selection()
    field_ = field_for("q" if ring == "z" else ring)
    radii = sample.radii if sample.radii is not None else [scale * m for m in (1, 2, 3, 4, 5)]
    rng = np.random.default_rng(sample.seed)
    to_base = X.distance_to(base)

    violations: List[Violation] = []
    count = 0
    for r in radii:
        threshold = controls.mu(r)
        if sample.centers is not None:
            chosen = [c for c in sorted(set(sample.centers)) if to_base[c] >= threshold - TOL]
        else:
            candidates = np.nonzero(to_base >= threshold - TOL)[0]
            take = min(sample.centers_per_radius, len(candidates))
            chosen = sorted(int(c) for c in rng.choice(candidates, size=take, replace=False)) if take else []
        for x in chosen:
            B = _ball(X, x, r)
            diam = X.diameter_of(B)
            if mode == "infinity":
                if to_base[B.sorted()].min() < controls.mu(diam) - TOL:
                    continue
                reach = controls.rho(diam)
                target = X.select(np.nonzero(X.distance_to(B) <= reach + TOL)[0].tolist())
            else:
                target = _ball(X, x, max(controls.rho(r), r))
            count += 1
            KB = rips_complex(X, scale, max_dim, selection=B.members)
            KN = rips_complex(X, scale, max_dim, selection=target.members)
            inc = inclusion(KB, KN)
            for k in range(max_dim):
                basis = _homology_basis(field_, KB, k)
                if basis.rank == 0:
                    continue
                boundary = boundary_matrix(KN, k + 1, field_.name)
                for rep in basis.reps:
                    pushed = inc.push(field_, rep, k)
                    if solve_in_subspace(boundary, dict(field_.entries(pushed))) is None:
                        witness = [[list(KB.level(k)[i]), field_.to_json(c)] for i, c in field_.entries(rep)]
                        violations.append(Violation(center=x, radius=r, degree=k, witness=witness))
                        logger.info(f"Class in degree {k} of B({x}, {r:g}) survives in its {mode} target")
                        break

    vacuous = count == 0
    if vacuous:
        logger.warning("No sampled set met the far condition; the check is vacuous")
    passed = not violations
    logger.info(f"Acyclicity ({mode}) on {X.name}: {'PASS' if passed else 'FAIL'} over {count} samples")
    return AcyclicityReport(passed=passed, mode=mode, samples=count, vacuous=vacuous, violations=violations)
