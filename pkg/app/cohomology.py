"""
Cohomology of finite cochain complexes.

Groups are computed from the coboundary matrices: ranks over a field, invariant
factors over Z. Explicit bases (QuotientBasis) are used where maps between
groups are needed.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from app.algebra import get_ring
from app.algebra.interfaces import Field
from app.algebra.linalg import Echelon, SparseMatrix, field_for, matrix_rank, rank_kernel_image
from app.algebra.smith import invariant_factors

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)


@dataclass
class CohomologyGroup:
    """Free rank plus torsion invariants (Z only) in one degree."""

    degree: int
    free_rank: int
    torsion: List[int] = field(default_factory=list)

    @property
    def betti(self) -> int:
        return self.free_rank

    def to_dict(self) -> Dict[str, Any]:
        return {"degree": self.degree, "free_rank": self.free_rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def groups_from_coboundaries(dims: Sequence[int], coboundaries: Dict[int, SparseMatrix], ring: str,
                             max_degree: int, augmented: bool = False) -> List[CohomologyGroup]:
    """Cohomology groups H^0..H^max_degree of a cochain complex.

    Args:
        dims: dims[k] is the rank of C^k (needed up to max_degree)
        coboundaries: coboundaries[k] is delta^k : C^k -> C^{k+1}, up to max_degree
        ring: "gf2", "q" or "z"
        max_degree: Highest degree to report
        augmented: Use the augmented complex (reduced cohomology); delta^{-1}
            is then the column of ones

    Returns:
        List of CohomologyGroup, one per degree
    """
    get_ring(ring)
    ranks: Dict[int, int] = {}
    torsion: Dict[int, List[int]] = {}
    for k in range(-1, max_degree + 1):
        if k == -1:
            if augmented and dims[0] > 0:
                ranks[-1] = 1
                torsion[-1] = []
            else:
                ranks[-1] = 0
                torsion[-1] = []
            continue
        matrix = coboundaries.get(k)
        if matrix is None or matrix.nnz == 0:
            ranks[k], torsion[k] = 0, []
        elif ring == "z":
            snf = invariant_factors(matrix)
            ranks[k], torsion[k] = snf.rank, snf.torsion
        else:
            ranks[k], torsion[k] = matrix_rank(matrix.with_ring(ring)), []

    groups = []
    for k in range(max_degree + 1):
        free = dims[k] - ranks[k] - ranks[k - 1]
        groups.append(CohomologyGroup(degree=k, free_rank=free,
                                      torsion=list(torsion[k - 1]) if ring == "z" else []))
    return groups


class QuotientBasis:
    """Basis of ker(M) / (im(P) + extra), with coordinates of classes.

    Used for cohomology (M = delta^k, P = delta^{k-1}) and for homology
    (M = boundary_k, P = boundary_{k+1}). Representatives are kernel vectors
    of M that stay independent modulo the image.
    """

    def __init__(self, field: Field, dim: int, kernel_of: Optional[SparseMatrix],
                 image_of: Optional[SparseMatrix], extra_image: Sequence[Any] = ()):
        self.field = field
        self.dim = dim
        if kernel_of is None or kernel_of.ncols == 0:
            cycles = [field.unit(j) for j in range(dim)]
        else:
            _, cycles, _ = rank_kernel_image(kernel_of.with_ring(field.name))
        echelon = Echelon(field)
        if image_of is not None:
            for col in image_of.with_ring(field.name).columns:
                echelon.add(field.vector(col))
        for v in extra_image:
            echelon.add(v)
        self.image_rank = len(echelon)
        self.reps: List[Any] = []
        for z in cycles:
            if echelon.add(z, field.unit(len(self.reps))):
                self.reps.append(z)
        self._echelon = echelon

    @property
    def rank(self) -> int:
        return len(self.reps)

    def coordinates(self, cycle: Any) -> Any:
        """Coordinates of the class of a cycle in terms of reps.

        Raises:
            ValueError: if the vector is not a cycle of this complex
        """
        coords = self._echelon.coordinates(cycle)
        if coords is None:
            raise ValueError("Vector is not in the cycle space")
        return coords


def cohomology_basis(ring: str, dims: Sequence[int], coboundaries: Dict[int, SparseMatrix],
                     degree: int, augmented: bool = True) -> QuotientBasis:
    """Cocycle representatives of H^degree over a field (Z maps use Q)."""
    field = field_for("q" if ring == "z" else ring)
    extra = []
    if degree == 0 and augmented and dims[0] > 0:
        extra = [field.vector({j: 1 for j in range(dims[0])})]
    delta = coboundaries.get(degree)
    previous = coboundaries.get(degree - 1) if degree > 0 else None
    return QuotientBasis(field, dims[degree], delta, previous, extra)


def induced_rank(field: Field, columns: Sequence[Any]) -> int:
    echelon = Echelon(field)
    for col in columns:
        echelon.add(col)
    return len(echelon)

