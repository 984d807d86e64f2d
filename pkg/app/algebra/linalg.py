"""
Sparse exact linear algebra over GF(2) and the rationals.

The shared primitive is Echelon, an incrementally built basis whose rows carry
coordinate tags. Rank, kernel, membership, coordinates and constrained solves
are all expressed through it.
"""

import logging
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from app.algebra.interfaces import Field
from app.errors import DimensionMismatch, RingMismatch

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)

# Type definitions
ChainVector = Dict[int, Any]


class SparseMatrix:
    """Column-major sparse matrix with exact entries.

    Entries are ints (or exact rationals when ring == "q"); zeros are never
    stored and GF(2) entries are stored reduced mod 2.
    """

    def __init__(self, nrows: int, ncols: int, columns: Optional[Sequence[Mapping[int, Any]]] = None,
                 ring: str = "q"):
        self.nrows = nrows
        self.ncols = ncols
        self.ring = ring
        self.columns: List[Dict[int, Any]] = []
        columns = list(columns) if columns is not None else [{} for _ in range(ncols)]
        if len(columns) != ncols:
            raise DimensionMismatch(f"Expected {ncols} columns, got {len(columns)}")
        for col in columns:
            clean = {}
            for i, value in col.items():
                if not 0 <= i < nrows:
                    raise DimensionMismatch(f"Row index {i} out of range for {nrows} rows")
                if ring == "gf2":
                    value = int(value) & 1
                if value != 0:
                    clean[i] = value
            self.columns.append(clean)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[Any]], ring: str = "q") -> "SparseMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        columns = [{i: rows[i][j] for i in range(nrows) if rows[i][j] != 0} for j in range(ncols)]
        return cls(nrows, ncols, columns, ring)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def nnz(self) -> int:
        return sum(len(col) for col in self.columns)

    def to_dense(self) -> List[List[Any]]:
        rows = [[0] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.columns):
            for i, value in col.items():
                rows[i][j] = value
        return rows

    def transpose(self) -> "SparseMatrix":
        columns: List[Dict[int, Any]] = [{} for _ in range(self.nrows)]
        for j, col in enumerate(self.columns):
            for i, value in col.items():
                columns[i][j] = value
        return SparseMatrix(self.ncols, self.nrows, columns, self.ring)

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"Cannot multiply {self.shape} by {other.shape}")
        if self.ring != other.ring:
            raise RingMismatch(f"Cannot multiply {self.ring} by {other.ring} matrices")
        columns = []
        for col in other.columns:
            acc: Dict[int, Any] = {}
            for k, b in col.items():
                for i, a in self.columns[k].items():
                    acc[i] = acc.get(i, 0) + a * b
            columns.append(acc)
        return SparseMatrix(self.nrows, other.ncols, columns, self.ring)

    def is_zero(self) -> bool:
        return all(not col for col in self.columns)

    def with_ring(self, ring: str) -> "SparseMatrix":
        return SparseMatrix(self.nrows, self.ncols, self.columns, ring)

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}x{self.ncols}, ring={self.ring}, nnz={self.nnz})"


def field_for(ring: str) -> Field:
    """Resolve a ring tag to a field backend.

    Raises:
        RingMismatch: if the ring is not a field
    """
    from app.algebra import get_ring

    backend = get_ring(ring)
    if not isinstance(backend, Field):
        raise RingMismatch(f"Ring {ring!r} is not a field; use the Smith normal form path")
    return backend


class Echelon:
    """Incremental echelon basis with coordinate tags.

    Each stored row (v, t) is keyed by its pivot (lowest nonzero index).
    Reducing a vector subtracts stored rows until its pivot is new or it
    vanishes; the tag records the same combination of the row tags.
    """

    def __init__(self, field: Field):
        self.field = field
        self._rows: Dict[int, Tuple[Any, Any]] = {}
        self._binary = field.name == "gf2"

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vector: Any, tag: Any = None) -> Tuple[Any, Any]:
        rows = self._rows
        f = self.field
        if tag is None:
            tag = f.zero_vector()
        if self._binary:
            while vector:
                p = (vector & -vector).bit_length() - 1
                hit = rows.get(p)
                if hit is None:
                    break
                vector ^= hit[0]
                tag ^= hit[1]
            return vector, tag
        p = f.pivot(vector)
        while p is not None and p in rows:
            row, row_tag = rows[p]
            c = f.neg(f.div(f.coeff(vector, p), f.coeff(row, p)))
            vector = f.axpy(vector, c, row)
            tag = f.axpy(tag, c, row_tag)
            p = f.pivot(vector)
        return vector, tag

    def add(self, vector: Any, tag: Any = None) -> bool:
        """Insert a vector; returns False when it is already in the span."""
        v, t = self.reduce(vector, tag)
        p = self.field.pivot(v)
        if p is None:
            return False
        self._rows[p] = (v, t)
        return True

    def insert_reduced(self, vector: Any, tag: Any) -> None:
        """Store a vector already returned nonzero by reduce()."""
        self._rows[self.field.pivot(vector)] = (vector, tag)

    def contains(self, vector: Any) -> bool:
        v, _ = self.reduce(vector)
        return self.field.is_zero_vector(v)

    def coordinates(self, vector: Any) -> Optional[Any]:
        """Express vector in the inserted rows, as a combination of their tags.

        Returns:
            The tag combination, or None when the vector is not in the span
        """
        v, t = self.reduce(vector)
        if not self.field.is_zero_vector(v):
            return None
        f = self.field
        return f.axpy(f.zero_vector(), f.neg(f.one), t)


def rank_kernel_image(matrix: SparseMatrix) -> Tuple[int, List[Any], List[Any]]:
    """Exact rank, kernel and image of a matrix over a field.

    Args:
        matrix: The matrix; its ring must be gf2 or q

    Returns:
        Tuple of (rank, kernel basis as column-space vectors, image basis as
        row-space vectors), vectors in the field's representation
    """
    field = field_for(matrix.ring)
    echelon = Echelon(field)
    kernel = []
    image = []
    for j, col in enumerate(matrix.columns):
        v = field.vector(col)
        v, t = echelon.reduce(v, field.unit(j))
        p = field.pivot(v)
        if p is None:
            kernel.append(t)
        else:
            echelon.insert_reduced(v, t)
            image.append(field.vector(col))
    rank = len(image)
    logger.debug(f"rank_kernel_image {matrix}: rank={rank}, nullity={len(kernel)}")
    return rank, kernel, image


def matrix_rank(matrix: SparseMatrix) -> int:
    field = field_for(matrix.ring)
    echelon = Echelon(field)
    for col in matrix.columns:
        echelon.add(field.vector(col))
    return len(echelon)


def rank_of_vectors(field: Field, vectors: Iterable[Any]) -> int:
    echelon = Echelon(field)
    for v in vectors:
        echelon.add(v)
    return len(echelon)


def solve_in_subspace(boundary: SparseMatrix, z: Mapping[int, Any],
                      column_mask: Optional[Iterable[int]] = None) -> Optional[ChainVector]:
    """Find c with boundary @ c = z using only the allowed columns.

    Args:
        boundary: The matrix (typically a boundary matrix) over a field
        z: Sparse target vector, row index -> coefficient
        column_mask: Allowed column indices (None allows every column)

    Returns:
        Sparse solution column index -> coefficient, or None if z is not in
        the span of the allowed columns
    """
    field = field_for(boundary.ring)
    for i in z:
        if not 0 <= i < boundary.nrows:
            raise DimensionMismatch(f"Target index {i} outside {boundary.nrows} rows")
    target = field.vector(z)
    if field.is_zero_vector(target):
        return {}
    allowed = range(boundary.ncols) if column_mask is None else sorted(set(column_mask))
    echelon = Echelon(field)
    for j in allowed:
        if not 0 <= j < boundary.ncols:
            raise DimensionMismatch(f"Column index {j} outside {boundary.ncols} columns")
        col = boundary.columns[j]
        if col:
            echelon.add(field.vector(col), field.unit(j))
    coords = echelon.coordinates(target)
    if coords is None:
        return None
    return {j: c for j, c in field.entries(coords)}
