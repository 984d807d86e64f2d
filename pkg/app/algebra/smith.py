"""
Integer coefficients: the ring Z and Smith normal form.

smith_normal_form is the dense reference path with unimodular transforms.
invariant_factors is the entry point used for cohomology: it removes unit
pivots from the sparse matrix first and only runs the dense path on what is
left.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

from app.algebra.linalg import SparseMatrix
from app.errors import CoarseError

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)

# Transforms are checked for unimodularity up to this size
DEFAULT_DET_CHECK_LIMIT = 60

IntMatrix = List[List[int]]


class IntegerRing:
    """The ring of integers (Python ints are arbitrary precision)."""

    name = "z"
    zero = 0
    one = 1

    def convert(self, value: Any) -> int:
        if isinstance(value, int):
            return value
        if getattr(value, "denominator", 1) != 1:
            raise ValueError(f"{value!r} is not an integer")
        return int(value)

    def is_zero(self, a: int) -> bool:
        return a == 0

    def add(self, a: int, b: int) -> int:
        return a + b

    def neg(self, a: int) -> int:
        return -a

    def mul(self, a: int, b: int) -> int:
        return a * b

    def to_json(self, a: int) -> int:
        return int(a)

    def __repr__(self) -> str:
        return "IntegerRing()"


@dataclass
class SNFResult:
    """Nonzero diagonal invariants d1 | d2 | ... and optional transforms."""

    invariants: List[int]
    shape: Tuple[int, int]
    U: Optional[IntMatrix] = None
    V: Optional[IntMatrix] = None
    D: Optional[IntMatrix] = None
    unit_pivots: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.invariants)

    @property
    def torsion(self) -> List[int]:
        return [d for d in self.invariants if d > 1]


def _identity(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _as_rows(matrix: Union[SparseMatrix, Sequence[Sequence[int]]]) -> IntMatrix:
    if isinstance(matrix, SparseMatrix):
        return [[int(x) for x in row] for row in matrix.to_dense()]
    return [[int(x) for x in row] for row in matrix]


def smith_normal_form(matrix: Union[SparseMatrix, Sequence[Sequence[int]]],
                      validate: bool = True) -> SNFResult:
    """Smith normal form with transforms, so that U * M * V = D.

    Pivots on the smallest nonzero entry of the remaining block, first
    minimal index in row-major order.

    Args:
        matrix: Integer matrix (dense rows or SparseMatrix)
        validate: Check U*M*V == D and, for small sizes, |det U| = |det V| = 1

    Returns:
        SNFResult with invariants and transforms
    """
    original = _as_rows(matrix)
    A = [row[:] for row in original]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i: int, j: int) -> None:
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int) -> None:
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(target: int, source: int, q: int) -> None:
        # row_target += q * row_source
        A[target] = [a + q * b for a, b in zip(A[target], A[source])]
        U[target] = [a + q * b for a, b in zip(U[target], U[source])]

    def add_col(target: int, source: int, q: int) -> None:
        for row in A:
            row[target] += q * row[source]
        for row in V:
            row[target] += q * row[source]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                a = A[i][j]
                if a and (best is None or abs(a) < best[0]):
                    best = (abs(a), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    clean = clean and A[t][j] == 0
            if not clean:
                # A remainder smaller than the pivot survived; move it in.
                best = None
                for i in range(t, m):
                    if A[i][t] and (best is None or abs(A[i][t]) < best[0]):
                        best = (abs(A[i][t]), i, t)
                for j in range(t, n):
                    if A[t][j] and (best is None or abs(A[t][j]) < best[0]):
                        best = (abs(A[t][j]), t, j)
                _, i, j = best
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            offending = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                              if A[i][j] % p), None)
            if offending is None:
                break
            add_row(t, offending[0], 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1

    invariants = [A[i][i] for i in range(min(m, n)) if A[i][i]]
    result = SNFResult(invariants=invariants, shape=(m, n), U=U, V=V, D=A)
    if validate:
        _validate(original, result)
    return result


def _validate(original: IntMatrix, result: SNFResult) -> None:
    m, n = result.shape
    if m and n:
        product = np.array(result.U, dtype=object).dot(np.array(original, dtype=object)).dot(
            np.array(result.V, dtype=object))
        if product.tolist() != result.D:
            raise CoarseError("Smith normal form failed reconstruction U*M*V == D")
    for a, b in zip(result.invariants, result.invariants[1:]):
        if b % a:
            raise CoarseError(f"Smith invariants violate divisibility: {a} does not divide {b}")
    for name, T in (("U", result.U), ("V", result.V)):
        size = len(T)
        if 0 < size <= DEFAULT_DET_CHECK_LIMIT:
            det = DomainMatrix([[ZZ(x) for x in row] for row in T], (size, size), ZZ).det()
            if abs(int(det)) != 1:
                raise CoarseError(f"Smith transform {name} is not unimodular (det={det})")


def invariant_factors(matrix: SparseMatrix) -> SNFResult:
    """Nonzero invariant factors of an integer matrix.

    Unit pivots are eliminated sparsely (each contributes an invariant 1 and
    is removed by a Schur complement step); the residual block goes through
    smith_normal_form.

    Args:
        matrix: Integer SparseMatrix (ring "z", or any ring with int entries)

    Returns:
        SNFResult without transforms
    """
    rows: Dict[int, Dict[int, int]] = {}
    cols: Dict[int, set] = {}
    for j, col in enumerate(matrix.columns):
        for i, value in col.items():
            v = int(value)
            if v:
                rows.setdefault(i, {})[j] = v
                cols.setdefault(j, set()).add(i)

    units = 0
    while True:
        pivot = _find_unit(rows)
        if pivot is None:
            break
        r, c = pivot
        prow = rows.pop(r)
        u = prow[c]
        for j in prow:
            cols[j].discard(r)
        for i in sorted(cols.pop(c, ())):
            row = rows[i]
            a = row.pop(c)
            factor = a * u
            for j, b in prow.items():
                if j == c:
                    continue
                value = row.get(j, 0) - factor * b
                if value:
                    if j not in row:
                        cols[j].add(i)
                    row[j] = value
                elif j in row:
                    del row[j]
                    cols[j].discard(i)
            if not row:
                del rows[i]
        units += 1

    residual_rows = sorted(i for i in rows if rows[i])
    residual_cols = sorted({j for i in residual_rows for j in rows[i]})
    invariants = [1] * units
    if residual_rows:
        index = {j: k for k, j in enumerate(residual_cols)}
        dense = [[0] * len(residual_cols) for _ in residual_rows]
        for k, i in enumerate(residual_rows):
            for j, v in rows[i].items():
                dense[k][index[j]] = v
        size = max(len(residual_rows), len(residual_cols))
        logger.debug(f"invariant_factors: {units} unit pivots, dense residual {len(residual_rows)}x{len(residual_cols)}")
        tail = smith_normal_form(dense, validate=size <= DEFAULT_DET_CHECK_LIMIT)
        invariants.extend(tail.invariants)
    invariants.sort()
    return SNFResult(invariants=invariants, shape=matrix.shape, unit_pivots=units)


def _find_unit(rows: Dict[int, Dict[int, int]]) -> Optional[Tuple[int, int]]:
    best = None
    for i, row in rows.items():
        for j, v in row.items():
            if v == 1 or v == -1:
                # Prefer short rows to limit fill-in.
                key = (len(row), i, j)
                if key[0] <= 2:
                    return i, j
                if best is None or key < best:
                    best = key
    return None if best is None else (best[1], best[2])
