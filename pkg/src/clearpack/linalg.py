"""Exact rational scalars and dense rational linear algebra.

Everything here is exact: scalars are `fractions.Fraction` (always in lowest
terms, positive denominator), elimination is fraction-free (Bareiss) on
denominator-cleared integer rows, and pivoting is deterministic (first nonzero
in column order) so certificates are reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Optional, Sequence

Rational = Fraction


class SingularMatrixError(ValueError):
    """Raised when a square solve meets a rank-deficient matrix."""


def rat(value) -> Fraction:
    """Coerce ints, strings like '3/4' or '0.25', and Fractions to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass int, Fraction, or a 'p/q' string")
    return Fraction(value)


@dataclass(frozen=True)
class RatMatrix:
    """Dense row-major rational matrix."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows * cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RatMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat = []
        for row in rows:
            if len(row) != ncols:
                raise ValueError("ragged rows")
            flat.extend(rat(v) for v in row)
        return cls(nrows, ncols, tuple(flat))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls.from_rows(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        )

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def row_list(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "RatMatrix":
        flat = [self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)]
        return RatMatrix(self.cols, self.rows, tuple(flat))

    def mat_vec(self, vec: Sequence[Fraction]) -> list[Fraction]:
        if len(vec) != self.cols:
            raise ValueError("dimension mismatch")
        out = []
        for i in range(self.rows):
            base = i * self.cols
            out.append(sum((self.entries[base + j] * vec[j] for j in range(self.cols)), Fraction(0)))
        return out


def _integer_rows(rows: Iterable[Sequence[Fraction]]) -> list[list[int]]:
    """Clear denominators row by row (scaling a row never changes rank)."""
    out = []
    for row in rows:
        mult = 1
        for v in row:
            mult = lcm(mult, v.denominator)
        out.append([int(v * mult) for v in row])
    return out


def _bareiss_rank(int_rows: list[list[int]]) -> int:
    """Rank by fraction-free elimination; first-nonzero pivoting."""
    rows = [r[:] for r in int_rows]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    rank = 0
    prev = 1
    row_at = 0
    for col in range(ncols):
        pivot_row = None
        for i in range(row_at, nrows):
            if rows[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[row_at], rows[pivot_row] = rows[pivot_row], rows[row_at]
        piv = rows[row_at][col]
        for i in range(row_at + 1, nrows):
            # Bareiss: every lower row takes the same fraction-free update,
            # zero factor included (pure rescaling), or later exact divisions
            # by `prev` break.
            factor = rows[i][col]
            ri = rows[i]
            pr = rows[row_at]
            for j in range(col, ncols):
                ri[j] = (ri[j] * piv - factor * pr[j]) // prev
        prev = piv
        row_at += 1
        rank += 1
        if row_at == nrows:
            break
    return rank


def rank(matrix: RatMatrix) -> int:
    """Exact rank via Bareiss elimination on denominator-cleared rows."""
    if matrix.rows == 0 or matrix.cols == 0:
        return 0
    return _bareiss_rank(_integer_rows(matrix.row_list()))


def solve_square(matrix: RatMatrix, rhs: Sequence) -> list[Fraction]:
    """Exact solution of a nonsingular square system.

    Raises SingularMatrixError when rank < dimension.
    """
    n = matrix.rows
    if matrix.cols != n:
        raise ValueError("matrix must be square")
    rhs = [rat(v) for v in rhs]
    if len(rhs) != n:
        raise ValueError("rhs length mismatch")
    # Forward elimination in Fractions with first-nonzero pivoting, then
    # back-substitution.  Desk-scale systems; clarity over raw speed.
    aug = [list(matrix.row(i)) + [rhs[i]] for i in range(n)]
    for col in range(n):
        pivot_row = None
        for i in range(col, n):
            if aug[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            raise SingularMatrixError(f"rank deficiency at column {col}")
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        piv = aug[col][col]
        for i in range(col + 1, n):
            factor = aug[i][col]
            if factor == 0:
                continue
            scale = factor / piv
            row_i = aug[i]
            row_p = aug[col]
            for j in range(col, n + 1):
                row_i[j] -= scale * row_p[j]
    solution = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = aug[i][n]
        for j in range(i + 1, n):
            acc -= aug[i][j] * solution[j]
        solution[i] = acc / aug[i][i]
    return solution


def nullspace_vector(matrix: RatMatrix) -> Optional[list[Fraction]]:
    """A nonzero p with matrix^T p = 0, or None when the rows are independent.

    Normalized so the first nonzero entry is 1.  Deterministic: elimination
    processes rows in order and pivots on the first eligible column.
    """
    nrows, ncols = matrix.rows, matrix.cols
    if nrows == 0:
        return None
    # Eliminate rows while tracking multipliers: [row | e_i].  A row that
    # reduces to zero exposes its multiplier combination as p.
    work = [list(matrix.row(i)) + [Fraction(0)] * nrows for i in range(nrows)]
    for i in range(nrows):
        work[i][ncols + i] = Fraction(1)
    pivots: list[tuple[int, list[Fraction]]] = []  # (pivot col, row)
    for i in range(nrows):
        row = work[i]
        for col, prow in pivots:
            if row[col] != 0:
                scale = row[col] / prow[col]
                for j in range(ncols + nrows):
                    row[j] -= scale * prow[j]
        lead = None
        for j in range(ncols):
            if row[j] != 0:
                lead = j
                break
        if lead is None:
            p = row[ncols:]
            first = next(v for v in p if v != 0)
            return [v / first for v in p]
        pivots.append((lead, row))
    return None


def stack_rows(vectors: Sequence[Sequence]) -> RatMatrix:
    """Convenience: RatMatrix from an iterable of augmented row vectors."""
    return RatMatrix.from_rows(vectors)
