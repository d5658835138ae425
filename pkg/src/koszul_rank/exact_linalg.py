"""Exact dense linear algebra over arbitrary-precision rationals.

Everything downstream (flattening ranks, determinant identities, border-rank
certificates) reduces to exact determinants and ranks, so this module is the
workhorse.  Matrices store ``fractions.Fraction`` entries; determinants and
ranks go through fraction-free (Bareiss) elimination on an integer-scaled copy
of the matrix, which keeps intermediate entries polynomially sized instead of
letting rational numerators blow up.

Also provides the two classical determinant identities used throughout:

  schur_block_det    det [[X,Y],[Z,W]] = det(X) det(W - Z X^-1 Y)
  det_rank_update    det(A + U V^t)   = det(A) det(Id + V^t A^-1 U)

All values are immutable; every function is pure and safe to call from
multiple threads.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


def _coerce(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


class ExactMatrix:
    """Dense row-major matrix of exact rationals."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, entries: Sequence[Sequence]):
        rows = [tuple(_coerce(x) for x in row) for row in entries]
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged rows")
        self.rows = len(rows)
        self.cols = len(rows[0]) if rows else 0
        self._e = tuple(rows)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        zero = Fraction(0)
        return cls([[zero] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)])

    @classmethod
    def from_blocks(cls, grid: Sequence[Sequence["ExactMatrix"]]) -> "ExactMatrix":
        """Assemble a matrix from a rectangular grid of equally shaped blocks."""
        out: list[list[Fraction]] = []
        for block_row in grid:
            height = block_row[0].rows
            for i in range(height):
                out.append([x for block in block_row for x in block.row(i)])
        return cls(out)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._e[i]

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        i, j = key
        return self._e[i][j]

    def __iter__(self):
        return iter(self._e)

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactMatrix) and self._e == other._e

    def __hash__(self) -> int:
        return hash(self._e)

    def __repr__(self) -> str:
        return f"ExactMatrix({self.rows}x{self.cols})"

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.shape != other.shape:
            raise ValueError("incompatible shapes")
        return ExactMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._e, other._e)])

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.shape != other.shape:
            raise ValueError("incompatible shapes")
        return ExactMatrix([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self._e, other._e)])

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix([[-a for a in r] for r in self._e])

    def __mul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.cols != other.rows:
                raise ValueError("incompatible shapes")
            cols = other.transpose()._e
            return ExactMatrix(
                [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self._e]
            )
        scalar = _coerce(other)
        return ExactMatrix([[a * scalar for a in r] for r in self._e])

    def __rmul__(self, other):
        return self.__mul__(other)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix([list(col) for col in zip(*self._e)] if self._e else [])

    def is_zero(self) -> bool:
        return all(a == 0 for r in self._e for a in r)

    def trace(self) -> Fraction:
        if not self.is_square:
            raise ValueError("trace of non-square matrix")
        return sum((self._e[i][i] for i in range(self.rows)), Fraction(0))


def commutator(x: ExactMatrix, y: ExactMatrix) -> ExactMatrix:
    """[X, Y] = XY - YX, for square matrices of equal size."""
    if not (x.is_square and y.is_square and x.shape == y.shape):
        raise ValueError("incompatible shapes")
    return x * y - y * x


def _integer_grid(m: ExactMatrix) -> tuple[list[list[int]], Fraction]:
    """Scale each row to integers; det(m) = det(grid) / scale."""
    grid: list[list[int]] = []
    scale = Fraction(1)
    for row in m:
        d = math.lcm(*(x.denominator for x in row)) if row else 1
        scale *= d
        grid.append([int(x * d) for x in row])
    return grid, scale


def _bareiss_det(a: list[list[int]], n: int) -> int:
    sign = 1
    prev = 1
    for k in range(n - 1):
        piv, best = -1, None
        for i in range(k, n):
            v = a[i][k]
            if v != 0:
                size = abs(v)
                if best is None or size < best:
                    best, piv = size, i
        if piv < 0:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        pk = a[k][k]
        row_k = a[k]
        for i in range(k + 1, n):
            row_i = a[i]
            aik = row_i[k]
            for j in range(k + 1, n):
                quotient, remainder = divmod(row_i[j] * pk - aik * row_k[j], prev)
                if remainder:  # the fraction-free update divides exactly; anything else is a bug
                    raise ArithmeticError("inexact division in fraction-free elimination")
                row_i[j] = quotient
            row_i[k] = 0
        prev = pk
    return sign * a[n - 1][n - 1] if n > 0 else sign


def det_exact(m: ExactMatrix) -> Fraction:
    """Exact determinant via fraction-free elimination."""
    if not m.is_square:
        raise ValueError("determinant of non-square matrix")
    if m.rows == 0:
        return Fraction(1)
    grid, scale = _integer_grid(m)
    return Fraction(_bareiss_det(grid, m.rows)) / scale


def rank_exact(m: ExactMatrix) -> int:
    """Exact rank over the rationals (fraction-free row echelon)."""
    nrows, ncols = m.shape
    if nrows == 0 or ncols == 0:
        return 0
    a, _ = _integer_grid(m)
    r = 0
    prev = 1
    for c in range(ncols):
        if r == nrows:
            break
        piv, best = -1, None
        for i in range(r, nrows):
            v = a[i][c]
            if v != 0:
                size = abs(v)
                if best is None or size < best:
                    best, piv = size, i
        if piv < 0:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
        prc = a[r][c]
        row_r = a[r]
        for i in range(r + 1, nrows):
            row_i = a[i]
            aic = row_i[c]
            for j in range(c + 1, ncols):
                quotient, remainder = divmod(row_i[j] * prc - aic * row_r[j], prev)
                if remainder:
                    raise ArithmeticError("inexact division in fraction-free elimination")
                row_i[j] = quotient
            row_i[c] = 0
        prev = prc
        r += 1
    return r


def invert(m: ExactMatrix) -> ExactMatrix:
    """Exact inverse (Gauss-Jordan); raises ValueError on singular input."""
    if not m.is_square:
        raise ValueError("inverse of non-square matrix")
    n = m.rows
    a = [list(m.row(i)) + [Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), -1)
        if piv < 0:
            raise ValueError("matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        inv_p = 1 / a[c][c]
        a[c] = [x * inv_p for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return ExactMatrix([row[n:] for row in a])


def schur_block_det(x: ExactMatrix, y: ExactMatrix, z: ExactMatrix, w: ExactMatrix) -> Fraction:
    """det of [[X,Y],[Z,W]] computed as det(X) * det(W - Z X^-1 Y).

    X must be invertible (n x n); Y is n x m, Z is m x n, W is m x m.
    Equals det_exact of the assembled (n+m) x (n+m) block matrix.
    """
    n, m = x.rows, w.rows
    if not (x.is_square and w.is_square and y.shape == (n, m) and z.shape == (m, n)):
        raise ValueError("incompatible shapes")
    try:
        x_inv = invert(x)
    except ValueError:
        raise ValueError("Schur pivot singular") from None
    return det_exact(x) * det_exact(w - z * x_inv * y)


def det_rank_update(a: ExactMatrix, u: ExactMatrix, v: ExactMatrix) -> Fraction:
    """det(A + U V^t) computed as det(A) * det(Id + V^t A^-1 U).

    A must be invertible (n x n); U and V are n x m.
    """
    n = a.rows
    if not (a.is_square and u.rows == n and v.rows == n and u.cols == v.cols):
        raise ValueError("incompatible shapes")
    try:
        a_inv = invert(a)
    except ValueError:
        raise ValueError("matrix determinant lemma pivot singular") from None
    m = u.cols
    return det_exact(a) * det_exact(ExactMatrix.identity(m) + v.transpose() * a_inv * u)


def random_int_matrix(rng: random.Random, rows: int, cols: int, lo: int = -9, hi: int = 9) -> ExactMatrix:
    return ExactMatrix([[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)])


def random_invertible(rng: random.Random, n: int, lo: int = -9, hi: int = 9) -> ExactMatrix:
    """Random integer matrix, resampled until nonsingular."""
    while True:
        m = random_int_matrix(rng, n, n, lo, hi)
        if det_exact(m) != 0:
            return m


def _format_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def matrix_to_json(m: ExactMatrix) -> dict:
    """Matrix literal: {"rows": r, "cols": c, "entries": [["p/q", ...], ...]}."""
    return {
        "rows": m.rows,
        "cols": m.cols,
        "entries": [[_format_rational(x) for x in row] for row in m],
    }


def matrix_from_json(obj: dict) -> ExactMatrix:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    entries = obj["entries"]
    if len(entries) != rows or any(len(r) != cols for r in entries):
        raise ValueError("matrix literal shape mismatch")
    return ExactMatrix([[Fraction(str(x)) for x in row] for row in entries])


def vector_to_json(v: Iterable[Fraction]) -> list[str]:
    return [_format_rational(_coerce(x)) for x in v]


def vector_from_json(items: Iterable) -> tuple[Fraction, ...]:
    return tuple(Fraction(str(x)) for x in items)
