"""Dense rational matrices with exact rank, determinant and nullspace.

Rank uses sparse fraction-free elimination on integer rows (denominators are
cleared row by row), which keeps the section-space matrices of the cohomology
engine cheap even at a few hundred rows.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


class ScalarMatrix:
    """An immutable nrows x ncols matrix of Fractions.

    Dimensions are stored explicitly so that empty matrices (zero rows or
    zero columns) keep their shape.
    """

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, rows=None):
        if nrows < 0 or ncols < 0:
            raise ValueError(f"negative shape {nrows}x{ncols}")
        if rows is None:
            data = tuple((Fraction(0),) * ncols for _ in range(nrows))
        else:
            data = tuple(tuple(Fraction(v) for v in row) for row in rows)
            if len(data) != nrows or any(len(row) != ncols for row in data):
                raise ValueError(f"rows do not match declared shape {nrows}x{ncols}")
        self.nrows = nrows
        self.ncols = ncols
        self._rows = data

    @classmethod
    def from_rows(cls, rows) -> ScalarMatrix:
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, rows)

    @classmethod
    def from_sparse(cls, nrows: int, ncols: int, entries: dict) -> ScalarMatrix:
        dense = [[0] * ncols for _ in range(nrows)]
        for (i, j), v in entries.items():
            dense[i][j] = v
        return cls(nrows, ncols, dense)

    @classmethod
    def identity(cls, size: int) -> ScalarMatrix:
        return cls(size, size, [[int(i == j) for j in range(size)] for i in range(size)])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def rows(self) -> tuple:
        return self._rows

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, ScalarMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, self._rows))

    def __repr__(self):
        return f"ScalarMatrix({self.nrows}x{self.ncols})"

    def transpose(self) -> ScalarMatrix:
        return ScalarMatrix(self.ncols, self.nrows, [list(c) for c in zip(*self._rows)]
                            if self.nrows else [[] for _ in range(self.ncols)])

    def __matmul__(self, other: ScalarMatrix) -> ScalarMatrix:
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.transpose().rows
        out = [[sum((a * b for a, b in zip(row, col) if a and b), Fraction(0)) for col in cols]
               for row in self._rows]
        return ScalarMatrix(self.nrows, other.ncols, out)

    def is_zero(self) -> bool:
        return not any(any(row) for row in self._rows)

    def permuted(self, row_order=None, col_order=None) -> ScalarMatrix:
        rows = self._rows if row_order is None else [self._rows[i] for i in row_order]
        if col_order is not None:
            rows = [[row[j] for j in col_order] for row in rows]
        return ScalarMatrix(len(rows), self.ncols if col_order is None else len(col_order), rows)

    def rank(self) -> int:
        return rank(self)

    def det(self) -> Fraction:
        return det(self)

    def nullspace(self) -> list[tuple[Fraction, ...]]:
        return nullspace(self)


def _integer_row(row) -> dict[int, int]:
    den = 1
    for v in row:
        if v:
            den = lcm(den, v.denominator)
    return {j: int(v * den) for j, v in enumerate(row) if v}


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    return {k: v // g for k, v in row.items()}


def sparse_rank(rows) -> int:
    """Rank of a list of sparse integer rows given as {column: value} dicts."""
    pivots: dict[int, dict[int, int]] = {}
    for r in rows:
        r = {k: v for k, v in r.items() if v}
        while r:
            lead = min(r)
            p = pivots.get(lead)
            if p is None:
                pivots[lead] = _primitive(r)
                break
            a, b = r[lead], p[lead]
            g = gcd(a, b)
            fr, fp = b // g, a // g
            new = {k: fr * v for k, v in r.items()}
            for k, v in p.items():
                w = new.get(k, 0) - fp * v
                if w:
                    new[k] = w
                else:
                    new.pop(k, None)
            r = _primitive(new) if new else new
    return len(pivots)


def rank(m: ScalarMatrix) -> int:
    """Exact rank over Q."""
    if m.nrows == 0 or m.ncols == 0:
        return 0
    # eliminate along the shorter side
    src = m if m.nrows >= m.ncols else m.transpose()
    return sparse_rank(_integer_row(row) for row in src.rows)


def det(m: ScalarMatrix) -> Fraction:
    """Exact determinant by Bareiss elimination on the denominator-cleared matrix."""
    if m.nrows != m.ncols:
        raise ValueError(f"determinant of non-square {m.shape} matrix")
    size = m.nrows
    if size == 0:
        return Fraction(1)
    scale = Fraction(1)
    a = []
    for row in m.rows:
        den = 1
        for v in row:
            den = lcm(den, v.denominator)
        scale /= den
        a.append([int(v * den) for v in row])
    sign = 1
    prev = 1
    for k in range(size - 1):
        if a[k][k] == 0:
            for i in range(k + 1, size):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        akk = a[k][k]
        for i in range(k + 1, size):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, size):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[-1][-1] * scale


def rref(m: ScalarMatrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q and the pivot columns."""
    a = [list(row) for row in m.rows]
    pivots = []
    r = 0
    for c in range(m.ncols):
        piv = next((i for i in range(r, m.nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(m.nrows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m.nrows:
            break
    return a[:r], pivots


def nullspace(m: ScalarMatrix) -> list[tuple[Fraction, ...]]:
    """A basis of the right kernel, one vector per free column, in column order.

    The basis is canonical: each vector has a 1 in its free column and zeros
    in the other free columns.
    """
    reduced, pivots = rref(m)
    pivset = set(pivots)
    basis = []
    for free in range(m.ncols):
        if free in pivset:
            continue
        v = [Fraction(0)] * m.ncols
        v[free] = Fraction(1)
        for row, pc in zip(reduced, pivots):
            v[pc] = -row[free]
        basis.append(tuple(v))
    return basis
