"""Homogeneous polynomials over Q and matrices of linear forms.

Monomials are exponent tuples (e_0, ..., e_n) for the variables x_0..x_n.
Every ordering in the package is graded reverse lexicographic with
x_0 > x_1 > ... > x_n.

Matrices act on column vectors: a map O(a)^s -> O(a+1)^r is stored as an
r x s LinearMatrix.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import lcm

from .arith import as_rational, rational_from_json, rational_to_json
from .linalg import ScalarMatrix, rank as _rank, sparse_rank

Monomial = tuple


def degrevlex_key(m: Monomial):
    """Sort key: larger key means larger monomial in degrevlex."""
    return (sum(m), tuple(-e for e in reversed(m)))


@lru_cache(maxsize=None)
def _basis(nvars: int, deg: int) -> tuple:
    if deg < 0:
        return ()
    if nvars == 1:
        return ((deg,),)
    out = []
    for first in range(deg, -1, -1):
        for rest in _basis(nvars - 1, deg - first):
            out.append((first,) + rest)
    return tuple(sorted(out, key=degrevlex_key, reverse=True))


def monomial_basis(n: int, deg: int) -> list[Monomial]:
    """All monomials of degree deg in x_0..x_n, largest first in degrevlex."""
    if deg < 0:
        raise ValueError(f"degree must be nonnegative, got {deg}")
    return list(_basis(n + 1, deg))


@lru_cache(maxsize=None)
def _basis_index(nvars: int, deg: int) -> dict:
    return {m: i for i, m in enumerate(_basis(nvars, deg))}


def _mono_str(m: Monomial, names) -> str:
    parts = []
    for name, e in zip(names, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


class HomPoly:
    """A homogeneous polynomial with sparse rational coefficients.

    The zero polynomial carries whatever degree it was created with; it
    compares equal to every other zero polynomial in the same ring.
    """

    __slots__ = ("nvars", "degree", "_terms", "_hash")

    def __init__(self, nvars: int, terms=None, degree: int | None = None):
        clean = {}
        for m, c in (terms or {}).items():
            m = tuple(int(e) for e in m)
            if len(m) != nvars or any(e < 0 for e in m):
                raise ValueError(f"bad monomial {m} for {nvars} variables")
            c = as_rational(c)
            if c:
                clean[m] = clean.get(m, Fraction(0)) + c
                if not clean[m]:
                    del clean[m]
        degs = {sum(m) for m in clean}
        if len(degs) > 1:
            raise ValueError(f"polynomial is not homogeneous (degrees {sorted(degs)})")
        if degs:
            (found,) = degs
            if degree is not None and degree != found:
                raise ValueError(f"declared degree {degree} but terms have degree {found}")
            degree = found
        self.nvars = nvars
        self.degree = 0 if degree is None else degree
        self._terms = clean
        self._hash = None

    @classmethod
    def zero(cls, nvars: int, degree: int = 0) -> HomPoly:
        return cls(nvars, {}, degree)

    @classmethod
    def constant(cls, nvars: int, c) -> HomPoly:
        return cls(nvars, {(0,) * nvars: c}, 0)

    @classmethod
    def variable(cls, nvars: int, i: int) -> HomPoly:
        m = [0] * nvars
        m[i] = 1
        return cls(nvars, {tuple(m): 1}, 1)

    @classmethod
    def linear(cls, coeffs) -> HomPoly:
        """The linear form sum_i coeffs[i] * x_i."""
        nvars = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            m = [0] * nvars
            m[i] = 1
            terms[tuple(m)] = c
        return cls(nvars, terms, 1)

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def coefficient(self, m: Monomial) -> Fraction:
        return self._terms.get(tuple(m), Fraction(0))

    def sorted_terms(self) -> list:
        """(monomial, coefficient) pairs, largest monomial first."""
        return sorted(self._terms.items(), key=lambda t: degrevlex_key(t[0]), reverse=True)

    def leading_monomial(self) -> Monomial:
        if not self._terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self._terms, key=degrevlex_key)

    def linear_coefficients(self) -> tuple[Fraction, ...]:
        if self._terms and self.degree != 1:
            raise ValueError("not a linear form")
        out = [Fraction(0)] * self.nvars
        for m, c in self._terms.items():
            out[m.index(1)] = c
        return tuple(out)

    def _check(self, other: HomPoly):
        if self.nvars != other.nvars:
            raise ValueError(f"ring mismatch: {self.nvars} vs {other.nvars} variables")

    def __add__(self, other):
        if not isinstance(other, HomPoly):
            return NotImplemented
        self._check(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        if self.degree != other.degree:
            raise ValueError(f"cannot add degrees {self.degree} and {other.degree}")
        terms = dict(self._terms)
        for m, c in other._terms.items():
            terms[m] = terms.get(m, 0) + c
        return HomPoly(self.nvars, terms, self.degree)

    def __neg__(self):
        return HomPoly(self.nvars, {m: -c for m, c in self._terms.items()}, self.degree)

    def __sub__(self, other):
        if not isinstance(other, HomPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, HomPoly):
            self._check(other)
            deg = self.degree + other.degree
            terms: dict = {}
            for m1, c1 in self._terms.items():
                for m2, c2 in other._terms.items():
                    m = tuple(a + b for a, b in zip(m1, m2))
                    terms[m] = terms.get(m, 0) + c1 * c2
            return HomPoly(self.nvars, terms, deg)
        if isinstance(other, (int, Fraction)):
            return HomPoly(self.nvars, {m: c * other for m, c in self._terms.items()}, self.degree)
        return NotImplemented

    __rmul__ = __mul__

    def mul_monomial(self, m: Monomial) -> HomPoly:
        return HomPoly(self.nvars, {tuple(a + b for a, b in zip(k, m)): c
                                    for k, c in self._terms.items()}, self.degree + sum(m))

    def evaluate(self, point) -> Fraction:
        point = [as_rational(v) for v in point]
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, ring has {self.nvars}")
        total = Fraction(0)
        for m, c in self._terms.items():
            t = c
            for v, e in zip(point, m):
                if e:
                    t *= v ** e
            total += t
        return total

    def __eq__(self, other):
        if not isinstance(other, HomPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def to_str(self, names=None) -> str:
        names = names or [f"x{i}" for i in range(self.nvars)]
        if not self._terms:
            return "0"
        out = []
        for m, c in self.sorted_terms():
            sign = "-" if c < 0 else "+"
            a = abs(c)
            mono = _mono_str(m, names)
            if mono == "1":
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            out.append((sign, body))
        s = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            s += f" {sign} {body}"
        return s

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"HomPoly({self.to_str()!r}, deg={self.degree})"

    def to_json(self) -> list:
        return [[rational_to_json(c), list(m)] for m, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, nvars: int, data, degree: int | None = None) -> HomPoly:
        return cls(nvars, {tuple(m): rational_from_json(c) for c, m in data}, degree)


_TERM = re.compile(r"^(?:(\d+(?:/\d+)?)\*?)?([A-Za-z_][A-Za-z_0-9]*)?$")


def parse_linear_form(text: str, names) -> HomPoly:
    """Parse a linear form such as "x_2+x_3", "-z" or "2*x - 1/2 y"."""
    names = list(names)
    s = text.replace(" ", "")
    if s in ("", "0"):
        return HomPoly.zero(len(names), 1)
    if s[0] not in "+-":
        s = "+" + s
    if not re.fullmatch(r"([+-][^+-]+)+", s):
        raise ValueError(f"cannot parse linear form {text!r}")
    coeffs = [Fraction(0)] * len(names)
    for sign, body in re.findall(r"([+-])([^+-]+)", s):
        mt = _TERM.match(body)
        if not mt or mt.group(2) is None:
            raise ValueError(f"cannot parse term {body!r} of linear form {text!r}")
        if mt.group(2) not in names:
            raise ValueError(f"unknown variable {mt.group(2)!r} in {text!r}")
        c = Fraction(mt.group(1)) if mt.group(1) else Fraction(1)
        coeffs[names.index(mt.group(2))] += -c if sign == "-" else c
    return HomPoly.linear(coeffs)


class LinearMatrix:
    """A rows x cols matrix of linear forms on P^n (zero entries allowed)."""

    __slots__ = ("n", "rows", "cols", "_entries")

    def __init__(self, n: int, entries):
        entries = [list(row) for row in entries]
        if not entries or not entries[0]:
            raise ValueError("a LinearMatrix needs at least one row and one column")
        cols = len(entries[0])
        if any(len(row) != cols for row in entries):
            raise ValueError("ragged entry array")
        nvars = n + 1
        clean = []
        for i, row in enumerate(entries):
            out = []
            for j, e in enumerate(row):
                if isinstance(e, (int, Fraction)) and e == 0:
                    e = HomPoly.zero(nvars, 1)
                if not isinstance(e, HomPoly) or e.nvars != nvars:
                    raise ValueError(f"entry ({i},{j}) is not a form in {nvars} variables")
                if e and e.degree != 1:
                    raise ValueError(f"entry ({i},{j}) has degree {e.degree}, expected 1")
                if not e:
                    e = HomPoly.zero(nvars, 1)
                out.append(e)
            clean.append(tuple(out))
        self.n = n
        self.rows = len(clean)
        self.cols = cols
        self._entries = tuple(clean)

    @classmethod
    def from_coefficients(cls, n: int, coeffs) -> LinearMatrix:
        """Build from coeffs[i][j] = (c_0, ..., c_n), the form sum c_k x_k."""
        return cls(n, [[HomPoly.linear(v) for v in row] for row in coeffs])

    @classmethod
    def from_display(cls, rows, names) -> LinearMatrix:
        """Parse a matrix as printed (acting on row vectors) and transpose it.

        ``rows`` is a list of rows, each a list of linear-form strings over
        ``names``; the stored matrix is the transpose so that it acts on
        column vectors.
        """
        parsed = [[parse_linear_form(s, names) for s in row] for row in rows]
        return cls(len(names) - 1, [list(c) for c in zip(*parsed)])

    @classmethod
    def zero(cls, n: int, rows: int, cols: int) -> LinearMatrix:
        return cls(n, [[0] * cols for _ in range(rows)])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nvars(self) -> int:
        return self.n + 1

    @property
    def entries(self) -> tuple:
        return self._entries

    def __getitem__(self, ij) -> HomPoly:
        i, j = ij
        return self._entries[i][j]

    def coefficients(self) -> list:
        """coeffs[i][j][k]: coefficient of x_k in entry (i, j)."""
        return [[e.linear_coefficients() for e in row] for row in self._entries]

    def transpose(self) -> LinearMatrix:
        return LinearMatrix(self.n, [list(c) for c in zip(*self._entries)])

    def evaluate(self, point) -> ScalarMatrix:
        return ScalarMatrix(self.rows, self.cols,
                            [[e.evaluate(point) for e in row] for row in self._entries])

    def is_zero(self) -> bool:
        return not any(e for row in self._entries for e in row)

    def with_entry(self, i: int, j: int, value: HomPoly) -> LinearMatrix:
        entries = [list(row) for row in self._entries]
        entries[i][j] = value
        return LinearMatrix(self.n, entries)

    def __eq__(self, other):
        if not isinstance(other, LinearMatrix):
            return NotImplemented
        return self.n == other.n and self._entries == other._entries

    def __hash__(self):
        return hash((self.n, self._entries))

    def __repr__(self):
        return f"LinearMatrix(n={self.n}, {self.rows}x{self.cols})"

    def to_str(self, names=None) -> str:
        cells = [[e.to_str(names) for e in row] for row in self._entries]
        width = max(len(c) for row in cells for c in row)
        return "\n".join("[" + "  ".join(c.rjust(width) for c in row) + "]" for row in cells)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[e.to_json() for e in row] for row in self._entries],
        }

    @classmethod
    def from_json(cls, data: dict) -> LinearMatrix:
        n = data["n"]
        entries = [[HomPoly.from_json(n + 1, e, 1) for e in row] for row in data["entries"]]
        m = cls(n, entries)
        if m.shape != (data["rows"], data["cols"]):
            raise ValueError(f"declared shape {data['rows']}x{data['cols']} "
                             f"does not match entries {m.shape}")
        return m


def _as_poly_rows(m, nvars: int | None):
    if isinstance(m, LinearMatrix):
        return [list(r) for r in m.entries], m.nvars
    if isinstance(m, ScalarMatrix):
        if nvars is None:
            raise ValueError("a scalar matrix needs a partner that fixes the ring")
        return [[HomPoly.constant(nvars, v) for v in row] for row in m.rows], nvars
    rows = [list(r) for r in m]
    return rows, rows[0][0].nvars


def _shape(m):
    if isinstance(m, (LinearMatrix, ScalarMatrix)):
        return m.shape
    return (len(m), len(m[0]) if m else 0)


def mat_compose(a, b) -> list[list[HomPoly]]:
    """Entry-wise polynomial product a*b of two polynomial matrices.

    Operands may be LinearMatrix, ScalarMatrix (constants) or nested lists
    of HomPoly. The composite map is "first b, then a".
    """
    sa, sb = _shape(a), _shape(b)
    if sa[1] != sb[0]:
        raise ValueError(f"dimension mismatch: {sa[0]}x{sa[1]} composed with {sb[0]}x{sb[1]}")
    nvars = None
    for m in (a, b):
        if isinstance(m, LinearMatrix):
            nvars = m.nvars
        elif not isinstance(m, ScalarMatrix):
            nvars = m[0][0].nvars
    ra, nvars = _as_poly_rows(a, nvars)
    rb, _ = _as_poly_rows(b, nvars)
    deg = ra[0][0].degree + rb[0][0].degree
    out = []
    for i in range(sa[0]):
        row = []
        for j in range(sb[1]):
            acc = HomPoly.zero(nvars, deg)
            for k in range(sa[1]):
                x, y = ra[i][k], rb[k][j]
                if x and y:
                    acc = acc + x * y
            row.append(acc)
        out.append(row)
    return out


def is_zero_matrix(m) -> bool:
    return all(not e for row in m for e in row)


def evaluate_rank(m: LinearMatrix, point) -> int:
    """Rank over Q of m at a projective point."""
    point = [as_rational(v) for v in point]
    if len(point) != m.nvars:
        raise ValueError(f"point has {len(point)} coordinates, expected {m.nvars}")
    if not any(point):
        raise ValueError("the zero vector is not a projective point")
    return _rank(m.evaluate(point))


def determinant(rows) -> HomPoly:
    """Determinant of a square polynomial matrix by cofactor expansion."""
    rows = [list(r) for r in rows]
    k = len(rows)
    memo: dict = {}
    return _det(rows, tuple(range(k)), tuple(range(k)), memo)


def _det(entries, rsel: tuple, csel: tuple, memo: dict) -> HomPoly:
    key = (rsel, csel)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if len(rsel) == 1:
        out = entries[rsel[0]][csel[0]]
    else:
        r0, rest = rsel[0], rsel[1:]
        out = None
        for idx, c in enumerate(csel):
            e = entries[r0][c]
            if not e:
                continue
            sub = _det(entries, rest, csel[:idx] + csel[idx + 1:], memo)
            if not sub:
                continue
            term = e * sub
            if idx % 2:
                term = -term
            out = term if out is None else out + term
        if out is None:
            nvars = entries[r0][csel[0]].nvars
            deg = sum(entries[r][csel[0]].degree for r in rsel)
            out = HomPoly.zero(nvars, deg)
    memo[key] = out
    return out


def minors_ideal(m: LinearMatrix, k: int) -> list[HomPoly]:
    """All nonzero k x k minors, ordered by (row subset, column subset)."""
    if not 1 <= k <= min(m.rows, m.cols):
        raise ValueError(f"minor size {k} out of range for a {m.rows}x{m.cols} matrix")
    entries = m.entries
    memo: dict = {}
    out = []
    for rsel in combinations(range(m.rows), k):
        for csel in combinations(range(m.cols), k):
            p = _det(entries, rsel, csel, memo)
            if p:
                out.append(p)
    return out


def h0_entries(m: LinearMatrix, src_twist: int) -> tuple[int, int, dict]:
    """Sparse form of h0_map: (nrows, ncols, {(row, col): coefficient})."""
    nvars = m.nvars
    src = _basis(nvars, src_twist) if src_twist >= 0 else ()
    tgt = _basis(nvars, src_twist + 1) if src_twist + 1 >= 0 else ()
    ns, nt = len(src), len(tgt)
    entries: dict = {}
    if ns and nt:
        index = _basis_index(nvars, src_twist + 1)
        for i, row in enumerate(m.entries):
            for j, e in enumerate(row):
                for mono, c in e.items():
                    for b, s in enumerate(src):
                        t = index[tuple(x + y for x, y in zip(s, mono))]
                        entries[(i * nt + t, j * ns + b)] = c
    return m.rows * nt, m.cols * ns, entries


def h0_map(m: LinearMatrix, src_twist: int) -> ScalarMatrix:
    """Matrix of H^0(O(src_twist))^cols -> H^0(O(src_twist+1))^rows induced by m.

    Coordinates are monomial coefficients in the order of monomial_basis;
    block (i, j) is multiplication by the entry m[i, j].
    """
    nr, nc, entries = h0_entries(m, src_twist)
    return ScalarMatrix.from_sparse(nr, nc, entries)


def sparse_matrix_rank(nrows: int, ncols: int, entries: dict) -> int:
    """Rank of a matrix given as {(row, col): value} with rational values."""
    if not entries or not nrows or not ncols:
        return 0
    lines: dict = {}
    by_row = nrows >= ncols
    for (i, j), v in entries.items():
        key, col = (i, j) if by_row else (j, i)
        lines.setdefault(key, {})[col] = v
    rows = []
    for key in sorted(lines):
        line = lines[key]
        den = lcm(*(Fraction(v).denominator for v in line.values()))
        rows.append({c: int(v * den) for c, v in line.items()})
    return sparse_rank(rows)
