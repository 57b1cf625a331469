"""Explicit matrices of linear forms with known Ulrich cokernels.

The matrices are transcribed as printed (acting on row vectors) and
transposed once on ingestion, so every stored matrix acts on column vectors.
The printed orientation is kept in ``display`` for audit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .linalg import ScalarMatrix
from .numerology import UlrichContext, resolution_ranks
from .polyring import HomPoly, LinearMatrix, monomial_basis
from .resolution import LinearResolution

P2 = ("x", "y", "z")
P3 = ("x", "y", "z", "w")
P2_INDEXED = ("x_1", "x_2", "x_3")

P3_ALPHA_DISPLAY = [["x", "y", "z", "w"]]
P3_BETA_DISPLAY = [
    ["y", "z", "w", "0", "0"],
    ["-x", "0", "0", "z", "w"],
    ["w", "-x", "0", "-y", "0"],
    ["-z", "0", "-x", "0", "-y"],
]
P2_CUBIC_DISPLAY = [
    ["x_1", "x_2", "x_2+x_3", "x_2+x_3", "x_3", "x_1+x_2"],
    ["x_3", "x_1+x_3", "x_2", "x_1+x_2+x_3", "0", "x_2"],
    ["x_1", "x_2+x_3", "x_1+x_2+x_3", "x_2+x_3", "x_3", "x_3"],
]


def banded_display(d: int) -> list[list[str]]:
    if d < 2:
        raise ValueError(f"the banded matrix needs d >= 2, got {d}")
    rows = []
    for i in range(d - 1):
        row = ["0"] * (d + 1)
        row[i:i + 3] = ["x", "y", "z"]
        rows.append(row)
    return rows


def banded_alpha(d: int) -> LinearMatrix:
    """(d+1) x (d-1) stored matrix O^{d-1}(-2) -> O^{d+1}(-1) with the x, y, z band."""
    return LinearMatrix.from_display(banded_display(d), P2)


def p3_pair() -> tuple[LinearMatrix, LinearMatrix]:
    """(D_1, D_2): the stored 5x4 beta and 4x1 alpha on P^3."""
    return (LinearMatrix.from_display(P3_BETA_DISPLAY, P3),
            LinearMatrix.from_display(P3_ALPHA_DISPLAY, P3))


def p2_cubic_alpha() -> LinearMatrix:
    """Stored 6x3 matrix O^3(-2) -> O^6(-1) whose cokernel twisted by 3 is Ulrich of rank 3."""
    return LinearMatrix.from_display(P2_CUBIC_DISPLAY, P2_INDEXED)


@dataclass(frozen=True)
class CBlocks:
    """A_p (columns j=1..3) and B_p (columns j=4..6) of the coefficients a^p_{i,j}."""

    A: tuple
    B: tuple

    def __post_init__(self):
        if len(self.A) != 3 or len(self.B) != 3:
            raise ValueError("need exactly three A blocks and three B blocks")
        for blk in self.A + self.B:
            if blk.shape != (3, 3):
                raise ValueError(f"blocks must be 3x3, got {blk.shape}")


def extract_blocks(alpha: LinearMatrix) -> CBlocks:
    """Split a stored 6x3 alpha on P^2 into its coefficient blocks.

    a^p_{i,j} is the coefficient of x_p in the printed entry (i, j), i.e. in
    stored entry (j, i).
    """
    if alpha.n != 2 or alpha.shape != (6, 3):
        raise ValueError(f"expected a stored 6x3 matrix on P^2, got {alpha.shape} on P^{alpha.n}")
    coeffs = alpha.coefficients()

    def block(p, cols):
        return ScalarMatrix.from_rows([[coeffs[j][i][p] for j in cols] for i in range(3)])

    return CBlocks(tuple(block(p, range(0, 3)) for p in range(3)),
                   tuple(block(p, range(3, 6)) for p in range(3)))


# block rows: (p,q) = (1,1), (2,2), (3,3), (1,2), (2,3), (1,3)
# each row lists (block column, p) meaning "A_p B_p" placed in block columns 2c, 2c+1
_C_LAYOUT = [
    [(0, 0)],
    [(1, 1)],
    [(2, 2)],
    [(0, 1), (1, 0)],
    [(1, 2), (2, 1)],
    [(0, 2), (2, 0)],
]


def build_C(blocks: CBlocks) -> ScalarMatrix:
    """The 18x18 coefficient matrix of the equations f o alpha = 0 in the y_k."""
    out = [[Fraction(0)] * 18 for _ in range(18)]
    for br, placements in enumerate(_C_LAYOUT):
        for bc, p in placements:
            for half, blk in enumerate((blocks.A[p], blocks.B[p])):
                c0 = 6 * bc + 3 * half
                for i in range(3):
                    for j in range(3):
                        out[3 * br + i][c0 + j] = blk[i, j]
    return ScalarMatrix(18, 18, out)


def delta_matrix(alpha: LinearMatrix, ctx: UlrichContext) -> ScalarMatrix:
    """Matrix of f -> f o alpha on H^0(O(d-2))^{a_1} -> H^0(O(d-1))^{a_2}.

    Columns are the coefficients b^{j,m} of f (monomial m of degree d-2
    outer, target index j inner); rows are (monomial of degree d-1 outer,
    source index i inner). For (2, 3, 3) the columns are exactly the y_k.
    """
    if ctx.n != 2 or alpha.n != 2:
        raise ValueError("delta_matrix is defined on P^2")
    sig = resolution_ranks(ctx)
    if not sig.ok:
        raise ValueError(f"no integral resolution for {ctx}")
    a1, a2 = sig.ranks
    if alpha.shape != (a1, a2):
        raise ValueError(f"alpha has shape {alpha.shape}, expected {(a1, a2)} for {ctx}")
    d = ctx.d
    src = monomial_basis(2, d - 2)
    tgt = monomial_basis(2, d - 1)
    tindex = {m: k for k, m in enumerate(tgt)}
    out = [[Fraction(0)] * (len(src) * a1) for _ in range(len(tgt) * a2)]
    for ms, m in enumerate(src):
        mono = HomPoly(3, {m: 1})
        for j in range(a1):
            col = ms * a1 + j
            for i in range(a2):
                prod = alpha[j, i] * mono
                for mt, c in prod.items():
                    out[tindex[mt] * a2 + i][col] += c
    return ScalarMatrix(len(tgt) * a2, len(src) * a1, out)


NAMES = ("p2-banded-d2", "p2-banded-d3", "p2-banded-d4", "p2-banded-d5", "p3-d2", "p2-cubic-r3")


def _display_for(name: str):
    m = re.fullmatch(r"p2-banded-d(\d+)", name)
    if m:
        return {"alpha": banded_display(int(m.group(1)))}, P2
    if name == "p3-d2":
        return {"alpha": P3_ALPHA_DISPLAY, "beta": P3_BETA_DISPLAY}, P3
    if name == "p2-cubic-r3":
        return {"alpha": P2_CUBIC_DISPLAY}, P2_INDEXED
    raise KeyError(name)


def fixture(name: str) -> LinearResolution:
    """The resolution of a named gallery example."""
    m = re.fullmatch(r"p2-banded-d(\d+)", name)
    if m:
        d = int(m.group(1))
        return LinearResolution(UlrichContext(2, d, 2), [banded_alpha(d)])
    if name == "p3-d2":
        return LinearResolution(UlrichContext(3, 2, 2), list(p3_pair()))
    if name == "p2-cubic-r3":
        return LinearResolution(UlrichContext(2, 3, 3), [p2_cubic_alpha()])
    raise KeyError(f"unknown gallery fixture {name!r}; known: {', '.join(NAMES)}")


def fixture_json(name: str) -> dict:
    """Serialized fixture with the printed matrices kept for human audit."""
    res = fixture(name)
    display, names = _display_for(name)
    data = res.to_json()
    data["name"] = name
    data["display"] = {"variables": list(names), **display}
    data["fixture_hash"] = res.content_hash()
    return data
