"""Linear resolutions of E(-d), their certification, and exact cohomology.

A resolution 0 -> O(-n)^{a_n} -> ... -> O(-1)^{a_1} -> E(-d) -> 0 is given by
its differentials D_1..D_{n-1}, where D_j : O(-j-1)^{a_{j+1}} -> O(-j)^{a_j}
is a stored a_j x a_{j+1} LinearMatrix.

Line bundles on P^n only have H^0 and H^n, so once the complex is known to be
exact with locally free cokernel, every h^q(E(t)) is a kernel or cokernel
dimension of an explicit rational matrix: H^0 comes from the last spot of the
complex of global sections, and h^q for q >= 1 from the complex of top
cohomology groups, built from Serre-dual multiplication maps.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb

from . import __version__
from .groebner import buchberger
from .linalg import ScalarMatrix
from .numerology import (CohomologyProfile, UlrichContext, first_chern_from_ranks,
                         resolution_ranks)
from .polyring import (LinearMatrix, evaluate_rank, h0_entries, h0_map, is_zero_matrix,
                       mat_compose, minors_ideal, sparse_matrix_rank)

REDUCTION_RANK2 = "rank2-serre-duality"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def sha256_hex(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


class ResolutionDefect(RuntimeError):
    """Raised when the cohomology of a supposed resolution is inconsistent."""


class LinearResolution:
    def __init__(self, ctx: UlrichContext, differentials):
        sig = resolution_ranks(ctx)
        if not sig.ok:
            raise ValueError(f"{ctx} has no integral resolution: "
                             + "; ".join(str(v) for v in sig.violations))
        differentials = tuple(differentials)
        if len(differentials) != ctx.n - 1:
            raise ValueError(f"P^{ctx.n} needs {ctx.n - 1} differentials, got {len(differentials)}")
        a = sig.ranks
        for j, D in enumerate(differentials, start=1):
            if D.n != ctx.n:
                raise ValueError(f"D_{j} lives on P^{D.n}, expected P^{ctx.n}")
            if D.shape != (a[j - 1], a[j]):
                raise ValueError(f"D_{j} has shape {D.shape}, expected {(a[j - 1], a[j])}")
        self.ctx = ctx
        self.differentials = differentials
        self.signature = sig

    @property
    def ranks(self) -> tuple:
        return self.signature.ranks

    def __eq__(self, other):
        if not isinstance(other, LinearResolution):
            return NotImplemented
        return self.ctx == other.ctx and self.differentials == other.differentials

    def __hash__(self):
        return hash((self.ctx, self.differentials))

    def __repr__(self):
        shapes = ", ".join(f"{D.rows}x{D.cols}" for D in self.differentials)
        return f"LinearResolution({self.ctx}, [{shapes}])"

    def to_json(self) -> dict:
        return {"context": self.ctx.to_json(),
                "differentials": [D.to_json() for D in self.differentials]}

    @classmethod
    def from_json(cls, data: dict) -> LinearResolution:
        return cls(UlrichContext.from_json(data["context"]),
                   [LinearMatrix.from_json(D) for D in data["differentials"]])

    def content_hash(self) -> str:
        return sha256_hex(self.to_json())


@dataclass
class StageResult:
    ok: bool
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def validate_complex(res: LinearResolution) -> StageResult:
    """Check D_j D_{j+1} = 0 for every j; report the first nonzero entry."""
    for j in range(len(res.differentials) - 1):
        prod = mat_compose(res.differentials[j], res.differentials[j + 1])
        if not is_zero_matrix(prod):
            for r, row in enumerate(prod):
                for c, e in enumerate(row):
                    if e:
                        return StageResult(False, {"j": j + 1, "row": r, "col": c, "value": str(e)})
    return StageResult(True)


def screening_points(n: int, seed: int, count: int) -> list[tuple[int, ...]]:
    """Coordinate points, the all-ones point, then seeded random integer points."""
    pts = []
    for i in range(n + 1):
        pts.append(tuple(int(k == i) for k in range(n + 1)))
    pts.append((1,) * (n + 1))
    rng = random.Random(seed)
    while len(pts) < n + 2 + count:
        p = tuple(rng.randint(-9, 9) for _ in range(n + 1))
        if any(p):
            pts.append(p)
    return pts


def check_constant_rank(D: LinearMatrix, rho: int, seed: int = 0, points: int = 12) -> dict:
    """Certify rank(D_p) >= rho at every point p of P^n.

    Seeded point screening runs first; a point of lower rank is returned as
    a witness. Otherwise the rho x rho minors must have empty projective zero
    locus, decided by a Groebner basis.
    """
    out = {"expected_rank": rho, "witness": None, "minors": 0,
           "groebner_size": 0, "missing_variables": [], "ok": False}
    pts = screening_points(D.n, seed, points)
    out["screened_points"] = len(pts)
    for p in pts:
        rk = evaluate_rank(D, p)
        if rk != rho:
            out["witness"] = list(p)
            out["witness_rank"] = rk
            return out
    if rho == 0:
        out["ok"] = True
        return out
    minors = minors_ideal(D, rho)
    out["minors"] = len(minors)
    if not minors:
        out["missing_variables"] = list(range(D.nvars))
        return out
    gb = buchberger(minors)
    out["groebner_size"] = len(gb)
    out["missing_variables"] = gb.missing_pure_powers()
    out["ok"] = not out["missing_variables"]
    return out


def pointwise_exactness(res: LinearResolution, seed: int = 0) -> StageResult:
    """Certify the fibre ranks rho_j of every differential at every point.

    Together with the complex property this makes the sequence exact with a
    locally free cokernel of rank r: the lower bounds rank(D_j) >= rho_j give
    the matching upper bounds because consecutive compositions vanish.
    """
    rhos = res.signature.expected_pointwise_ranks()
    positions = []
    for j, (D, rho) in enumerate(zip(res.differentials, rhos), start=1):
        info = check_constant_rank(D, rho, seed=seed + j)
        info["j"] = j
        positions.append(info)
    # the cokernel of a constant-rank map is locally free
    local_free = all(p["ok"] for p in positions if p["j"] == 1)
    exact = all(p["ok"] for p in positions)
    return StageResult(local_free and exact, {
        "expected_ranks": list(rhos),
        "positions": positions,
        "exactness_ok": exact,
        "local_freeness_ok": local_free,
    })


def serre_dual_map(M: LinearMatrix, t: int, source: int = -2) -> ScalarMatrix:
    """Matrix of H^n(O(source+t)^cols) -> H^n(O(source+t+1)^rows) induced by M.

    Computed as the transpose of multiplication by M^T on the Serre-dual
    global sections; empty when the source H^n vanishes.
    """
    m = source + t
    return h0_map(M.transpose(), -m - M.n - 2).transpose()


def _h0_dim(n: int, deg: int) -> int:
    return comb(deg + n, n) if deg >= 0 else 0


def _hn_dim(n: int, deg: int) -> int:
    return _h0_dim(n, -deg - n - 1)


class _SectionRanks:
    """Cached ranks of the maps induced by D_j on H^0 and H^n after twisting."""

    def __init__(self, res: LinearResolution):
        self.res = res
        self.n = res.ctx.n
        self._transposes = [D.transpose() for D in res.differentials]
        self._cache: dict = {}

    def h0(self, j: int, s: int) -> int:
        # D_j on F_{j+1}(s) = O(s-j-1)^{a_{j+1}}
        key = ("h0", j, s)
        if key not in self._cache:
            self._cache[key] = sparse_matrix_rank(*h0_entries(self.res.differentials[j - 1], s - j - 1))
        return self._cache[key]

    def hn(self, j: int, s: int) -> int:
        key = ("hn", j, s)
        if key not in self._cache:
            nr, nc, ent = h0_entries(self._transposes[j - 1], j - s - self.n - 1)
            self._cache[key] = sparse_matrix_rank(nr, nc, ent)
        return self._cache[key]


def _twist_cohomology(ranks: _SectionRanks, s: int) -> tuple[int, ...]:
    """h^0..h^n of E(s-d) from the complex F_j(s) = O(s-j)^{a_j}."""
    res = ranks.res
    n = res.ctx.n
    a = res.ranks
    h0_dims = [a[j - 1] * _h0_dim(n, s - j) for j in range(1, n + 1)]
    hn_dims = [a[j - 1] * _hn_dim(n, s - j) for j in range(1, n + 1)]
    if n == 1:
        return (h0_dims[0], hn_dims[0])
    # H^0 complex: exact away from F_1
    for j in range(2, n + 1):
        rin = ranks.h0(j, s) if j <= n - 1 else 0
        rout = ranks.h0(j - 1, s)
        if h0_dims[j - 1] - rin - rout:
            raise ResolutionDefect(
                f"H^0 complex of {res!r} is not exact at F_{j} for twist s={s}")
    values = [h0_dims[0] - ranks.h0(1, s)]
    for q in range(1, n + 1):
        k = n - q + 1
        rout = ranks.hn(k - 1, s) if k >= 2 else 0
        rin = ranks.hn(k, s) if k <= n - 1 else 0
        values.append(hn_dims[k - 1] - rout - rin)
    return tuple(values)


@dataclass
class CohomologyTable:
    ctx: UlrichContext
    rows: dict

    def __getitem__(self, twist: int) -> tuple:
        return self.rows[twist]

    @property
    def twists(self) -> list[int]:
        return sorted(self.rows)

    def profiles(self) -> list[CohomologyProfile]:
        return [CohomologyProfile(self.ctx, t, self.rows[t]) for t in self.twists]

    def to_json(self) -> dict:
        return {"context": self.ctx.to_json(),
                "rows": [{"twist": t, "h": list(self.rows[t])} for t in self.twists]}


def cohomology_table(res: LinearResolution, t_min: int, t_max: int,
                     _ranks: _SectionRanks | None = None) -> CohomologyTable:
    """h^q(E(t)) for t_min <= t <= t_max, assuming res is a certified resolution."""
    ranks = _ranks or _SectionRanks(res)
    d = res.ctx.d
    rows = {t: _twist_cohomology(ranks, t + d) for t in range(t_min, t_max + 1)}
    return CohomologyTable(res.ctx, rows)


def checked_degrees(ctx: UlrichContext, reduced: bool) -> list[tuple[int, list[int]]]:
    """(p, degrees q) pairs whose h^q(E(-pd)) must vanish."""
    n = ctx.n
    full = list(range(n + 1))
    if not reduced:
        return [(p, full) for p in range(1, n + 1)]
    m = n // 2
    out = [(p, full) for p in range(1, m + 1)]
    if n % 2:
        out.append((m + 1, list(range(m + 1))))
    return out


def _criterion(res: LinearResolution) -> dict | None:
    """The condition-2 dual-map checks of the n = 2 and n = 3 criteria."""
    ctx = res.ctx
    d = ctx.d
    if ctx.n == 2:
        M = serre_dual_map(res.differentials[0], -d, source=-2)
        rk = M.rank()
        return {"maps": [{"map": "D_1", "twist": -d, "rows": M.nrows, "cols": M.ncols,
                          "rank": rk, "injective": rk == M.ncols, "surjective": rk == M.nrows}],
                "square": M.nrows == M.ncols,
                "ok": rk == M.ncols}
    if ctx.n == 3:
        maps = []
        ok = True
        for i in (1, 2):
            A = serre_dual_map(res.differentials[1], -i * d, source=-3)
            B = serre_dual_map(res.differentials[0], -i * d, source=-2)
            ra, rb = A.rank(), B.rank()
            maps.append({"map": "D_2", "twist": -i * d, "rows": A.nrows, "cols": A.ncols,
                         "rank": ra, "injective": ra == A.ncols})
            maps.append({"map": "D_1", "twist": -i * d, "rows": B.nrows, "cols": B.ncols,
                         "rank": rb, "surjective": rb == B.nrows})
            ok = ok and ra == A.ncols and rb == B.nrows
        return {"maps": maps, "ok": ok}
    return None


@dataclass
class VerificationReport:
    context: dict
    signature: list
    expected_ranks: list
    seed: int
    full_check: bool
    complex_ok: bool = False
    complex_detail: dict = field(default_factory=dict)
    exactness_ok: bool = False
    local_freeness_ok: bool = False
    exactness_detail: list = field(default_factory=list)
    cohomology_ok: bool = False
    cohomology: list = field(default_factory=list)
    cohomology_failure: list | None = None
    reduction: str | None = None
    first_chern: str = ""
    criterion: dict | None = None
    failed_stage: str | None = None

    @property
    def verdict(self) -> bool:
        return (self.complex_ok and self.exactness_ok and self.local_freeness_ok
                and self.cohomology_ok)

    def to_json(self) -> dict:
        data = asdict(self)
        data["verdict"] = self.verdict
        return data

    @classmethod
    def from_json(cls, data: dict) -> VerificationReport:
        data = dict(data)
        data.pop("verdict", None)
        return cls(**data)

    def summary(self) -> str:
        if self.verdict:
            return f"Ulrich: certified for {self.context}"
        return f"not certified: failed at stage {self.failed_stage!r}"


def verify_resolution(res: LinearResolution, seed: int = 0, full: bool = False) -> VerificationReport:
    """Run every check on res and return the report (positive or not)."""
    ctx = res.ctx
    sig = res.signature
    c1 = first_chern_from_ranks(sig.ranks, ctx.r, ctx.d)
    report = VerificationReport(
        context=ctx.to_json(),
        signature=list(sig.ranks),
        expected_ranks=list(sig.expected_pointwise_ranks()),
        seed=seed,
        full_check=full,
        first_chern=str(c1),
    )
    cx = validate_complex(res)
    report.complex_ok = cx.ok
    report.complex_detail = cx.detail
    if not cx.ok:
        report.failed_stage = "complex"
        return report

    ex = pointwise_exactness(res, seed=seed)
    report.exactness_ok = ex.detail["exactness_ok"]
    report.local_freeness_ok = ex.detail["local_freeness_ok"]
    report.exactness_detail = ex.detail["positions"]
    if not ex.ok:
        report.failed_stage = "exactness" if not report.exactness_ok else "local-freeness"
        return report

    reduced = (not full and ctx.r == 2 and ctx.n >= 2
               and c1 == (ctx.n + 1) * (ctx.d - 1))
    if reduced:
        report.reduction = REDUCTION_RANK2
    ranks = _SectionRanks(res)
    failure = None
    for p, degrees in checked_degrees(ctx, reduced):
        twist = -p * ctx.d
        h = _twist_cohomology(ranks, twist + ctx.d)
        report.cohomology.append({"twist": twist, "h": list(h), "checked": degrees})
        if failure is None:
            for q in degrees:
                if h[q]:
                    failure = [q, twist]
                    break
    report.cohomology_failure = failure
    definitional = failure is None

    crit = _criterion(res)
    if crit is not None:
        crit["agrees"] = crit["ok"] == definitional
        report.criterion = crit
    report.cohomology_ok = definitional and (crit is None or crit["agrees"])
    if not report.cohomology_ok:
        report.failed_stage = "cohomology"
    return report


class NotUlrich(Exception):
    def __init__(self, report: VerificationReport):
        super().__init__(report.summary())
        self.report = report


@dataclass
class UlrichCertificate:
    resolution: LinearResolution
    report: VerificationReport
    provenance: dict = field(default_factory=dict)

    def hashed_content(self) -> dict:
        data = self.resolution.to_json()
        data["report"] = self.report.to_json()
        return data

    @property
    def content_hash(self) -> str:
        # provenance (timestamps, pool, ...) is metadata and stays out of the hash
        return sha256_hex(self.hashed_content())

    def to_json(self) -> dict:
        data = self.hashed_content()
        data["provenance"] = self.provenance
        data["content_hash"] = self.content_hash
        return data

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, data: dict) -> UlrichCertificate:
        cert = cls(LinearResolution.from_json(data),
                   VerificationReport.from_json(data["report"]),
                   dict(data.get("provenance", {})))
        stored = data.get("content_hash")
        if stored is not None and stored != cert.content_hash:
            raise ValueError(f"content hash mismatch: stored {stored}, computed {cert.content_hash}")
        return cert

    @classmethod
    def loads(cls, text: str) -> UlrichCertificate:
        return cls.from_json(json.loads(text))


def ulrich_verdict(res: LinearResolution, seed: int = 0, full: bool = False,
                   provenance: dict | None = None) -> UlrichCertificate:
    """Certify res or raise NotUlrich carrying the failing report."""
    report = verify_resolution(res, seed=seed, full=full)
    if not report.verdict:
        raise NotUlrich(report)
    prov = {"tool": "ulrich", "version": __version__, "seed": seed}
    prov.update(provenance or {})
    return UlrichCertificate(res, report, prov)


def reverify(cert: UlrichCertificate) -> UlrichCertificate:
    """Re-run verification from the certificate's own data."""
    return ulrich_verdict(cert.resolution, seed=cert.report.seed,
                          full=cert.report.full_check, provenance=cert.provenance)
