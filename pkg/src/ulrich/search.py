"""Seeded search for Ulrich resolutions with small coefficients.

Every candidate has an index k. In random mode candidate k is drawn from a
generator keyed by (seed, k) alone; in exhaustive mode k is a mixed-radix
number whose digits (most significant first) pick pool elements for the
coefficients of x_0..x_n of each entry, entries in row-major order of the
stored matrix. So the set of candidates never depends on the number of
worker processes.

On P^3 only D_2 is drawn freely. The rows of D_1 are pool combinations of a
fixed basis of the linear syzygies of D_2, which makes every candidate a
complex by construction.
"""

from __future__ import annotations

import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import lcm

from . import __version__
from .arith import as_rational
from .numerology import UlrichContext, resolution_ranks
from .polyring import HomPoly, LinearMatrix, evaluate_rank, h0_map, monomial_basis
from .resolution import (LinearResolution, UlrichCertificate, _criterion, screening_points,
                         verify_resolution)

MODES = ("random", "exhaustive")
SUPPORTED_N = (2, 3)
BATCH = 256


@dataclass(frozen=True)
class SearchConfig:
    ctx: UlrichContext
    pool: tuple
    budget: int
    seed: int
    mode: str = "random"
    start: int = 0
    limit: int | None = None

    def __post_init__(self):
        if self.ctx.n not in SUPPORTED_N:
            raise ValueError(f"search needs n in {SUPPORTED_N}: the dual-map filter is only a "
                             f"known criterion there, got n={self.ctx.n}")
        sig = resolution_ranks(self.ctx)
        if not sig.ok:
            raise ValueError(f"{self.ctx} admits no linear resolution: "
                             + "; ".join(str(v) for v in sig.violations))
        pool = []
        for c in self.pool:
            c = as_rational(c)
            if c not in pool:
                pool.append(c)
        if not pool:
            raise ValueError("the coefficient pool must be nonempty")
        object.__setattr__(self, "pool", tuple(pool))
        if self.budget < 0:
            raise ValueError(f"budget must be >= 0, got {self.budget}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.start < 0:
            raise ValueError(f"start must be >= 0, got {self.start}")
        if self.limit is not None and self.limit < 1:
            raise ValueError(f"limit must be positive, got {self.limit}")

    @property
    def ranks(self) -> tuple:
        return resolution_ranks(self.ctx).ranks

    def to_json(self) -> dict:
        return {"context": self.ctx.to_json(), "pool": [str(c) for c in self.pool],
                "budget": self.budget, "seed": self.seed, "mode": self.mode,
                "start": self.start, "limit": self.limit}


def syzygy_basis(D: LinearMatrix) -> list[list[HomPoly]]:
    """Basis of the rows v of linear forms with v * D = 0, primitive integer coefficients."""
    nvars = D.nvars
    deg1 = monomial_basis(D.n, 1)
    out = []
    for vec in h0_map(D.transpose(), 1).nullspace():
        den = lcm(*(c.denominator for c in vec))
        ints = [c * den for c in vec]
        row = []
        for i in range(D.rows):
            terms = {deg1[b]: ints[i * len(deg1) + b] for b in range(len(deg1))}
            row.append(HomPoly(nvars, terms, 1))
        out.append(row)
    return out


def _combine(basis, coeffs, width: int, nvars: int) -> list[HomPoly]:
    row = [HomPoly.zero(nvars, 1)] * width
    for c, vec in zip(coeffs, basis):
        if c:
            row = [a + HomPoly.constant(nvars, c) * b for a, b in zip(row, vec)]
    return row


def _free_digits(cfg: SearchConfig) -> int:
    a = cfg.ranks
    n = cfg.ctx.n
    return a[n - 2] * a[n - 1] * (n + 1)


def _matrix_from_digits(cfg: SearchConfig, digits) -> LinearMatrix:
    a = cfg.ranks
    n = cfg.ctx.n
    rows, cols = a[n - 2], a[n - 1]
    pool = cfg.pool
    it = iter(digits)
    coeffs = [[tuple(pool[next(it)] for _ in range(n + 1)) for _ in range(cols)]
              for _ in range(rows)]
    return LinearMatrix.from_coefficients(n, coeffs)


def _fill_back(cfg: SearchConfig, last: LinearMatrix, choose) -> list[LinearMatrix]:
    """Complete D_{n-1} to D_1..D_{n-1}; choose(j, K) gives a_j*K pool indices."""
    a = cfg.ranks
    diffs = [last]
    for j in range(cfg.ctx.n - 2, 0, -1):
        basis = syzygy_basis(diffs[0])
        K = len(basis)
        digits = choose(j, K)
        nvars = cfg.ctx.n + 1
        rows = [_combine(basis, [cfg.pool[digits[i * K + k]] for k in range(K)], a[j], nvars)
                for i in range(a[j - 1])]
        diffs.insert(0, LinearMatrix(cfg.ctx.n, rows))
    return diffs


def random_candidate(cfg: SearchConfig, k: int) -> list[LinearMatrix]:
    rng = random.Random((cfg.seed << 64) | k)
    m = len(cfg.pool)
    last = _matrix_from_digits(cfg, [rng.randrange(m) for _ in range(_free_digits(cfg))])
    a = cfg.ranks
    return _fill_back(cfg, last, lambda j, K: [rng.randrange(m) for _ in range(a[j - 1] * K)])


def _to_digits(value: int, base: int, width: int) -> list[int]:
    out = [0] * width
    for i in range(width - 1, -1, -1):
        value, out[i] = divmod(value, base)
    return out


def exhaustive_size(cfg: SearchConfig) -> int | None:
    """Size of the exhaustive space, or None when it is not a plain product (n = 3)."""
    if cfg.ctx.n == 2:
        return len(cfg.pool) ** _free_digits(cfg)
    return None


def exhaustive_stream(cfg: SearchConfig, start: int = 0):
    """Yield (k, differentials) for k = start, start+1, ... in exhaustive order."""
    m = len(cfg.pool)
    free = _free_digits(cfg)
    outer = m ** free
    a = cfg.ranks
    if cfg.ctx.n == 2:
        for k in range(start, outer):
            yield k, [_matrix_from_digits(cfg, _to_digits(k, m, free))]
        return
    # n = 3: D_2 outer, the D_1 combinations inner
    k = 0
    for o in range(outer):
        last = _matrix_from_digits(cfg, _to_digits(o, m, free))
        K = len(syzygy_basis(last))
        width = a[0] * K
        block = m ** width
        if k + block <= start:
            k += block
            continue
        for inner in range(max(0, start - k), block):
            digits = _to_digits(inner, m, width)
            yield k + inner, _fill_back(cfg, last, lambda j, K_, d=digits: d)
        k += block


def index_of(cfg: SearchConfig, differentials) -> int:
    """Exhaustive index of a P^2 candidate (inverse of the enumeration)."""
    if cfg.ctx.n != 2:
        raise ValueError("exhaustive indices are only closed-form on P^2")
    (D,) = differentials
    if D.shape != (cfg.ranks[0], cfg.ranks[1]):
        raise ValueError(f"shape {D.shape} does not match {cfg.ctx}")
    m = len(cfg.pool)
    k = 0
    for row in D.coefficients():
        for coeffs in row:
            for c in coeffs:
                if c not in cfg.pool:
                    raise ValueError(f"coefficient {c} is not in the pool")
                k = k * m + cfg.pool.index(c)
    return k


def _candidates(cfg: SearchConfig):
    if cfg.mode == "random":
        for k in range(cfg.start, cfg.start + cfg.budget):
            yield k, random_candidate(cfg, k)
        return
    if cfg.budget == 0:
        return
    for count, item in enumerate(exhaustive_stream(cfg, cfg.start), start=1):
        yield item
        if count >= cfg.budget:
            return


def screen(res: LinearResolution, seed: int, k: int, points: int = 4) -> bool:
    """Cheap necessary check: every D_j has rank rho_j at a few points."""
    rhos = res.signature.expected_pointwise_ranks()
    pts = screening_points(res.ctx.n, (seed << 64) | k, points)
    return all(evaluate_rank(D, p) == rho for D, rho in zip(res.differentials, rhos) for p in pts)


def dual_map_filter(res: LinearResolution) -> bool:
    """Condition 2 of the n = 2, 3 criteria: injectivity/surjectivity of the dual maps."""
    return _criterion(res)["ok"]


def examine(cfg: SearchConfig, k: int, diffs) -> tuple[int, str, dict | None]:
    """Run the filter chain on candidate k; returns (k, stage reached, certificate json)."""
    res = LinearResolution(cfg.ctx, diffs)
    if not screen(res, cfg.seed, k):
        return k, "screen", None
    if not dual_map_filter(res):
        return k, "dual-map", None
    report = verify_resolution(res, seed=cfg.seed)
    if not report.verdict:
        return k, "verdict", None
    prov = {"tool": "ulrich", "version": __version__, "seed": cfg.seed, "mode": cfg.mode,
            "pool": [str(c) for c in cfg.pool], "candidate_index": k}
    return k, "certified", UlrichCertificate(res, report, prov).to_json()


def _examine_batch(args):
    cfg, batch = args
    return [examine(cfg, k, diffs) for k, diffs in batch]


@dataclass
class SearchResult:
    config: SearchConfig
    certificates: list
    counts: dict = field(default_factory=dict)
    wall_time: float = 0.0
    last_index: int | None = None

    def manifest(self) -> dict:
        return {"config": self.config.to_json(), "counts": self.counts,
                "last_index": self.last_index, "wall_time_seconds": round(self.wall_time, 3),
                "certificates": [c.content_hash for c in self.certificates],
                "tool": "ulrich", "version": __version__}


def _batches(cfg: SearchConfig):
    batch = []
    for item in _candidates(cfg):
        batch.append(item)
        if len(batch) == BATCH:
            yield batch
            batch = []
    if batch:
        yield batch


def search_ulrich(cfg: SearchConfig, jobs: int = 1) -> SearchResult:
    """All certificates found among the configured candidates.

    The output (certificates, counts) is a function of cfg alone: batches
    are order-normalized by candidate index and, with a limit, everything
    after the limit-th new certificate is discarded.
    """
    t0 = time.perf_counter()
    outcomes = []
    found = 0
    seen: set = set()
    pool_exec = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        stream = _batches(cfg)
        while True:
            group = [b for _, b in zip(range(max(jobs, 1)), stream)]
            if not group:
                break
            if pool_exec is None:
                results = [_examine_batch((cfg, b)) for b in group]
            else:
                results = list(pool_exec.map(_examine_batch, [(cfg, b) for b in group]))
            for batch_result in results:
                outcomes.extend(batch_result)
            outcomes.sort(key=lambda o: o[0])
            found = _count_new(outcomes, seen)
            if cfg.limit is not None and found >= cfg.limit:
                break
    finally:
        if pool_exec is not None:
            pool_exec.shutdown()

    counts = {"generated": 0, "screen": 0, "dual-map": 0, "verdict": 0,
              "certified": 0, "duplicate": 0}
    certs = []
    hashes: set = set()
    last = None
    for k, stage, cert in outcomes:
        if cfg.limit is not None and len(certs) >= cfg.limit:
            break
        counts["generated"] += 1
        last = k
        if stage != "certified":
            counts[stage] += 1
            continue
        c = UlrichCertificate.from_json(cert)
        h = c.resolution.content_hash()
        if h in hashes:
            counts["duplicate"] += 1
            continue
        hashes.add(h)
        counts["certified"] += 1
        certs.append(c)
    return SearchResult(cfg, certs, counts, time.perf_counter() - t0, last)


def _count_new(outcomes, seen: set) -> int:
    for _, stage, cert in outcomes:
        if stage == "certified":
            seen.add(json.dumps(cert["differentials"], sort_keys=True))
    return len(seen)


def write_results(result: SearchResult, directory: str) -> list[str]:
    """One JSON file per certificate plus manifest.json; returns the paths written."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for cert in result.certificates:
        k = cert.provenance.get("candidate_index", 0)
        path = os.path.join(directory, f"cert-{k:012d}-{cert.content_hash[:12]}.json")
        with open(path, "w") as fh:
            fh.write(cert.dumps() + "\n")
        paths.append(path)
    path = os.path.join(directory, "manifest.json")
    with open(path, "w") as fh:
        json.dump(result.manifest(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths.append(path)
    return paths
