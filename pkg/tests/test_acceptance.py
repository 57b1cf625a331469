"""The eleven acceptance criteria, each an exact check.

Run directly (``python3 tests/test_acceptance.py``) or through pytest; a
PASS/FAIL line per criterion is printed in the terminal summary.
"""

import io
import json
import time
from math import comb

from ulrich.cli import run
from ulrich.gallery import NAMES, build_C, extract_blocks, fixture, p2_cubic_alpha
from ulrich.numerology import (UlrichContext, bott_dimension, bott_euler, chi_omega, chi_ulrich,
                               rank1_classify, rank2_obstructed, resolution_ranks, ulrich_profile)
from ulrich.resolution import UlrichCertificate, cohomology_table, reverify, ulrich_verdict
from ulrich.search import SearchConfig, index_of, search_ulrich

# documented seed for the random-mode search reproduction
SEARCH_SEED = 20240611

GRID = [UlrichContext(n, d, r) for n in range(1, 6) for d in range(1, 7) for r in range(1, 7)]


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    return run(list(argv), stdout=out, stderr=err), out.getvalue()


def test_c01_gallery_verification():
    t0 = time.perf_counter()
    names = [f"p2-banded-d{k}" for k in range(2, 6)] + ["p3-d2", "p2-cubic-r3"]
    for name in names:
        code, out = _cli("verify", "--gallery", name)
        assert code == 0, name
        assert json.loads(out)["report"]["verdict"] is True
    assert time.perf_counter() - t0 < 300


def test_c02_det_C_is_four():
    assert build_C(extract_blocks(p2_cubic_alpha())).det() == 4


def test_c03_resolution_ranks():
    assert list(resolution_ranks(UlrichContext(3, 2, 2)).ranks) == [5, 4, 1]
    assert list(resolution_ranks(UlrichContext(2, 3, 3)).ranks) == [6, 3]


def test_c04_alternating_sum_grid():
    t0 = time.perf_counter()
    assert len(GRID) == 180
    for ctx in GRID:
        a = resolution_ranks(ctx).ranks
        assert sum((-1) ** (j + 1) * a[j - 1] for j in range(1, ctx.n + 1)) == ctx.r
    assert time.perf_counter() - t0 < 1


def test_c05_chi_consistency_grid():
    for ctx in GRID:
        a = resolution_ranks(ctx).ranks
        for j in range(1, ctx.n + 1):
            assert -chi_omega(ctx, -ctx.d, j) == a[j - 1]


def test_c06_recursion_oracle():
    for n in range(1, 5):
        for d in range(1, 7):
            for r in range(1, 7):
                ctx = UlrichContext(n, d, r)
                for i in range(-3 * n * d, 3 * n * d + 1):
                    assert chi_omega(ctx, i, 0) == chi_ulrich(ctx, i)
                    for j in range(1, n + 1):
                        rec = comb(n + 1, j) * chi_ulrich(ctx, i) - chi_omega(ctx, i + 1, j - 1)
                        assert chi_omega(ctx, i, j) == rec


def test_c07_bott_cross_checks():
    assert bott_dimension(3, 1, 0, 2) == 6
    for n in range(1, 7):
        for p in range(n + 1):
            assert bott_dimension(n, p, p, 0) == 1
    for n in range(1, 5):
        for j in range(1, n + 1):
            for t in range(-8, 9):
                chi_o = comb(t - j + n, n) if t - j >= 0 else (
                    (-1) ** n * comb(j - t - 1, n) if t - j <= -n - 1 else 0)
                assert bott_euler(n, j, t) - comb(n + 1, j) * chi_o + bott_euler(n, j - 1, t) == 0


def test_c08_cohomology_equivalence():
    for name in NAMES:
        res = fixture(name)
        assert ulrich_verdict(res).report.verdict
        ctx = res.ctx
        tab = cohomology_table(res, -(ctx.n + 1) * ctx.d, ctx.d)
        for t in tab.twists:
            assert tab[t] == ulrich_profile(ctx, t).values, (name, t)
        for p in range(1, ctx.n + 1):
            assert tab[-p * ctx.d] == (0,) * (ctx.n + 1)
        assert tab[0][0] == ctx.r * ctx.d ** ctx.n
    assert cohomology_table(fixture("p3-d2"), 0, 0)[0][0] == 16
    assert cohomology_table(fixture("p2-banded-d3"), 0, 0)[0][0] == 18


def test_c09_nonexistence():
    assert rank2_obstructed(3, 3) is True
    assert rank2_obstructed(4, 2) is True
    for n in range(1, 7):
        for d in range(1, 7):
            found = rank1_classify(n, d) is not None
            assert found == (d == 1 or n == 1), (n, d)


def test_c10_search_reproduction():
    t0 = time.perf_counter()
    ctx = UlrichContext(2, 3, 3)
    probe = SearchConfig(ctx, (0, 1), 1, 0, "exhaustive")
    k = index_of(probe, [p2_cubic_alpha()])
    exhaustive = search_ulrich(SearchConfig(ctx, (0, 1), 64, 0, "exhaustive", start=k))
    hits = [c for c in exhaustive.certificates if c.resolution.differentials[0] == p2_cubic_alpha()]
    assert len(hits) == 1 and hits[0].provenance["candidate_index"] == k

    cfg = SearchConfig(ctx, (0, 1), 100_000, SEARCH_SEED, "random", limit=1)
    first = search_ulrich(cfg)
    second = search_ulrich(cfg)
    assert len(first.certificates) >= 1
    assert [c.content_hash for c in first.certificates] == [c.content_hash for c in second.certificates]
    assert first.counts == second.counts
    assert time.perf_counter() - t0 < 1800


def test_c11_certificate_round_trip():
    for name in NAMES:
        cert = ulrich_verdict(fixture(name), provenance={"source": name})
        parsed = UlrichCertificate.loads(cert.dumps())
        assert parsed.content_hash == cert.content_hash
        assert reverify(parsed).content_hash == cert.content_hash


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-v"]))
