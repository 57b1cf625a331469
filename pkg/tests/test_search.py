import json
import random

import pytest

from ulrich.gallery import p2_cubic_alpha, p3_pair
from ulrich.numerology import UlrichContext
from ulrich.polyring import is_zero_matrix, mat_compose
from ulrich.resolution import LinearResolution, UlrichCertificate, reverify, verify_resolution
from ulrich.search import (SearchConfig, dual_map_filter, exhaustive_size,
                           exhaustive_stream, index_of, random_candidate, screen, search_ulrich,
                           syzygy_basis, write_results)

CUBIC = UlrichContext(2, 3, 3)


def test_config_validation():
    with pytest.raises(ValueError, match="n in"):
        SearchConfig(UlrichContext(4, 2, 2), (0, 1), 10, 0)
    with pytest.raises(ValueError):
        SearchConfig(UlrichContext(3, 3, 1), (0, 1), 10, 0)
    with pytest.raises(ValueError):
        SearchConfig(CUBIC, (), 10, 0)
    with pytest.raises(ValueError):
        SearchConfig(CUBIC, (0, 1), -1, 0)
    with pytest.raises(ValueError):
        SearchConfig(CUBIC, (0, 1), 1, -1)
    with pytest.raises(ValueError):
        SearchConfig(CUBIC, (0, 1), 1, 0, mode="greedy")
    assert SearchConfig(CUBIC, (1, 0, 1, "1/2"), 1, 0).pool == (1, 0, 0.5)


def test_budget_zero():
    for mode in ("random", "exhaustive"):
        res = search_ulrich(SearchConfig(CUBIC, (0, 1), 0, 1, mode))
        assert res.certificates == [] and res.counts["generated"] == 0


def test_exhaustive_enumerates_the_cubic_example():
    cfg = SearchConfig(CUBIC, (0, 1), 1, 0, "exhaustive")
    k = index_of(cfg, [p2_cubic_alpha()])
    assert 0 <= k < exhaustive_size(cfg) == 2 ** 54
    got_k, diffs = next(exhaustive_stream(cfg, k))
    assert got_k == k and diffs[0] == p2_cubic_alpha()
    res = search_ulrich(SearchConfig(CUBIC, (0, 1), 1, 0, "exhaustive", start=k))
    assert len(res.certificates) == 1
    assert res.certificates[0].resolution.differentials[0] == p2_cubic_alpha()


def test_index_inverts_enumeration():
    rng = random.Random(1)
    cfg = SearchConfig(CUBIC, (0, 1, -1), 1, 0, "exhaustive")
    for _ in range(20):
        k = rng.randrange(exhaustive_size(cfg))
        _, diffs = next(exhaustive_stream(cfg, k))
        assert index_of(cfg, diffs) == k


def test_small_exhaustive_space_is_complete():
    ctx = UlrichContext(2, 2, 2)
    cfg = SearchConfig(ctx, (0, 1), 10_000, 0, "exhaustive")
    res = search_ulrich(cfg)
    assert res.counts["generated"] == 2 ** 9
    # (x, y, z) up to order: alpha has three independent linear forms among 0/1 vectors
    assert all(c.report.verdict for c in res.certificates)
    assert len(res.certificates) == res.counts["certified"] > 0


def test_random_search_deterministic_and_parallel_invariant():
    cfg = SearchConfig(CUBIC, (0, 1), 40, 12345)
    a = search_ulrich(cfg)
    b = search_ulrich(cfg)
    c = search_ulrich(cfg, jobs=2)
    ha = [x.content_hash for x in a.certificates]
    assert ha and ha == [x.content_hash for x in b.certificates] == [x.content_hash for x in c.certificates]
    assert a.counts == b.counts == c.counts
    assert sum(v for k, v in a.counts.items() if k != "generated") == a.counts["generated"]


def test_limit_is_deterministic():
    cfg = SearchConfig(CUBIC, (0, 1), 500, 77, limit=2)
    a = search_ulrich(cfg)
    b = search_ulrich(cfg, jobs=2)
    assert len(a.certificates) == 2
    assert [x.content_hash for x in a.certificates] == [x.content_hash for x in b.certificates]
    assert a.counts == b.counts and a.last_index == b.last_index
    assert a.certificates[-1].provenance["candidate_index"] == a.last_index


def test_certificates_reverify_from_serialization(tmp_path):
    res = search_ulrich(SearchConfig(CUBIC, (0, 1), 30, 5))
    paths = write_results(res, tmp_path)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["counts"] == res.counts
    assert len(paths) == len(res.certificates) + 1
    for p in paths[:-1]:
        cert = UlrichCertificate.loads(open(p).read())
        assert reverify(cert).content_hash == cert.content_hash


def test_p3_search_builds_complexes():
    ctx = UlrichContext(3, 2, 2)
    cfg = SearchConfig(ctx, (-1, 0, 1), 40, 2)
    for k in range(10):
        D1, D2 = random_candidate(cfg, k)
        assert is_zero_matrix(mat_compose(D1, D2))
    res = search_ulrich(cfg)
    assert res.certificates
    for cert in res.certificates:
        assert cert.report.criterion["ok"]


def test_p3_exhaustive_start_matches_stream():
    ctx = UlrichContext(3, 2, 2)
    cfg = SearchConfig(ctx, (0, 1), 5, 0, "exhaustive")
    stream = exhaustive_stream(cfg, 0)
    head = [next(stream) for _ in range(40)]
    assert [k for k, _ in head] == list(range(40))
    k, diffs = next(exhaustive_stream(cfg, 33))
    assert k == 33 and diffs == head[33][1]


def test_syzygies_of_coordinates_are_koszul():
    basis = syzygy_basis(p3_pair()[1])
    assert len(basis) == 6


def test_filter_soundness_audit():
    """Full verification of 10^3 rejected candidates never yields a certificate."""
    cfg = SearchConfig(CUBIC, (0, 1), 1, 2718)
    audited = {"screen": 0, "dual-map": 0}
    k = 0
    while sum(audited.values()) < 1000:
        diffs = random_candidate(cfg, k)
        res = LinearResolution(CUBIC, diffs)
        if not screen(res, cfg.seed, k):
            stage = "screen"
        elif not dual_map_filter(res):
            stage = "dual-map"
        else:
            stage = None
        if stage:
            audited[stage] += 1
            assert not verify_resolution(res).verdict
        k += 1
    assert audited["dual-map"] > 50
