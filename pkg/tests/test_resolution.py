import json
import random
from math import comb

import pytest

from ulrich.gallery import NAMES, banded_alpha, build_C, extract_blocks, fixture, p2_cubic_alpha, p3_pair
from ulrich.numerology import UlrichContext, chi_ulrich, resolution_ranks, ulrich_profile
from ulrich.polyring import HomPoly, LinearMatrix, evaluate_rank, parse_linear_form
from ulrich.resolution import (REDUCTION_RANK2, LinearResolution, NotUlrich, UlrichCertificate,
                               check_constant_rank, cohomology_table, pointwise_exactness,
                               reverify, serre_dual_map, ulrich_verdict, validate_complex,
                               verify_resolution)
from ulrich.search import SearchConfig, random_candidate


def p2_ctx(d, r):
    return UlrichContext(2, d, r)


def test_shapes_validated():
    D1, D2 = p3_pair()
    ctx = UlrichContext(3, 2, 2)
    with pytest.raises(ValueError):
        LinearResolution(ctx, [D1])
    with pytest.raises(ValueError):
        LinearResolution(ctx, [D2, D1])
    with pytest.raises(ValueError):
        LinearResolution(p2_ctx(3, 2), [banded_alpha(4)])
    with pytest.raises(ValueError):
        LinearResolution(UlrichContext(3, 3, 1), [])
    with pytest.raises(ValueError):
        LinearResolution(p2_ctx(2, 2), [LinearMatrix.zero(3, 3, 1)])


def test_validate_complex():
    assert validate_complex(fixture("p3-d2")).ok
    assert validate_complex(fixture("p2-banded-d4")).ok
    D1, D2 = p3_pair()
    bad = LinearResolution(UlrichContext(3, 2, 2), [D1, D2.with_entry(1, 0, -D2[1, 0])])
    check = validate_complex(bad)
    assert not check.ok
    assert check.detail["j"] == 1
    assert check.detail["value"] != "0"


def test_exactness_gallery():
    ex = pointwise_exactness(fixture("p2-banded-d3"))
    assert ex.ok and ex.detail["expected_ranks"] == [2]
    ex = pointwise_exactness(fixture("p3-d2"))
    assert ex.ok and ex.detail["expected_ranks"] == [3, 1]
    assert all(p["missing_variables"] == [] for p in ex.detail["positions"])


def test_exactness_witness_for_zeroed_column():
    display = [["x", "y", "z", "0"], ["0", "x", "y", "0"]]
    alpha = LinearMatrix.from_display(display, ("x", "y", "z"))
    ex = pointwise_exactness(LinearResolution(p2_ctx(3, 2), [alpha]))
    assert not ex.ok
    witness = ex.detail["positions"][0]["witness"]
    assert witness == [0, 0, 1]
    assert evaluate_rank(alpha, witness) < 2


def test_groebner_catches_unscreened_rank_drop():
    # common zero (15:5:1) lies outside every screened point
    names = ("x", "y", "z")
    D = LinearMatrix(2, [[parse_linear_form("x - 3y", names)], [parse_linear_form("y - 5z", names)]])
    info = check_constant_rank(D, 1, seed=0)
    assert info["witness"] is None
    assert not info["ok"]
    assert info["missing_variables"]
    assert evaluate_rank(D, (15, 5, 1)) == 0


def test_serre_dual_map_examples():
    M = serre_dual_map(banded_alpha(2), -2)
    assert M.shape == (3, 3) and M.rank() == 3
    assert serre_dual_map(banded_alpha(2), 3).ncols == 0
    big = serre_dual_map(p2_cubic_alpha(), -3)
    assert big.shape == (18, 18)
    assert big.rank() == 18
    assert build_C(extract_blocks(p2_cubic_alpha())).det() != 0


def test_serre_dual_dimensions_square_for_plane_contexts():
    for d in range(2, 7):
        for r in range(1, 7):
            ctx = p2_ctx(d, r)
            sig = resolution_ranks(ctx)
            if not sig.ok:
                continue
            a1, a2 = sig.ranks
            assert a2 * comb(d + 1, 2) == a1 * comb(d, 2) == r * (d - 1) * d * (d + 1) // 4


def test_table_values_from_spec_examples():
    tab = cohomology_table(fixture("p3-d2"), -8, 0)
    assert tab[0][0] == 16
    for t in (-2, -4, -6):
        assert tab[t] == (0, 0, 0, 0)
    assert cohomology_table(fixture("p2-banded-d3"), 0, 0)[0][0] == 18


@pytest.mark.parametrize("name", NAMES)
def test_table_matches_formula(name):
    res = fixture(name)
    n, d = res.ctx.n, res.ctx.d
    tab = cohomology_table(res, -(n + 1) * d, d)
    for t in tab.twists:
        assert tab[t] == ulrich_profile(res.ctx, t).values


def _exact_non_ulrich(ctx, seed):
    cfg = SearchConfig(ctx, (0, 1), 1, seed)
    for k in range(2000):
        res = LinearResolution(ctx, random_candidate(cfg, k))
        rep = verify_resolution(res)
        if rep.failed_stage == "cohomology":
            return res, rep
    raise AssertionError("no exact non-Ulrich candidate found")


def test_cohomology_failure_path():
    res, rep = _exact_non_ulrich(p2_ctx(3, 3), seed=3)
    assert rep.exactness_ok and rep.local_freeness_ok and not rep.cohomology_ok
    q, t = rep.cohomology_failure
    assert t in (-3, -6)
    assert rep.criterion["ok"] is False and rep.criterion["agrees"]
    with pytest.raises(NotUlrich) as exc:
        ulrich_verdict(res)
    assert exc.value.report.failed_stage == "cohomology"
    # a vector bundle with this resolution still has the Ulrich Euler characteristic
    tab = cohomology_table(res, -10, 3)
    for t in tab.twists:
        h = tab[t]
        assert sum((-1) ** q * v for q, v in enumerate(h)) == chi_ulrich(res.ctx, t)
    assert any(tab[t] != ulrich_profile(res.ctx, t).values for t in tab.twists)


def test_table_euler_characteristic_on_random_exact_candidates():
    ctx = p2_ctx(3, 3)
    cfg = SearchConfig(ctx, (0, 1, -1), 1, 9)
    checked = 0
    for k in range(60):
        res = LinearResolution(ctx, random_candidate(cfg, k))
        if not pointwise_exactness(res).ok:
            continue
        tab = cohomology_table(res, -9, 2)
        for t in tab.twists:
            assert sum((-1) ** q * v for q, v in enumerate(tab[t])) == chi_ulrich(ctx, t)
        checked += 1
    assert checked >= 5


@pytest.mark.parametrize("name", ["p2-banded-d3", "p3-d2"])
def test_rank2_reduction_recorded_and_matches_full(name):
    res = fixture(name)
    fast = verify_resolution(res)
    full = verify_resolution(res, full=True)
    assert fast.reduction == REDUCTION_RANK2 and full.reduction is None
    assert fast.verdict and full.verdict
    assert len(full.cohomology) == res.ctx.n
    assert len(fast.cohomology) == (res.ctx.n + 1) // 2


def test_rank3_never_uses_reduction():
    rep = verify_resolution(fixture("p2-cubic-r3"))
    assert rep.reduction is None and rep.verdict
    assert rep.criterion["square"] and rep.criterion["maps"][0]["rank"] == 18


def test_criterion_on_p3():
    rep = verify_resolution(fixture("p3-d2"))
    maps = rep.criterion["maps"]
    assert len(maps) == 4 and rep.criterion["ok"]


def test_report_is_deterministic():
    a = verify_resolution(fixture("p3-d2"), seed=5).to_json()
    b = verify_resolution(fixture("p3-d2"), seed=5).to_json()
    assert a == b


@pytest.mark.parametrize("name", NAMES)
def test_certificate_round_trip(name):
    cert = ulrich_verdict(fixture(name), provenance={"timestamp": "2024-01-01T00:00:00+00:00"})
    text = cert.dumps()
    back = UlrichCertificate.loads(text)
    assert back.content_hash == cert.content_hash
    again = reverify(back)
    assert again.content_hash == cert.content_hash
    assert json.loads(text)["content_hash"] == cert.content_hash


def test_tampered_certificate_rejected():
    cert = ulrich_verdict(fixture("p2-banded-d2"))
    data = cert.to_json()
    data["report"]["first_chern"] = "4"
    with pytest.raises(ValueError, match="hash mismatch"):
        UlrichCertificate.from_json(data)


def test_provenance_outside_hash():
    res = fixture("p2-banded-d2")
    a = ulrich_verdict(res, provenance={"timestamp": "a"})
    b = ulrich_verdict(res, provenance={"timestamp": "b"})
    assert a.content_hash == b.content_hash


def test_n1_resolution_is_trivially_certified():
    res = LinearResolution(UlrichContext(1, 3, 2), [])
    cert = ulrich_verdict(res)
    assert cert.report.verdict
    tab = cohomology_table(res, -6, 3)
    for t in tab.twists:
        assert tab[t] == ulrich_profile(res.ctx, t).values
