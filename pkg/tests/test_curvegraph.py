import itertools
import os
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvecx import curvegraph as CG
from curvecx import curves as C
from curvecx.cache import cache_get, cache_put, provenance
from curvecx.surface import catalog


@pytest.fixture(scope="module")
def s05():
    return CG.build_slice(catalog("S_0_5"), 5)


@pytest.fixture(scope="module")
def s12():
    return CG.build_slice(catalog("S_1_2"), 5)


def test_slice_vertices(s05):
    S = s05.surface
    assert len(set(s05.vertices)) == len(s05)
    for v in s05.vertices:
        assert C.classify(S, v) == C.SIMPLE
        assert len(v) <= 5


def test_slice_is_complete_for_its_length(s05):
    # every simple essential cyclic word of length <= 5 is present
    S = s05.surface
    brute = {C.normalize(S, w) for w in C.cyclic_words(S.nletters, 5)
             if C.classify(S, w) == C.SIMPLE}
    assert brute == set(s05.vertices)


def test_table_against_direct_intersections(s12):
    S = s12.surface
    T = s12.table
    assert (T == T.T).all() and (np.diag(T) == 0).all()
    rng = np.random.default_rng(1)
    for _ in range(80):
        a, b = rng.integers(0, len(s12), 2)
        assert T[a, b] == C.intersection_number(S, s12.vertices[a], s12.vertices[b]) or a == b


def test_distance_certificates(s05):
    for a, b in itertools.combinations(range(len(s05)), 2):
        r = CG.distance_index(s05, a, b)
        i = int(s05.table[a, b])
        assert (r.upper == 1) == (i == 0)
        assert r.lower <= r.upper
        assert r.lower <= s05.D[a, b] or not r.exact
        if r.exact:
            assert r.upper <= s05.D[a, b]
        if i:
            assert r.upper <= CG.hempel_bound(i)
        if r.lower >= 3:
            assert s05.fills_pair(a, b)


def test_hempel_bound_values():
    assert CG.hempel_bound(1) == 2
    assert CG.hempel_bound(2) == 4
    assert CG.hempel_bound(4) == 6
    assert CG.hempel_bound(3) == 5


def test_low_complexity_needs_flag():
    with pytest.raises(CG.SliceError):
        CG.build_slice(catalog("S_1_1"), 3)
    sl = CG.build_slice(catalog("S_1_1"), 3, allow_low_complexity=True)
    assert not sl.connected()


def test_resource_cap():
    with pytest.raises(CG.ResourceCapError):
        CG.build_slice(catalog("S_0_5"), 5, max_vertices=10)


def test_unknown_vertex(s05):
    with pytest.raises(CG.SliceError):
        s05.vertex("abcabc")


def test_cache_roundtrip(tmp_path):
    S = catalog("S_1_2")
    a = CG.build_slice(S, 4, cache=str(tmp_path))
    files = list(tmp_path.rglob("*.json"))
    assert files
    b = CG.build_slice(S, 4, cache=str(tmp_path))
    assert a.words == b.words and (a.table == b.table).all() and a.provenance == b.provenance
    files[0].write_text("{not json")
    c = CG.build_slice(S, 4, cache=str(tmp_path))
    assert (c.table == a.table).all()


def test_cache_key_mismatch_is_ignored(tmp_path):
    key = provenance({"x": 1})
    cache_put(key, {"v": 1}, str(tmp_path))
    assert cache_get(key, str(tmp_path)) == {"v": 1}
    path = next(tmp_path.rglob("*.json"))
    path.write_text('{"key": "other", "payload": 3}')
    assert cache_get(key, str(tmp_path)) is None


def test_slice_from_curves_matches(s12):
    sub = s12.vertices[::3]
    sl = CG.slice_from_curves(s12.surface, sub)
    for x, y in itertools.combinations(sl.vertices, 2):
        assert sl.table[sl.index[x], sl.index[y]] == s12.table[s12.index[x], s12.index[y]]


def test_hull_contains_endpoints_and_geodesics(s05):
    H, approx = CG.hull(s05, ["ac", "bd"])
    assert C.normalize(s05.surface, "ac") in H and C.normalize(s05.surface, "bd") in H
    a, b = s05.vertex("ac"), s05.vertex("bd")
    assert CG.geodesic_vertices(s05, a, b) <= {s05.index[h] for h in H}


@pytest.mark.parametrize("name", ["S_0_5", "S_1_2"])
def test_short_sets_nested_in_L(name):
    sl = CG.build_slice(catalog(name), 5)
    for alpha in CG.FILLING_TUPLES[name]:
        alpha = [list(e) for e in alpha]
        prev = None
        for L in (1, 2, 4, 8):
            m, Q = CG.short_mask(sl, alpha, [1] * len(alpha), L)
            if prev is not None:
                assert (m | prev == m).all()
            prev = m


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 5), min_size=2, max_size=2), st.integers(1, 6))
def test_short_set_definition(ws, L):
    sl = CG.build_slice(catalog("S_0_5"), 5)
    S = sl.surface
    alpha = [["ac"], ["bd"]]
    t = [Fraction(w) for w in ws]
    rep = CG.short_set_report(sl, alpha, t, L)
    q = C.self_weight(S, t, alpha)
    for w in sl.words:
        lhs = C.weighted_intersection(S, t, alpha, w)
        assert (w in rep["members"]) == (lhs * lhs <= L * L * q)


def test_short_hull_contains_short_sets():
    sl = CG.build_slice(catalog("S_1_2"), 5)
    alpha = [["a"], ["abbc"]]
    SH = CG.short_hull_mask(sl, alpha, 2, 3)
    for t in CG.projective_grid(2, 3):
        m, _ = CG.short_mask(sl, alpha, t, 2)
        assert (SH | m == SH).all()


def test_pair_reduction():
    sl = CG.build_slice(catalog("S_0_5"), 5)
    rep = CG.pair_reduction_check(sl, [["ab"], ["ac"], ["ad"]], 3, 3)
    assert rep["checked"] > 0 and rep["violations"] == 0


def test_balance_vector_equalizes():
    S = catalog("S_0_5")
    alpha = C.as_tuple(S, [["ac"], ["bd"]])
    for beta in ["ab", "abAcd", "aDbd"]:
        bv = CG.balance_vector(S, alpha, beta)
        vals = {t * C.multicurve_intersection(S, e, [C.normalize(S, beta)]) for t, e in zip(bv.entries, alpha)}
        if bv.convention == "reciprocal":
            assert vals == {1}


def test_balance_zero_one_branch():
    S = catalog("S_0_5")
    bv = CG.balance_vector(S, [["ab"], ["ac"], ["ad"]], "bc")
    assert bv.convention == "zero-one"
    assert list(bv.entries) == [0, 0, 1]


def test_four_point_intersection_check(s05):
    rep = CG.check_4ptint(s05, ["ab", "bc", "cd", "ad"], 1)
    assert set(rep) >= {"hypothesis", "lhs", "rhs", "distance"}


def test_diameter_sweep_monotone():
    sl = CG.build_slice(catalog("S_0_5"), 5)
    rep = CG.short_diameter_sweep(sl, [["ac"], ["bd"]])
    assert rep["nested"] and rep["monotone"] and rep["threshold"] is not None
