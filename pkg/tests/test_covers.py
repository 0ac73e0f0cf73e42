import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvecx import covers as V
from curvecx import curvegraph as CG
from curvecx import curves as C
from curvecx.surface import catalog
from fixtures import cover_fixture


@pytest.fixture(scope="module")
def torus2():
    return V.build_cover(V.make_spec(catalog("S_1_1"), {"a": [2, 1]}, 2))


def test_double_cover_of_torus(torus2):
    T = torus2.total
    assert (T.genus, T.punctures) == (1, 2)
    assert V.is_regular(torus2.spec)
    assert len(torus2.deck_group()) == 2
    assert V.euler_check(torus2)


def test_lifts_and_pushforward(torus2):
    lb = V.lift(torus2, "b")
    assert len(lb) == 2 and all(x.degree == 1 for x in lb)
    la = V.lift(torus2, "a")
    assert len(la) == 1 and la[0].degree == 2
    P = V.push_forward(torus2, la[0].curve)
    assert P.curve == C.normalize(torus2.base, "aa")
    assert P.root == C.normalize(torus2.base, "a") and P.multiplicity == 2


def test_spec_errors():
    S = catalog("S_1_1")
    with pytest.raises(V.CoverError):
        V.make_spec(S, {"z": [1, 2]})
    with pytest.raises(V.CoverError):
        V.build_cover(V.make_spec(S, {"a": [1, 2]}, 2))


def test_spec_json_roundtrip(tmp_path):
    spec = V.make_spec(catalog("S_0_4"), {"a": [2, 3, 1], "c": [1, 3, 2]})
    p = tmp_path / "c.json"
    import json
    p.write_text(json.dumps(spec.to_json()))
    again = V.load_spec(str(p))
    assert again.rho == spec.rho and again.degree == 3


def test_permutation_helpers():
    p, q = (1, 2, 0), (1, 0, 2)
    # first p, then q
    assert V.compose(p, q) == tuple(q[p[i]] for i in range(3))
    assert V.compose(p, V.invert(p)) == V.identity(3)
    assert sorted(map(len, V.cycles((1, 0, 2, 4, 3)))) == [1, 2, 2]
    assert len(V.generated_group([p, q], 3)) == 6


BASES = ["S_1_1", "S_0_4", "S_0_5", "S_1_2"]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(BASES), st.integers(1, 4), st.integers(0, 10 ** 6))
def test_euler_multiplicative(base, d, seed):
    spec = V.random_spec(np.random.default_rng(seed), base, d)
    cv = V.build_cover(spec)
    assert cv.total.euler_characteristic == d * cv.base.euler_characteristic
    assert V.euler_check(cv)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(BASES), st.integers(2, 4), st.integers(0, 10 ** 6), st.integers(1, 8))
def test_word_lift_roundtrip(base, d, seed, n):
    rng = np.random.default_rng(seed)
    cv = V.build_cover(V.random_spec(rng, base, d))
    w = C.random_word(rng, cv.base.nletters, n)
    for sheet in range(d):
        up, end = cv.word_up(w, sheet)
        assert end == cv.spec.monodromy(w)[sheet]
        # lift w^k until it closes; it projects to a conjugate of w^k
        k, i = 1, end
        while i != sheet:
            i = cv.spec.monodromy(w)[i]
            k += 1
        loop, last = cv.word_up(tuple(w) * k, sheet)
        assert last == sheet
        down = cv.word_down(loop)
        assert C.make_class(cv.base, down) == C.make_class(cv.base, tuple(w) * k)
        if sheet == 0:
            assert down == tuple(C.free_reduce(tuple(w) * k))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["S_0_5", "S_1_2"]), st.integers(2, 3), st.integers(0, 10 ** 6))
def test_preimage_intersections_scale_by_degree(base, d, seed):
    rng = np.random.default_rng(seed)
    cv = V.build_cover(V.random_spec(rng, base, d))
    sl = CG.build_slice(cv.base, 4)
    a, b = (sl.vertices[int(k)] for k in rng.choice(len(sl), 2, replace=False))
    la, lb = V.lift_multicurve(cv, a), V.lift_multicurve(cv, b)
    total = sum(C.intersection_number(cv.total, x, y) for x in la for y in lb)
    assert total == d * C.intersection_number(cv.base, a, b)
    assert sum(x.degree for x in V.lift(cv, a)) == d
    for x in la:
        assert C.classify(cv.total, x) == C.SIMPLE


def test_deck_group_preserves_intersections():
    cv = V.build_cover(V.make_spec(catalog("S_1_1"), {"a": [2, 3, 1]}, 3))
    G = cv.deck_group()
    assert len(G) == 3
    sl = CG.build_slice(cv.total, 3, allow_low_complexity=True)
    for g in G:
        for x, y in itertools.combinations(sl.vertices[:12], 2):
            gi = C.intersection_number(cv.total, cv.deck_image(g, x), cv.deck_image(g, y))
            assert gi == C.intersection_number(cv.total, x, y)
        for p in cv.spec.rho:
            assert V.compose(g, p) == V.compose(p, g)


def test_regularize_s3():
    spec = V.make_spec(catalog("S_1_1"), {"a": [2, 1, 3], "b": [1, 3, 2]})
    assert not V.is_regular(spec)
    reg, elems = V.regularize(spec)
    assert reg.degree == 6 and V.is_regular(reg)
    assert elems[0] == V.identity(3)
    rep = V.factor_check(spec, reg, np.random.default_rng(0))
    assert rep["violations"] == 0
    assert len(V.deck_transformations(reg)) == 6


def test_pi_projection_identity():
    cv, bs, cs = cover_fixture("S_1_2/a")
    for a in cs.words[::25]:
        rep = V.pi_projection(cv, bs, a)
        assert rep["identity_ok"], rep["identity_checks"]
        assert rep["pi"]


def test_fix1_report():
    cv, bs, cs = cover_fixture("S_1_1/a3")
    rep = V.fix1_report(cv, bs, cs)
    assert rep["ok"] and not rep["fix_not_lift_unexplained"]


def test_qi_experiment():
    cv = V.build_cover(V.make_spec(catalog("S_0_5"), {"a": [2, 1], "b": [2, 1]}, 2))
    bs = CG.build_slice(cv.base, 4)
    cs = CG.build_slice(cv.total, 4)
    rep = V.experiment_qi(cv, bs, cs)
    assert rep["pairs"] > 0 and rep["disjoint_pairs_ok"]
    lam = rep["fitted_lambda"]
    for r in rep["scatter"]:
        assert r["d_base"] / lam - lam - 1e-9 <= r["d_cover"] <= lam * (r["d_base"] + 1) + 1e-9


def test_qi_rejects_disconnected():
    cv = V.build_cover(V.make_spec(catalog("S_1_1"), {"a": [2, 1]}, 2))
    with pytest.raises(CG.SliceError):
        V.experiment_qi(cv, CG.build_slice(cv.base, 3, allow_low_complexity=True),
                        CG.build_slice(cv.total, 3, allow_low_complexity=True))


def test_covercirc_balanced():
    cv, bs, cs = cover_fixture("S_1_1/a3")
    a = cs.words[7]
    rep = V.experiment_covercirc(cv, cs, bs, a)
    assert rep["ones_balanced"]
    assert len(rep["orbit"]) in (1, 3)


def test_invariant_slice_and_deck_permutations():
    cv = V.build_cover(V.make_spec(catalog("S_1_2"), {"a": [2, 1]}, 2))
    sl = V.invariant_slice(cv, CG.build_slice(cv.total, 3))
    perms = V.deck_permutations(cv, sl)
    for p in perms:
        p = np.asarray(p)
        assert (sl.table[np.ix_(p, p)] == sl.table).all()
