import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

import oracles as O
from curvecx import curves as C
from curvecx.surface import catalog

T = catalog("S_1_1")
P = catalog("S_0_4")


def test_torus_oracle_small():
    assert C.intersection_number(T, "a", "b") == 1
    assert C.intersection_number(T, O.torus_word(1, 1), O.torus_word(1, -1)) == 2


@settings(max_examples=80, deadline=None)
@given(st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20))
def test_torus_oracle_random_slopes(p, q, r, s):
    import math
    assume(math.gcd(p, q) == 1 and math.gcd(r, s) == 1)
    assert C.intersection_number(T, O.torus_word(p, q), O.torus_word(r, s)) == abs(p * s - q * r)
    assert C.self_intersection(T, O.torus_word(p, q)) == 0


def test_pillowcase_oracle():
    sub = O.pillow_to_catalog(P)
    m = lambda w: "".join(sub[c] for c in w)
    slopes = O.torus_slopes(3)
    for k, (p, q) in enumerate(slopes):
        assert C.classify(P, m(O.pillow_word(p, q))) == C.SIMPLE
        for r, s in slopes[k + 1:]:
            got = C.intersection_number(P, m(O.pillow_word(p, q)), m(O.pillow_word(r, s)))
            assert got == 2 * abs(p * s - q * r)


def test_classification():
    assert C.classify(T, "aA") == C.TRIVIAL
    assert C.classify(T, "abAB") == C.PERIPHERAL
    assert C.classify(T, "BAba") == C.PERIPHERAL
    assert C.classify(T, "abABabAB") == C.PERIPHERAL
    assert C.classify(T, "ab") == C.SIMPLE
    assert C.classify(T, "aabb") == C.NONSIMPLE
    assert C.classify(P, "a") == C.PERIPHERAL
    assert C.classify(P, "ab") == C.SIMPLE


def test_normalize_is_conjugacy_and_inversion_invariant():
    a = C.normalize(T, "abAAb")
    assert C.normalize(T, "AbabA") == a  # rotation
    assert C.normalize(T, "BaaBA") == a  # inverse
    assert C.normalize(T, "bBabAAb") == a  # free reduction


def test_shared_root_has_zero_intersection():
    assert C.intersection_number(T, "ab", "abab") == 0
    assert C.intersection_number(T, "aab", "aabaab") == 0


def test_trivial_curve_rejected():
    with pytest.raises(C.CurveError):
        C.intersection_number(T, "", "a")


def test_self_intersection_of_powers():
    assert C.self_intersection(T, "aa") == 1
    assert C.self_intersection(T, "aaa") == 2
    w = "aabb"
    base = C.self_intersection(T, w)
    assert C.self_intersection(T, w * 3) == 9 * base + 2


def _apply(S, sub, word):
    return "".join(sub[ch] for ch in word)


# a -> ab and b -> ba fix abAB, so they come from mapping classes of S_1_1
PHI = {"a": "ab", "A": "BA", "b": "b", "B": "B"}
PSI = {"a": "a", "A": "A", "b": "ba", "B": "AB"}


def _rand(seed, n):
    rng = np.random.default_rng(seed)
    return T.format(C.random_word(rng, T.nletters, n))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 7), st.integers(1, 7))
def test_intersection_mapping_class_invariance(seed, n1, n2):
    w1, w2 = _rand(seed, n1), _rand(seed + 1, n2)
    assume(C.normalize(T, w1).codes and C.normalize(T, w2).codes)
    i0 = C.intersection_number(T, w1, w2)
    for sub in (PHI, PSI):
        assert C.intersection_number(T, _apply(T, sub, w1), _apply(T, sub, w2)) == i0
    assert C.intersection_number(T, w2, w1) == i0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 8))
def test_self_intersection_mapping_class_invariance(seed, n):
    w = _rand(seed, n)
    assume(C.normalize(T, w).codes)
    s0 = C.self_intersection(T, w)
    for sub in (PHI, PSI):
        assert C.self_intersection(T, _apply(T, sub, w)) == s0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 6), st.integers(2, 3))
def test_power_formula(seed, n, k):
    w = _rand(seed, n)
    c = C.normalize(T, w)
    assume(c.codes)
    root, e = C.primitive_root(c.codes)
    r = T.format(root)
    assert C.self_intersection(T, r * (e * k)) == (e * k) ** 2 * C.self_intersection(T, r) + e * k - 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 6), st.integers(1, 6), st.integers(1, 3))
def test_intersection_scales_with_powers(seed, n1, n2, k):
    S = catalog("S_1_2")
    rng = np.random.default_rng(seed)
    w1 = C.normalize(S, S.format(C.random_word(rng, S.nletters, n1)))
    w2 = C.normalize(S, S.format(C.random_word(rng, S.nletters, n2)))
    assume(w1.codes and w2.codes)
    r1, _ = C.primitive_root(w1.codes)
    r2, _ = C.primitive_root(w2.codes)
    assume(C.canonical(r1) != C.canonical(r2))
    i = C.intersection_number(S, w1, w2)
    assert C.intersection_number(S, S.format(w1.codes * k), w2) == k * i


def test_weighted_quantities():
    alpha = C.as_tuple(T, ["a", "b", ["ab"]])
    assert C.self_weight(T, [1, 1, 1], alpha) == 1 + 1 + 1
    assert C.weighted_intersection(T, [2, 3, 0], alpha, "aB") == 2 * 1 + 3 * 1
    with pytest.raises(C.CurveError):
        C.self_weight(T, [1, -1, 1], alpha)


def test_cyclic_words_are_canonical_and_distinct():
    ws = C.cyclic_words(4, 4)
    assert len(ws) == len(set(ws))
    assert all(C.canonical(w) == w for w in ws)
