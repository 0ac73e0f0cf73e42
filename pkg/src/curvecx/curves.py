"""Closed curves as cyclic words in the free fundamental group.

Intersection numbers count linked pairs of axes in the Cayley tree drawn in
the plane by the ribbon structure: two lifts cross exactly when their
endpoints alternate in the cyclic order at infinity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .surface import PuncturedSurface, SurfaceError


class CurveError(ValueError):
    pass


TRIVIAL = "trivial"
PERIPHERAL = "peripheral"
SIMPLE = "simple_essential"
NONSIMPLE = "nonsimple"


@dataclass(frozen=True, order=True)
class CurveClass:
    """Free homotopy class of an unoriented closed curve.

    ``codes`` is the canonical form: the least tuple among all rotations of
    the cyclically reduced word and of its inverse.
    """
    codes: tuple
    word: str = ""

    def __len__(self):
        return len(self.codes)

    @property
    def canonical_form(self):
        return self.word

    def __str__(self):
        return self.word

    def array(self):
        return np.asarray(self.codes, dtype=np.int64)


def free_reduce(codes):
    out = []
    for c in codes:
        if out and out[-1] == c ^ 1:
            out.pop()
        else:
            out.append(c)
    return out


def cyclic_reduce(codes):
    out = free_reduce(codes)
    i, j = 0, len(out)
    while j - i >= 2 and out[i] == out[j - 1] ^ 1:
        i += 1
        j -= 1
    return tuple(out[i:j])


def inverse(codes):
    return tuple(c ^ 1 for c in reversed(codes))


def canonical(codes):
    codes = tuple(codes)
    if not codes:
        return codes
    best = codes
    for w in (codes, inverse(codes)):
        for k in range(len(w)):
            r = w[k:] + w[:k]
            if r < best:
                best = r
    return best


def primitive_root(codes):
    """(root, k) with codes == root**k, root of minimal length."""
    codes = tuple(codes)
    n = len(codes)
    for p in range(1, n + 1):
        if n % p == 0 and codes == codes[p:] + codes[:p]:
            return codes[:p], n // p
    return codes, 1


def make_class(S: PuncturedSurface, codes) -> CurveClass:
    c = canonical(cyclic_reduce(codes))
    return CurveClass(c, S.format(c))


def normalize(S: PuncturedSurface, raw) -> CurveClass:
    if isinstance(raw, CurveClass):
        return raw
    try:
        codes = S.parse(raw)
    except SurfaceError as exc:
        raise CurveError(str(exc)) from None
    n = S.nletters
    if any(c < 0 or c >= n for c in codes):
        raise CurveError("letter code out of range")
    return make_class(S, codes)


def _pos(S):
    return np.asarray(S.position, dtype=np.int64)


# -- rays ---------------------------------------------------------------

def _check_ray(prefix, period):
    if not period:
        raise CurveError("ray period must be nonempty")
    full = list(prefix) + list(period) + [period[0]]
    for x, y in zip(full, full[1:]):
        if x == y ^ 1:
            raise CurveError("ray is not reduced")


def _ray_at(ray, k):
    prefix, period = ray
    if k < len(prefix):
        return prefix[k]
    return period[(k - len(prefix)) % len(period)]


def _ray_prefix(r1, r2):
    bound = max(len(r1[0]), len(r2[0])) + len(r1[1]) + len(r2[1])
    for k in range(bound):
        if _ray_at(r1, k) != _ray_at(r2, k):
            return k
    return None


def _cyc(pos, N, h1, h2, h3):
    return 1 if (pos[h2] - pos[h1]) % N < (pos[h3] - pos[h1]) % N else -1


def ray_compare(S: PuncturedSurface, ray1, ray2, ray3) -> int:
    """Orientation (+1/-1) of three rays in the cyclic order at infinity.

    A ray is ``(prefix, period)``: an eventually periodic reduced word read
    from the base vertex, given as strings or code tuples.
    """
    rays = []
    for r in (ray1, ray2, ray3):
        prefix, period = r
        prefix, period = S.parse(prefix), S.parse(period)
        _check_ray(prefix, period)
        rays.append((prefix, period))
    p12 = _ray_prefix(rays[0], rays[1])
    p13 = _ray_prefix(rays[0], rays[2])
    p23 = _ray_prefix(rays[1], rays[2])
    if p12 is None or p13 is None or p23 is None:
        raise CurveError("two rays are equal as infinite words")
    pos, N = S.position, S.nletters
    r1, r2, r3 = rays
    if p12 == p13 == p23:
        k = p12
        return _cyc(pos, N, _ray_at(r1, k), _ray_at(r2, k), _ray_at(r3, k))
    if p12 > p13:
        m = p12
        return _cyc(pos, N, _ray_at(r1, m), _ray_at(r2, m), _ray_at(r1, m - 1) ^ 1)
    if p13 > p12:
        m = p13
        return _cyc(pos, N, _ray_at(r1, m), _ray_at(r1, m - 1) ^ 1, _ray_at(r3, m))
    m = p23
    return _cyc(pos, N, _ray_at(r2, m - 1) ^ 1, _ray_at(r2, m), _ray_at(r3, m))


# -- intersection numbers -------------------------------------------------

def _nontrivial(S, c, what="class"):
    c = normalize(S, c)
    if not c.codes:
        raise CurveError(f"trivial {what} has no intersection number")
    return c


def intersection_number(S: PuncturedSurface, c1, c2) -> int:
    a = _nontrivial(S, c1)
    b = _nontrivial(S, c2)
    ra, _ = primitive_root(a.codes)
    rb, _ = primitive_root(b.codes)
    if canonical(ra) == canonical(rb):
        # shared root: disjoint parallel copies
        return 0
    return int(kernels.count_linked(a.array(), b.array(), _pos(S), S.nletters))


def linked_pairs(S, c1, c2):
    """All (i, j, sign) with shifts i of c1 and j of c2 whose axes cross."""
    a = normalize(S, c1)
    b = normalize(S, c2)
    u, v, pos, N = a.array(), b.array(), _pos(S), S.nletters
    out = []
    for i in range(len(u)):
        for j in range(len(v)):
            s = kernels.linked(u, len(u), i, v, len(v), j, pos, N)
            if s:
                out.append((i, j, int(s)))
    return out


def self_intersection(S: PuncturedSurface, c) -> int:
    a = _nontrivial(S, c)
    root, k = primitive_root(a.codes)
    w = np.asarray(root, dtype=np.int64)
    base = int(kernels.count_self_linked(w, _pos(S), S.nletters)) // 2
    # k parallel copies of root cross pairwise like root, plus k - 1 twists
    return k * k * base + (k - 1)


def _peripheral_set(S):
    got = getattr(S, "_periph_canon", None)
    if got is None:
        got = frozenset(canonical(S.parse(w)) for w in S.peripheral_words)
        object.__setattr__(S, "_periph_canon", got)
    return got


def is_peripheral(S, c) -> bool:
    c = normalize(S, c)
    if not c.codes:
        return False
    root, _ = primitive_root(c.codes)
    return canonical(root) in _peripheral_set(S)


def classify(S: PuncturedSurface, c) -> str:
    c = normalize(S, c)
    if not c.codes:
        return TRIVIAL
    if is_peripheral(S, c):
        return PERIPHERAL
    return SIMPLE if self_intersection(S, c) == 0 else NONSIMPLE


def is_simple_essential(S, c) -> bool:
    return classify(S, c) == SIMPLE


# -- multicurves and weights ---------------------------------------------

def as_tuple(S, entries):
    """Normalize a tuple of multicurves (each a string or list of strings)."""
    out = []
    for e in entries:
        if isinstance(e, (str, CurveClass)) or (isinstance(e, tuple) and e and isinstance(e[0], int)):
            e = [e]
        comps = []
        for w in e:
            c = normalize(S, w)
            if c not in comps:
                comps.append(c)
        out.append(tuple(comps))
    return tuple(out)


def multicurve_intersection(S, m1, m2) -> int:
    return sum(intersection_number(S, x, y) for x in m1 for y in m2)


def _weights(t, n):
    t = list(t)
    if len(t) != n:
        raise CurveError(f"weight vector has {len(t)} entries, tuple has {n}")
    if any(x < 0 for x in t):
        raise CurveError("weights must be nonnegative")
    return t


def weighted_intersection(S, t, alpha, gamma):
    alpha = as_tuple(S, alpha)
    t = _weights(t, len(alpha))
    g = [gamma] if isinstance(gamma, (str, CurveClass)) else list(gamma)
    g = [normalize(S, x) for x in g]
    return sum(ti * multicurve_intersection(S, ai, g) for ti, ai in zip(t, alpha))


def self_weight(S, t, alpha):
    """i(t.alpha) = sum over j < k of t_j t_k i(alpha_j, alpha_k)."""
    alpha = as_tuple(S, alpha)
    t = _weights(t, len(alpha))
    total = 0
    for j in range(len(alpha)):
        for k in range(j + 1, len(alpha)):
            total += t[j] * t[k] * multicurve_intersection(S, alpha[j], alpha[k])
    return total


def norm_alpha(S, t, alpha):
    return math.sqrt(self_weight(S, t, alpha))


# -- enumeration ----------------------------------------------------------

def cyclic_words(nletters, max_len):
    """Canonical cyclically reduced words of length 1..max_len."""
    seen = set()
    out = []

    def rec(prefix, L):
        if len(prefix) == L:
            if prefix[0] != prefix[-1] ^ 1:
                c = canonical(prefix)
                if c == tuple(prefix) and c not in seen:
                    seen.add(c)
                    out.append(c)
            return
        for x in range(nletters):
            if prefix and prefix[-1] == x ^ 1:
                continue
            prefix.append(x)
            rec(prefix, L)
            prefix.pop()

    for L in range(1, max_len + 1):
        rec([], L)
    return out


def random_word(rng, nletters, length):
    w = []
    while len(w) < length:
        x = int(rng.integers(0, nletters))
        if w and w[-1] == x ^ 1:
            continue
        w.append(x)
    return tuple(w)


__all__ = [
    "CurveClass", "CurveError", "normalize", "ray_compare", "intersection_number",
    "self_intersection", "classify", "weighted_intersection", "norm_alpha",
    "self_weight", "linked_pairs", "is_peripheral", "cyclic_words", "as_tuple",
    "TRIVIAL", "PERIPHERAL", "SIMPLE", "NONSIMPLE",
]
