"""Finite slices of the curve graph and the short-curve machinery on them.

A slice is every simple essential class up to a word-length bound, with the
full intersection table and the disjointness graph.  Distances 0, 1, 2 are
certified from intersection and filling data; larger distances carry a
lower bound of 3 and the better of the slice-BFS and Hempel upper bounds.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import curves as C
from . import kernels
from .arrangement import build_arrangement
from .cache import cache_get, cache_put, provenance


class SliceError(ValueError):
    pass


class ResourceCapError(RuntimeError):
    pass


DEFAULT_MAX_VERTICES = 5000
DEFAULT_L_SWEEP = (1, 2, 4, 8, 16)

# filling tuples used as regression fixtures; an entry may be a multicurve
FILLING_TUPLES = {
    "S_0_5": [(("ac",), ("bd",)), (("ab",), ("acAd",)), (("ab",), ("ac",), ("ad",)),
              (("ab", "cd"), ("bc",), ("ad",))],
    "S_1_2": [(("a",), ("abbc",)), (("ab",), ("aBc",)), (("a",), ("b",), ("ac",))],
}


def _pack(words):
    flat = np.fromiter((c for w in words for c in w), dtype=np.int64)
    offsets = np.zeros(len(words) + 1, dtype=np.int64)
    if words:
        offsets[1:] = np.cumsum([len(w) for w in words])
    return flat, offsets


def simple_essential_words(S, max_len):
    """Canonical codes of all simple essential classes of length <= max_len."""
    cands = [w for w in C.cyclic_words(S.nletters, max_len) if C.primitive_root(w)[1] == 1]
    if not cands:
        return []
    flat, off = _pack(cands)
    pos = np.asarray(S.position, dtype=np.int64)
    si = kernels.self_linked_batch(flat, off, pos, S.nletters)
    periph = {C.canonical(S.parse(p)) for p in S.peripheral_words}
    return [w for w, s in zip(cands, si) if s == 0 and w not in periph]


def hempel_bound(i):
    """Largest integer d allowed by d <= 2 log2 i + 2 (i >= 1)."""
    return int(math.floor(2 * math.log2(i) + 2 + 1e-12))


@dataclass(frozen=True)
class DistanceReport:
    lower: int
    upper: int
    exact: bool
    method: str
    hempel: int | None = None

    def to_json(self):
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact,
                "method": self.method, "hempel": self.hempel}


@dataclass
class CurveSlice:
    surface: object
    max_word_length: int
    vertices: list
    table: np.ndarray
    provenance: str
    index: dict = field(default_factory=dict)
    _D: np.ndarray | None = None
    _fills: dict = field(default_factory=dict)

    def __post_init__(self):
        self.index = {v: k for k, v in enumerate(self.vertices)}
        self._flat, self._off = _pack([v.codes for v in self.vertices])

    def __len__(self):
        return len(self.vertices)

    @property
    def words(self):
        return [v.word for v in self.vertices]

    def adjacency(self):
        A = (self.table == 0)
        np.fill_diagonal(A, False)
        return A

    def csr(self):
        A = self.adjacency()
        indptr = np.zeros(len(self) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum(A.sum(axis=1))
        indices = np.nonzero(A)[1].astype(np.int64)
        return indptr, indices

    @property
    def D(self):
        """Hop distances in the slice graph (-1 when disconnected)."""
        if self._D is None:
            indptr, indices = self.csr()
            self._D = kernels.bfs_all(indptr, indices, len(self))
        return self._D

    def connected(self):
        return bool((self.D >= 0).all())

    def vertex(self, c):
        c = C.normalize(self.surface, c)
        if c not in self.index:
            raise SliceError(f"{c.word} is not a vertex of this slice")
        return self.index[c]

    def row(self, c):
        """Intersection numbers of an arbitrary class with every slice vertex."""
        c = C.normalize(self.surface, c)
        if c in self.index:
            return self.table[self.index[c]].copy()
        pos = np.asarray(self.surface.position, dtype=np.int64)
        return kernels.intersection_row(self._flat, self._off, c.array(), pos, self.surface.nletters)

    def fills_pair(self, a, b):
        key = (min(a, b), max(a, b))
        if key not in self._fills:
            A = build_arrangement(self.surface, (self.vertices[a], self.vertices[b]), check=False)
            self._fills[key] = A.fills
        return self._fills[key]

    def metric(self):
        from .hyperbolic import FiniteMetric
        if not self.connected():
            raise SliceError("slice graph is disconnected; enlarge the word length")
        indptr, indices = self.csr()
        return FiniteMetric(self.D.astype(np.float64), graph=(indptr, indices),
                            labels=self.words)


def build_slice(S, max_word_length, max_vertices=DEFAULT_MAX_VERTICES, allow_low_complexity=False,
                cache=None):
    if max_word_length < 1:
        raise SliceError("max_word_length must be >= 1")
    if S.complexity < 2 and not allow_low_complexity:
        raise SliceError("curve-graph semantics need complexity >= 2 (pass allow_low_complexity)")
    key = provenance({"surface": S.to_json(), "max_word_length": max_word_length, "kind": "slice"})
    hit = cache_get(key, cache)
    if hit is not None:
        words = [tuple(w) for w in hit["words"]]
        table = np.asarray(hit["table"], dtype=np.int64).reshape(len(words), len(words))
    else:
        words = simple_essential_words(S, max_word_length)
        if len(words) > max_vertices:
            raise ResourceCapError(f"slice has {len(words)} vertices, cap is {max_vertices}")
        flat, off = _pack(words)
        pos = np.asarray(S.position, dtype=np.int64)
        table = kernels.intersection_table(flat, off, pos, S.nletters) if words else np.zeros((0, 0), np.int64)
        cache_put(key, {"words": [list(w) for w in words], "table": table.ravel().tolist()}, cache)
    if len(words) > max_vertices:
        raise ResourceCapError(f"slice has {len(words)} vertices, cap is {max_vertices}")
    verts = [C.CurveClass(w, S.format(w)) for w in words]
    return CurveSlice(S, max_word_length, verts, table, key)


def slice_from_curves(S, curves_, max_word_length=None):
    """Slice on an explicit set of simple essential curves (sorted by canonical form)."""
    verts = sorted({C.normalize(S, c) for c in curves_}, key=lambda c: (len(c), c.codes))
    for v in verts:
        if C.classify(S, v) != C.SIMPLE:
            raise SliceError(f"{v.word or '<trivial>'} is not simple and essential")
    words = [v.codes for v in verts]
    flat, off = _pack(words)
    pos = np.asarray(S.position, dtype=np.int64)
    table = kernels.intersection_table(flat, off, pos, S.nletters) if words else np.zeros((0, 0), np.int64)
    key = provenance({"surface": S.to_json(), "curves": [list(w) for w in words], "kind": "explicit"})
    L = max_word_length if max_word_length is not None else max((len(w) for w in words), default=0)
    return CurveSlice(S, L, verts, table, key)


# -- distances ------------------------------------------------------------

def distance_index(sl: CurveSlice, a: int, b: int) -> DistanceReport:
    if a == b:
        return DistanceReport(0, 0, True, "equal")
    i = int(sl.table[a, b])
    if i == 0:
        return DistanceReport(1, 1, True, "disjoint")
    h = hempel_bound(i)
    d = int(sl.D[a, b])
    if d == 2 or not sl.fills_pair(a, b):
        return DistanceReport(2, 2, True, "nonfilling", h)
    upper, method = h, "hempel"
    if 0 < d <= h:
        upper, method = d, "bfs"
    return DistanceReport(3, upper, upper == 3, method, h)


def distance(sl: CurveSlice, a, b) -> DistanceReport:
    return distance_index(sl, sl.vertex(a), sl.vertex(b))


def all_distances(sl: CurveSlice):
    """Lower/upper/exact matrices for every slice pair."""
    n = len(sl)
    lo = np.zeros((n, n), dtype=np.int64)
    hi = np.zeros((n, n), dtype=np.int64)
    ex = np.ones((n, n), dtype=bool)
    for a in range(n):
        for b in range(a + 1, n):
            r = distance_index(sl, a, b)
            lo[a, b] = lo[b, a] = r.lower
            hi[a, b] = hi[b, a] = r.upper
            ex[a, b] = ex[b, a] = r.exact
    return lo, hi, ex


def geodesic_vertices(sl, a, b):
    D = sl.D
    d = D[a, b]
    if d < 0:
        return set()
    return {int(x) for x in np.nonzero((D[a] + D[:, b] == d) & (D[a] >= 0) & (D[:, b] >= 0))[0]}


def hull_indices(sl, A):
    A = sorted(set(A))
    if not A:
        raise SliceError("hull of an empty set")
    out = set(A)
    approx = False
    for a, b in itertools.combinations(A, 2):
        out |= geodesic_vertices(sl, a, b)
        if not distance_index(sl, a, b).exact or distance_index(sl, a, b).upper != sl.D[a, b]:
            approx = True
    return out, approx


def hull(sl, curves_):
    idx, approx = hull_indices(sl, [sl.vertex(c) for c in curves_])
    return {sl.vertices[k] for k in idx}, approx


# -- short sets -----------------------------------------------------------

def _exact(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(float(x))


def alpha_rows(sl, alpha):
    """Per entry: intersection of the multicurve with every slice vertex."""
    alpha = C.as_tuple(sl.surface, alpha)
    return alpha, [sum(sl.row(c) for c in e) for e in alpha]


def short_mask(sl, alpha, t, L, rows=None):
    """Boolean mask of short(t.alpha, L) on the slice, in exact arithmetic."""
    S = sl.surface
    if rows is None:
        alpha, rows = alpha_rows(sl, alpha)
    if len(t) != len(rows):
        raise SliceError(f"{len(t)} weights for {len(rows)} entries")
    t = [_exact(x) for x in t]
    L = _exact(L)
    Q = C.self_weight(S, t, alpha)
    lhs = [sum(t[j] * int(rows[j][k]) for j in range(len(t))) for k in range(len(sl))]
    bound = L * L * Q
    return np.array([x * x <= bound for x in lhs], dtype=bool), Q


def short_set(sl, alpha, t, L):
    mask, Q = short_mask(sl, alpha, t, L)
    return {sl.vertices[k] for k in np.nonzero(mask)[0]}


def short_set_report(sl, alpha, t, L):
    alpha = C.as_tuple(sl.surface, alpha)
    mask, Q = short_mask(sl, alpha, t, L)
    rep = {"size": int(mask.sum()), "members": [sl.vertices[k].word for k in np.nonzero(mask)[0]],
           "norm_squared": str(Q)}
    if Q == 0:
        # with no self-weight the set is the curves missed by t.alpha
        comps = [c for e in alpha for c in e]
        near = True
        for k in np.nonzero(mask)[0]:
            v = sl.vertices[k]
            if v in comps:
                continue
            if not any(C.intersection_number(sl.surface, v, c) == 0 for c in comps):
                near = False
        rep["in_one_neighbourhood"] = near
    return rep


def projective_grid(n, resolution):
    out = []
    for v in itertools.product(range(resolution + 1), repeat=n):
        if any(v) and math.gcd(*v) == 1:
            out.append(v)
    return out


def short_hull_mask(sl, alpha, L, resolution):
    alpha, rows = alpha_rows(sl, alpha)
    mask = np.zeros(len(sl), dtype=bool)
    for t in projective_grid(len(alpha), resolution):
        m, _ = short_mask(sl, alpha, t, L, rows)
        mask |= m
    return mask


def short_hull(sl, alpha, L, resolution):
    mask = short_hull_mask(sl, alpha, L, resolution)
    return {sl.vertices[k] for k in np.nonzero(mask)[0]}


def pair_reduction_check(sl, alpha, L, resolution):
    """Inclusion short(t.alpha, L) in short(t'.alpha', nL/sqrt2) for the maximizing pair.

    The scaled bound is checked in exact arithmetic by squaring.
    """
    S = sl.surface
    alpha, rows = alpha_rows(sl, alpha)
    n = len(alpha)
    L = _exact(L)
    violations = 0
    checked = 0
    for t in projective_grid(n, resolution):
        t = [Fraction(x) for x in t]
        best, pair = None, None
        for j, k in itertools.combinations(range(n), 2):
            val = t[j] * t[k] * C.multicurve_intersection(S, alpha[j], alpha[k])
            if best is None or val > best:
                best, pair = val, (j, k)
        if pair is None:
            continue
        j, k = pair
        m, _ = short_mask(sl, alpha, t, L, rows)
        Q2 = best
        for v in np.nonzero(m)[0]:
            lhs = t[j] * int(rows[j][v]) + t[k] * int(rows[k][v])
            checked += 1
            # lhs <= (n L / sqrt 2) sqrt(Q2)  <=>  2 lhs^2 <= n^2 L^2 Q2
            if 2 * lhs * lhs > n * n * L * L * Q2:
                violations += 1
    return {"checked": checked, "violations": violations}


# -- balance and projections -------------------------------------------

@dataclass(frozen=True)
class BalanceVector:
    entries: tuple
    convention: str

    def to_json(self):
        return {"entries": [str(x) for x in self.entries], "convention": self.convention}


def balance_vector(S, alpha, beta, convention="auto"):
    alpha = C.as_tuple(S, alpha)
    beta = C.normalize(S, beta)
    iv = [C.multicurve_intersection(S, e, [beta]) for e in alpha]
    if convention == "auto":
        convention = "reciprocal" if all(iv) else "zero-one"
    if convention == "reciprocal":
        if not all(iv):
            raise SliceError("reciprocal convention needs every intersection positive")
        t = tuple(Fraction(1, x) for x in iv)
    elif convention == "zero-one":
        t = tuple(Fraction(1 if x == 0 else 0) for x in iv)
    else:
        raise SliceError(f"unknown convention {convention!r}")
    return BalanceVector(t, convention)


def _set_distance(D, X, Y):
    return min(D[x, y] for x in X for y in Y)


def hausdorff(D, X, Y):
    X, Y = list(X), list(Y)
    if not X or not Y:
        return math.inf
    dx = max(min(D[x, y] for y in Y) for x in X)
    dy = max(min(D[x, y] for x in X) for y in Y)
    return max(dx, dy)


def nearest_points(D, U, x):
    U = list(U)
    best = min(D[x, u] for u in U)
    return {u for u in U if D[x, u] == best}


def project_via_balance(sl, alpha, beta, L):
    S = sl.surface
    alpha = C.as_tuple(S, alpha)
    b = sl.vertex(beta)
    bv = balance_vector(S, alpha, beta)
    mask, _ = short_mask(sl, alpha, bv.entries, L)
    short_ids = [int(k) for k in np.nonzero(mask)[0]]
    if not short_ids:
        raise SliceError("short set is empty at this L")
    comps = [sl.vertex(c) for e in alpha for c in e]
    H, approx = hull_indices(sl, comps)
    proj = nearest_points(sl.D, H, b)
    D = sl.D
    return {
        "beta": sl.vertices[b].word,
        "balance": bv.to_json(),
        "branch": "hempel" if bv.convention == "zero-one" else "balanced",
        "short_size": len(short_ids),
        "projection": sorted(sl.vertices[k].word for k in proj),
        "distance_to_short": int(_set_distance(D, proj, short_ids)),
        "max_distance": int(max(D[p, s] for p in proj for s in short_ids)),
        "hausdorff": float(hausdorff(D, proj, short_ids)),
        "approximate": approx,
    }


def check_4ptint(sl, quad, r):
    S = sl.surface
    a = [sl.vertex(c) for c in quad]
    T = sl.table
    lhs = int(T[a[0], a[3]]) * int(T[a[1], a[2]])
    rhs = int(T[a[0], a[1]]) * int(T[a[2], a[3]])
    g12 = geodesic_vertices(sl, a[0], a[1])
    g34 = geodesic_vertices(sl, a[2], a[3])
    return {"hypothesis": lhs <= r * rhs, "r": r, "lhs": lhs, "rhs": rhs,
            "distance": int(_set_distance(sl.D, g12, g34))}


# -- empirical constants --------------------------------------------------

def diameter(D, ids):
    ids = list(ids)
    if len(ids) < 2:
        return 0
    sub = D[np.ix_(ids, ids)]
    return int(sub.max())


def short_diameter_sweep(sl, alpha, t=None, sweep=DEFAULT_L_SWEEP):
    alpha, rows = alpha_rows(sl, alpha)
    if t is None:
        t = [1] * len(alpha)
    out = []
    for L in sweep:
        m, _ = short_mask(sl, alpha, t, L, rows)
        ids = np.nonzero(m)[0]
        out.append({"L": L, "size": int(len(ids)), "diameter": diameter(sl.D, ids) if len(ids) else None})
    nonempty = [e for e in out if e["size"]]
    threshold = nonempty[0]["L"] if nonempty else None
    fit = max((e["diameter"] - 4 * math.log2(e["L"]) for e in nonempty), default=None)
    diams = [e["diameter"] for e in nonempty]
    monotone = all(x <= y for x, y in zip(diams, diams[1:]))
    nested = all(out[k]["size"] <= out[k + 1]["size"] for k in range(len(out) - 1))
    within = all(e["diameter"] <= 4 * math.log2(e["L"]) + fit + 1e-12 for e in nonempty) if nonempty else False
    return {"sweep": out, "threshold": threshold, "fitted_c": fit, "monotone": monotone,
            "nested": nested, "within_fit": within}


def hull_vs_short_hull(sl, alpha, L, resolution):
    comps = [sl.vertex(c) for e in C.as_tuple(sl.surface, alpha) for c in e]
    H, approx = hull_indices(sl, comps)
    SH = np.nonzero(short_hull_mask(sl, alpha, L, resolution))[0]
    return {"hull_size": len(H), "short_hull_size": int(len(SH)),
            "hausdorff": float(hausdorff(sl.D, H, SH)), "approximate": approx}
