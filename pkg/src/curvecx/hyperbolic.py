"""Hyperbolicity engine for finite metrics and unit graphs.

Two flavours of delta are kept apart: the four-point constant and the
thin-triangle constant.  The lemma suites use the thin flavour, measured on
the midpoint subdivision so that geodesic midpoints and circumcentres of
vertex sets are points of the metric.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels


class MetricError(ValueError):
    pass


class FiniteMetric:
    """Distance matrix plus, optionally, the unit graph it comes from.

    ``scale`` is the length of one graph edge (1/2 after subdivision).
    """

    def __init__(self, D, graph=None, labels=None, scale=1.0, original=None):
        D = np.asarray(D, dtype=np.float64)
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise MetricError("distance matrix must be square")
        self.D = D
        self.n = D.shape[0]
        self.graph = graph
        self.labels = list(labels) if labels is not None else [str(k) for k in range(self.n)]
        self.scale = scale
        # indices of the points that were vertices before subdivision
        self.original = original if original is not None else list(range(self.n))

    def __len__(self):
        return self.n

    def d(self, x, y):
        return self.D[x, y]

    def check(self, rng=None, samples=2000):
        D = self.D
        if not np.allclose(D, D.T):
            raise MetricError("distance matrix is not symmetric")
        if np.any(np.diag(D) != 0) or np.any(D[~np.eye(self.n, dtype=bool)] <= 0):
            raise MetricError("distinct points must have positive distance")
        rng = rng or np.random.default_rng(0)
        if self.n:
            trip = rng.integers(0, self.n, size=(samples, 3))
            x, y, z = trip.T
            if np.any(D[x, z] > D[x, y] + D[y, z] + 1e-9):
                raise MetricError("triangle inequality fails")
        return True

    def hops(self):
        if self.graph is None:
            raise MetricError("metric has no graph structure")
        return np.rint(self.D / self.scale).astype(np.int64)

    def subdivide(self):
        """Midpoint subdivision: a vertex for every edge, all edges halved."""
        if self.graph is None:
            raise MetricError("metric has no graph structure")
        indptr, indices = self.graph
        edges = [(u, int(v)) for u in range(self.n) for v in indices[indptr[u]:indptr[u + 1]] if u < v]
        H = self.hops()
        m = self.n + len(edges)
        D2 = np.zeros((m, m), dtype=np.int64)
        D2[: self.n, : self.n] = 2 * H
        for k, (u, v) in enumerate(edges):
            e = self.n + k
            to_vertex = 2 * np.minimum(H[u], H[v]) + 1
            D2[e, : self.n] = to_vertex
            D2[: self.n, e] = to_vertex
        for k, (u, v) in enumerate(edges):
            e = self.n + k
            for l, (a, b) in enumerate(edges):
                if l == k:
                    continue
                f = self.n + l
                D2[e, f] = 2 * min(H[u, a], H[u, b], H[v, a], H[v, b]) + 2
        nbrs = [[] for _ in range(m)]
        for k, (u, v) in enumerate(edges):
            e = self.n + k
            nbrs[e] += [u, v]
            nbrs[u].append(e)
            nbrs[v].append(e)
        ip = np.zeros(m + 1, dtype=np.int64)
        ip[1:] = np.cumsum([len(x) for x in nbrs])
        ix = np.array([y for x in nbrs for y in sorted(x)], dtype=np.int64)
        labels = self.labels + [f"{self.labels[u]}|{self.labels[v]}" for u, v in edges]
        out = FiniteMetric(D2 * (self.scale / 2), graph=(ip, ix), labels=labels,
                           scale=self.scale / 2, original=list(range(self.n)))
        out.edge_points = edges
        return out


def from_edges(n, edges, labels=None):
    nbrs = [set() for _ in range(n)]
    for u, v in edges:
        if u == v:
            continue
        nbrs[u].add(v)
        nbrs[v].add(u)
    ip = np.zeros(n + 1, dtype=np.int64)
    ip[1:] = np.cumsum([len(x) for x in nbrs])
    ix = np.array([y for x in nbrs for y in sorted(x)], dtype=np.int64)
    D = kernels.bfs_all(ip, ix, n)
    if n and (D < 0).any():
        raise MetricError("graph is disconnected")
    return FiniteMetric(D.astype(np.float64), graph=(ip, ix), labels=labels)


def from_matrix(D, labels=None):
    M = FiniteMetric(D, labels=labels)
    M.check()
    return M


def load_metric(data):
    if "matrix" in data:
        return from_matrix(data["matrix"], data.get("labels"))
    if "edges" in data:
        n = data.get("n") or (1 + max(max(e) for e in data["edges"]))
        return from_edges(n, [tuple(e) for e in data["edges"]], data.get("labels"))
    raise MetricError("metric JSON needs 'matrix' or 'edges'")


# -- products and deltas ------------------------------------------------

def gromov_product(M, x, y, z):
    """<x, y>_z."""
    D = M.D
    return 0.5 * (D[x, z] + D[y, z] - D[x, y])


@dataclass(frozen=True)
class TripodData:
    x: int
    y: int
    z: int
    at_x: float
    at_y: float
    at_z: float


def tripod(M, x, y, z):
    return TripodData(x, y, z, gromov_product(M, y, z, x), gromov_product(M, z, x, y),
                      gromov_product(M, x, y, z))


def four_point_delta(M, cap=2000, sample=None, seed=0):
    return four_point_report(M, cap, sample, seed)["delta"]


def four_point_report(M, cap=2000, sample=None, seed=0):
    n = M.n
    if n < 4:
        return {"delta": 0.0, "mode": "exhaustive", "quadruples": 0}
    if n <= cap and sample is None:
        iu, ju = np.triu_indices(n, 1)
        pd = M.D[iu, ju]
        # stable sort keeps ties in index order, so the scan is deterministic
        order = np.argsort(-pd, kind="stable")
        best = kernels.four_point_exhaustive(M.D, iu[order].astype(np.int64),
                                             ju[order].astype(np.int64), pd[order])
        return {"delta": best / 2.0, "mode": "exhaustive", "quadruples": int(math.comb(n, 4))}
    k = int(sample or 1_000_000)
    rng = np.random.default_rng(seed)
    quads = rng.integers(0, n, size=(k, 4)).astype(np.int64)
    best = kernels.four_point_sampled(M.D, quads)
    return {"delta": best / 2.0, "mode": "sampled", "quadruples": k, "seed": seed}


def thin_delta(M, cap=400, sample=None, seed=0):
    """Thin-triangle delta of a unit graph over triangles with vertex corners."""
    if M.graph is None:
        raise MetricError("thin delta needs a graph")
    H = M.hops()
    ip, ix = M.graph
    if M.n > cap and sample is None:
        raise MetricError(f"graph has {M.n} vertices, above the exhaustive cap {cap}; pass sample")
    if sample is not None and M.n > cap:
        rng = np.random.default_rng(seed)
        sources = np.sort(rng.choice(M.n, size=min(int(sample), M.n), replace=False)).astype(np.int64)
    else:
        sources = np.arange(M.n, dtype=np.int64)
    return float(kernels.thin_delta_graph(H, ip, ix, sources)) * M.scale


# -- projections, entry points, quasiconvexity --------------------------

def nearest_projection(M, U, x):
    U = list(U)
    if not U:
        raise MetricError("projection to an empty set")
    row = M.D[x, U]
    m = row.min()
    return {U[k] for k in np.nonzero(row == m)[0]}


def geodesic_points(M, x, y):
    D = M.D
    return set(np.nonzero(np.isclose(D[x] + D[:, y], D[x, y]))[0].tolist())


def entry_points(M, U, x, r):
    """q in U such that every geodesic from x to any u in U meets B_r(q)."""
    U = list(U)
    if not U:
        raise MetricError("entry points of an empty set")
    if M.graph is None:
        raise MetricError("entry points need a graph")
    D = M.D
    ip, ix = M.graph
    out = set()
    for q in U:
        blocked = D[q] <= r + 1e-12
        ok = True
        for u in U:
            if not _all_geodesics_blocked(D, ip, ix, x, u, blocked):
                ok = False
                break
        if ok:
            out.add(q)
    return out


def _all_geodesics_blocked(D, ip, ix, x, u, blocked):
    if blocked[x] or blocked[u]:
        return True
    # walk the geodesic DAG from x avoiding blocked points
    target = D[x, u]
    stack, seen = [x], {x}
    while stack:
        v = stack.pop()
        if v == u:
            return False
        for w in ix[ip[v]:ip[v + 1]]:
            w = int(w)
            if w in seen or blocked[w]:
                continue
            if math.isclose(D[x, w] + D[w, u], target) and D[x, w] > D[x, v]:
                seen.add(w)
                stack.append(w)
    return True


def quasiconvexity(M, U):
    """Largest distance from a point on a geodesic between points of U back to U."""
    U = sorted(set(U))
    if len(U) < 2:
        return 0.0
    dU = M.D[:, U].min(axis=1)
    q = 0.0
    for a, b in itertools.combinations(U, 2):
        pts = list(geodesic_points(M, a, b))
        q = max(q, float(dU[pts].max()))
    return q


# -- circumcentres and fixed sets ---------------------------------------

def circumcentre(M, U):
    U = list(U)
    if not U:
        raise MetricError("circumcentre of an empty set")
    ecc = M.D[:, U].max(axis=1)
    r = ecc.min()
    return float(r), set(np.nonzero(np.isclose(ecc, r))[0].tolist())


def diameter(M, U):
    U = list(U)
    if len(U) < 2:
        return 0.0
    return float(M.D[np.ix_(U, U)].max())


class GroupAction:
    """A finite group acting on the points of M, closed from generators."""

    def __init__(self, M, generators, check=True):
        gens = [np.asarray(g, dtype=np.int64) for g in generators]
        n = M.n
        ident = np.arange(n, dtype=np.int64)
        for g in gens:
            if sorted(g.tolist()) != list(range(n)):
                raise MetricError("generator is not a permutation of the points")
            if check and not np.allclose(M.D[np.ix_(g, g)], M.D):
                raise MetricError("generator is not an isometry")
        elems = {ident.tobytes(): ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for h in frontier:
                for g in gens:
                    c = g[h]
                    key = c.tobytes()
                    if key not in elems:
                        elems[key] = c
                        nxt.append(c)
            frontier = nxt
        self.M = M
        self.elements = np.array(sorted(elems.values(), key=lambda a: a.tolist()), dtype=np.int64)

    def __len__(self):
        return len(self.elements)

    def orbit(self, x):
        return sorted(set(self.elements[:, x].tolist()))

    def orbit_diameters(self):
        return kernels.orbit_diameters(self.M.D, self.elements)


def fix_set(M, action, R):
    diam = action.orbit_diameters()
    return set(np.nonzero(diam <= R + 1e-12)[0].tolist())


def hausdorff(M, X, Y):
    X, Y = list(X), list(Y)
    if not X or not Y:
        return math.inf
    sub = M.D[np.ix_(X, Y)]
    return float(max(sub.min(axis=1).max(), sub.min(axis=0).max()))


def set_distance(M, X, Y):
    return float(M.D[np.ix_(list(X), list(Y))].min())


# -- lemma suites ---------------------------------------------------------
# Each suite returns {"checked": n, "violations": n, ...}; tolerances guard
# against float noise only.

_EPS = 1e-9


def suite_boundproj(M, delta, subsets, points=None):
    points = range(M.n) if points is None else points
    checked = bad = 0
    for U in subsets:
        Q = quasiconvexity(M, U)
        for x in points:
            P = nearest_projection(M, U, x)
            checked += 1
            if diameter(M, P) > 2 * delta + 2 * Q + _EPS:
                bad += 1
    return {"checked": checked, "violations": bad}


def suite_middist(M, delta, pairs=None):
    ends = M.original
    pairs = pairs if pairs is not None else itertools.combinations(ends, 2)
    D = M.D
    checked = bad = 0
    for x, y in pairs:
        half = D[x, y] / 2
        mids = [m for m in geodesic_points(M, x, y) if math.isclose(D[x, m], half)]
        for m in mids:
            lhs = np.maximum(D[x], D[y])
            rhs = half + D[m]
            checked += M.n
            bad += int(np.sum(np.abs(lhs - rhs) > delta + _EPS))
    return {"checked": checked, "violations": bad}


def suite_circ2(M, delta, subsets):
    checked = bad = 0
    worst = 0.0
    D = M.D
    for U in subsets:
        r, C = circumcentre(M, U)
        dm = diameter(M, U)
        checked += 1
        if not (dm <= 2 * r + _EPS and 2 * r <= dm + 2 * delta + _EPS):
            bad += 1
        # circumcentres sit near midpoints of diametral pairs
        for x, y in itertools.combinations(U, 2):
            if not math.isclose(D[x, y], dm):
                continue
            mids = [m for m in geodesic_points(M, x, y) if math.isclose(D[x, m], dm / 2)]
            for c in C:
                for m in mids:
                    checked += 1
                    worst = max(worst, D[c, m])
                    if D[c, m] > 2 * delta + _EPS:
                        bad += 1
    return {"checked": checked, "violations": bad, "worst_centre_to_midpoint": float(worst)}


def suite_circ(M, delta, subsets):
    checked = bad = 0
    for U in subsets:
        r, C = circumcentre(M, U)
        checked += 1
        if diameter(M, C) > 2 * delta + _EPS:
            bad += 1
    return {"checked": checked, "violations": bad}


def suite_geodentry(M, delta, subsets, points=None):
    points = range(M.n) if points is None else points
    checked = bad = 0
    D = M.D
    for U in subsets:
        Q = quasiconvexity(M, U)
        for x in points:
            for p in nearest_projection(M, U, x):
                for u in U:
                    checked += 1
                    if abs(D[x, u] - (D[x, p] + D[p, u])) > 2 * delta + 2 * Q + _EPS:
                        bad += 1
    return {"checked": checked, "violations": bad}


def suite_geodentry2(M, delta, subsets, radii, points=None):
    points = range(M.n) if points is None else points
    checked = bad = 0
    for U in subsets:
        for x in points:
            P = nearest_projection(M, U, x)
            for r in radii:
                for q in entry_points(M, U, x, r):
                    checked += 1
                    if min(M.D[q, p] for p in P) > 2 * r + _EPS:
                        bad += 1
    return {"checked": checked, "violations": bad}


def suite_fixrd(M, delta, action, radii=None):
    """Fix(G, 2R) lies in the (R + delta)-neighbourhood of Fix(G, 2 delta), R >= delta.

    Points of Fix(G, 2R) are taken among original vertices so that their
    orbit circumcentres are points of the subdivided metric.
    """
    diam = action.orbit_diameters()
    F0 = np.nonzero(diam <= 2 * delta + _EPS)[0]
    checked = bad = 0
    nonempty = len(F0) > 0
    if radii is None:
        top = float(diam.max()) / 2
        steps = max(0, int((top - delta) / M.scale)) + 2
        radii = [delta + k * M.scale for k in range(steps)]
    for R in radii:
        if R < delta:
            continue
        for x in M.original:
            if diam[x] <= 2 * R + _EPS:
                checked += 1
                if not nonempty or M.D[x, F0].min() > R + delta + _EPS:
                    bad += 1
    return {"checked": checked, "violations": bad, "fix_2delta_nonempty": nonempty}


def random_subsets(points, rng, count, min_size=1, max_size=6):
    points = list(points)
    out = []
    for _ in range(count):
        k = int(rng.integers(min_size, min(max_size, len(points)) + 1))
        out.append(sorted(rng.choice(points, size=k, replace=False).tolist()))
    return out


def lemma_suites(M, action=None, seed=0, subsets=200):
    """All suites on the subdivision of the unit graph M at its measured thin delta."""
    G = M.subdivide()
    delta = thin_delta(G)
    rng = np.random.default_rng(seed)
    subs = random_subsets(G.original, rng, subsets)
    report = {"thin_delta": delta, "points": G.n}
    report["lemboundproj"] = suite_boundproj(G, delta, subs[:40])
    report["lemmiddist"] = suite_middist(G, delta)
    report["lemcirc"] = suite_circ(G, delta, subs)
    report["lemcirc2"] = suite_circ2(G, delta, subs)
    report["lemgeodentry"] = suite_geodentry(G, delta, subs[:40])
    report["lemgeodentry2"] = suite_geodentry2(G, delta, subs[:10], [0.5, 1.0, 2.0])
    if action is not None:
        lifted = []
        for g in action.elements:
            lifted.append(_lift_permutation(M, G, g))
        GA = GroupAction(G, lifted)
        report["lemfixrd"] = suite_fixrd(G, delta, GA)
    return report


def _lift_permutation(M, G, g):
    index = {(min(u, v), max(u, v)): M.n + k for k, (u, v) in enumerate(G.edge_points)}
    out = list(g) + [0] * len(G.edge_points)
    for k, (u, v) in enumerate(G.edge_points):
        a, b = int(g[u]), int(g[v])
        out[M.n + k] = index[(min(a, b), max(a, b))]
    return out
