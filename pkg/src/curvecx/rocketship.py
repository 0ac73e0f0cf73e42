"""Rocketship space: a cone (nose) capped onto a cylinder (shaft) with n
rays (fins) leaving the top circle, rotated by Z/n about its axis.

Exact distances use developable charts: the nose unrolls to a sector of
angle sqrt(2)*pi and slant radius sqrt(2), the shaft to a strip.  The mesh
is a stencil graph whose edges are exact chart chords, so mesh distances
bound the exact ones from above and converge as the resolution grows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, minimize_scalar
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

SQRT2 = math.sqrt(2.0)
TWO_PI = 2.0 * math.pi
NOSE, SHAFT, FIN = "nose", "shaft", "fin"


class RocketError(ValueError):
    pass


@dataclass(frozen=True)
class RocketPoint:
    """nose: (rho, theta); shaft: (theta, t); fin: (k, s)."""
    region: str
    a: float
    b: float


def nose(rho, theta):
    return RocketPoint(NOSE, float(rho), float(theta) % TWO_PI)


def shaft(theta, t):
    return RocketPoint(SHAFT, float(theta) % TWO_PI, float(t))


def fin(k, s):
    return RocketPoint(FIN, int(k), float(s))


def _angdiff(a, b):
    d = np.abs(np.asarray(a) - np.asarray(b)) % TWO_PI
    return np.minimum(d, TWO_PI - d)


def _cone(r1, t1, r2, t2):
    phi = _angdiff(t1, t2) / SQRT2
    chord = np.sqrt(np.maximum(r1 * r1 + r2 * r2 - 2 * r1 * r2 * np.cos(phi), 0.0))
    return np.where(phi >= math.pi, r1 + r2, chord)


def _cyl(a1, t1, a2, t2):
    return np.hypot(_angdiff(a1, a2), np.asarray(t2) - np.asarray(t1))


def _min1d(f, lo, hi, grid=721):
    xs = np.linspace(lo, hi, grid)
    vals = f(xs)
    k = int(np.argmin(vals))
    step = xs[1] - xs[0]
    res = minimize_scalar(lambda x: float(f(np.array([x]))[0]), bounds=(xs[k] - step, xs[k] + step),
                          method="bounded", options={"xatol": 1e-12})
    return min(float(vals[k]), float(res.fun))


class RocketShip:
    def __init__(self, n, l):
        if int(n) != n or n < 2:
            raise RocketError("need at least two fins")
        if not l > 0:
            raise RocketError("length must be positive")
        self.n = int(n)
        self.l = float(l)
        self.cone_angle = SQRT2 * math.pi
        self.top = self.l + 1.0

    def __repr__(self):
        return f"RocketShip(n={self.n}, l={self.l})"

    def validate(self, p):
        if p.region == NOSE:
            ok = 0 <= p.a <= SQRT2 + 1e-12
        elif p.region == SHAFT:
            ok = 1 - 1e-12 <= p.b <= self.top + 1e-12
        elif p.region == FIN:
            ok = p.b >= 0 and 0 <= p.a < self.n
        else:
            ok = False
        if not ok:
            raise RocketError(f"invalid point {p}")
        return p

    def attachment(self, k):
        return shaft(TWO_PI * k / self.n, self.top)

    def rotate(self, p, g):
        g %= self.n
        if p.region == FIN:
            return fin((p.a + g) % self.n, p.b)
        turn = TWO_PI * g / self.n
        if p.region == NOSE:
            return nose(p.a, p.b + turn)
        return shaft(p.a + turn, p.b)

    def embed(self, p):
        """Cylindrical coordinates (r, theta, t) in R^3."""
        if p.region == NOSE:
            t = p.a / SQRT2
            return (t, p.b, t)
        if p.region == SHAFT:
            return (1.0, p.a, p.b)
        return (1.0, TWO_PI * p.a / self.n, self.top + p.b)

    def distance(self, p, q):
        self.validate(p)
        self.validate(q)
        if p.region == FIN or q.region == FIN:
            if p.region == FIN and q.region == FIN and p.a == q.a:
                return abs(p.b - q.b)
            if p.region == FIN:
                return p.b + self.distance(self.attachment(p.a), q)
            return q.b + self.distance(p, self.attachment(q.a))
        if p.region == NOSE and q.region == NOSE:
            # arcs of the junction circle are longer than cone chords, so
            # leaving the nose never helps
            return float(_cone(p.a, p.b, q.a, q.b))
        if p.region == SHAFT and q.region == NOSE:
            p, q = q, p
        if p.region == NOSE:
            f = lambda phi: _cone(p.a, p.b, SQRT2, phi) + _cyl(phi, 1.0, q.a, q.b)
            return _min1d(f, q.a - math.pi, q.a + math.pi)
        return self._shaft_shaft(p, q)

    def _shaft_shaft(self, p, q):
        direct = float(_cyl(p.a, p.b, q.a, q.b))
        h1, h2 = p.b - 1.0, q.b - 1.0
        # dipping into the nose costs at least h1 + h2 vertically
        if h1 + h2 >= direct:
            return direct

        def f(x):
            return (_cyl(p.a, p.b, x[0], 1.0) + _cone(SQRT2, x[0], SQRT2, x[1])
                    + _cyl(x[1], 1.0, q.a, q.b))

        xs = np.linspace(-math.pi, math.pi, 181)
        A = p.a + xs[:, None]
        B = q.a + xs[None, :]
        vals = f((A, B))
        k = np.unravel_index(int(np.argmin(vals)), vals.shape)
        x0 = np.array([A[k[0], 0], B[0, k[1]]])
        res = minimize(lambda x: float(f(x)), x0, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-13, "maxiter": 4000})
        return min(direct, float(vals[k]), float(res.fun))


# -- mesh -----------------------------------------------------------------

MIN_RESOLUTION = 12


@dataclass
class RocketMesh:
    ship: RocketShip
    resolution: int
    rings: int          # nose rings; ring `rings` is the junction circle
    rows: int           # shaft rows above the junction; row `rows` is the top
    fin_nodes: int
    fin_length: float
    graph: object       # scipy csr matrix
    points: list
    perms: np.ndarray   # one permutation per group element

    @property
    def size(self):
        return len(self.points)

    def ring_node(self, i, j):
        """Nose ring i (1..rings), angle index j."""
        M = self.resolution
        if i == 0:
            return 0
        if i == self.rings:
            return self.row_node(0, j)
        return 1 + (i - 1) * M + j % M

    def row_node(self, r, j):
        M = self.resolution
        return 1 + (self.rings - 1) * M + r * M + j % M

    def fin_node(self, k, m):
        """Node m (0 = attachment) on fin k."""
        if m == 0:
            return self.row_node(self.rows, k * self.resolution // self.ship.n)
        base = 1 + (self.rings - 1) * self.resolution + (self.rows + 1) * self.resolution
        return base + k * self.fin_nodes + (m - 1)

    def node(self, p):
        """Nearest mesh node to an exact point."""
        M = self.resolution
        if p.region == FIN:
            m = int(round(p.b / self.fin_length * self.fin_nodes))
            if m > self.fin_nodes:
                raise RocketError("fin point beyond the meshed length")
            return self.fin_node(int(p.a), m)
        j = int(round(p.b / TWO_PI * M)) if p.region == NOSE else int(round(p.a / TWO_PI * M))
        if p.region == NOSE:
            return self.ring_node(int(round(p.a / SQRT2 * self.rings)), j)
        return self.row_node(int(round((p.b - 1.0) / self.ship.l * self.rows)), j)

    def distances(self, sources, limit=np.inf, min_only=False):
        return dijkstra(self.graph, directed=False, indices=sources, limit=limit, min_only=min_only)

    def orbit_diameters(self, limit=np.inf):
        """diam(Gx) for every node, using the rotation symmetry of the mesh."""
        M, n = self.resolution, self.ship.n
        out = np.full(self.size, np.inf)
        out[0] = 0.0
        reps = [self.ring_node(i, 0) for i in range(1, self.rings)]
        reps += [self.row_node(r, 0) for r in range(self.rows + 1)]
        step = M // n
        for a in range(0, len(reps), 64):
            chunk = reps[a:a + 64]
            D = self.distances(chunk, limit=limit)
            for src, row in zip(chunk, D):
                ring_start = src  # angle index 0 of its ring/row
                diam = max(row[ring_start + k * step] for k in range(n))
                out[ring_start:ring_start + M] = diam
        A = self.distances([self.fin_node(k, 0) for k in range(n)])
        att = max(A[0, self.fin_node(k, 0)] for k in range(n))
        for k in range(n):
            for m in range(1, self.fin_nodes + 1):
                out[self.fin_node(k, m)] = 2 * m * self.fin_length / self.fin_nodes + att
        return out


def build_mesh(ship, resolution, stencil=3, rows=None, rings=None, fin_length=0.0):
    M = int(resolution)
    if M < MIN_RESOLUTION:
        raise RocketError(f"resolution below the floor {MIN_RESOLUTION}")
    n = ship.n
    if M % n:
        M += n - M % n      # the rotation action must permute mesh points
    h = TWO_PI / M
    # even counts keep the half-way ring and row on the mesh
    rings = rings or max(2, 2 * int(round(SQRT2 / h / 2)))
    rows = rows or max(2, 2 * int(round(ship.l / h / 2)))
    fin_nodes = max(1, int(math.ceil(fin_length / h))) if fin_length > 0 else 0
    nose_n = 1 + (rings - 1) * M
    shaft_n = (rows + 1) * M
    total = nose_n + shaft_n + n * fin_nodes

    mesh = RocketMesh(ship, M, rings, rows, fin_nodes, fin_length, None, [], None)
    pts = [nose(0.0, 0.0)]
    for i in range(1, rings):
        pts += [nose(SQRT2 * i / rings, h * j) for j in range(M)]
    for r in range(rows + 1):
        pts += [shaft(h * j, 1.0 + ship.l * r / rows) for j in range(M)]
    for k in range(n):
        pts += [fin(k, fin_length * m / fin_nodes) for m in range(1, fin_nodes + 1)]
    mesh.points = pts

    us, vs, ws = [], [], []
    J = np.arange(M)
    # nose: rings 1..rings (the last is the junction), plus the apex
    ring_ids = np.arange(1, rings + 1)
    node = np.array([[mesh.ring_node(i, j) for j in range(M)] for i in ring_ids])
    rho = SQRT2 * ring_ids / rings
    for di in range(0, stencil + 1):
        for dj in range(-stencil, stencil + 1):
            if di == 0 and dj <= 0:
                continue
            a = np.arange(0, rings - di)
            b = a + di
            A = node[a][:, J]
            B = node[b][:, (J + dj) % M]
            w = _cone(rho[a][:, None], h * J[None, :], rho[b][:, None], h * (J[None, :] + dj))
            us.append(A.ravel()); vs.append(B.ravel()); ws.append(np.broadcast_to(w, A.shape).ravel())
    for i in range(1, min(stencil, rings) + 1):
        us.append(np.zeros(M, dtype=np.int64)); vs.append(node[i - 1]); ws.append(np.full(M, rho[i - 1]))
    # shaft
    rnode = np.array([[mesh.row_node(r, j) for j in range(M)] for r in range(rows + 1)])
    tr = 1.0 + ship.l * np.arange(rows + 1) / rows
    for dr in range(0, stencil + 1):
        for dj in range(-stencil, stencil + 1):
            if dr == 0 and dj <= 0:
                continue
            a = np.arange(0, rows + 1 - dr)
            A = rnode[a]
            B = rnode[a + dr][:, (J + dj) % M]
            w = np.hypot(h * abs(dj), (tr[a + dr] - tr[a]))[:, None]
            us.append(A.ravel()); vs.append(B.ravel()); ws.append(np.broadcast_to(w, A.shape).ravel())
    # fins
    if fin_nodes:
        ds = fin_length / fin_nodes
        for k in range(n):
            chain = [mesh.fin_node(k, m) for m in range(fin_nodes + 1)]
            us.append(np.array(chain[:-1])); vs.append(np.array(chain[1:])); ws.append(np.full(fin_nodes, ds))
    u = np.concatenate(us).astype(np.int64)
    v = np.concatenate(vs).astype(np.int64)
    w = np.concatenate(ws).astype(np.float64)
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    # junction edges appear from both sides; keep the shorter copy
    key = lo * total + hi
    order = np.lexsort((w, key))
    key, lo, hi, w = key[order], lo[order], hi[order], w[order]
    first = np.ones(len(key), dtype=bool)
    first[1:] = key[1:] != key[:-1]
    G = coo_matrix((w[first], (lo[first], hi[first])), shape=(total, total)).tocsr()
    mesh.graph = G

    perms = np.empty((n, total), dtype=np.int64)
    step = M // n
    for g in range(n):
        p = np.empty(total, dtype=np.int64)
        p[0] = 0
        for i in range(1, rings):
            p[mesh.ring_node(i, 0) + J] = mesh.ring_node(i, 0) + (J + g * step) % M
        for r in range(rows + 1):
            p[mesh.row_node(r, 0) + J] = mesh.row_node(r, 0) + (J + g * step) % M
        for k in range(n):
            for m in range(1, fin_nodes + 1):
                p[mesh.fin_node(k, m)] = mesh.fin_node((k + g) % n, m)
        perms[g] = p
    mesh.perms = perms
    return mesh


def default_probes(ship, s=1.0):
    n, l = ship.n, ship.l
    probes = [nose(0.0, 0.0), nose(SQRT2 / 2, 0.0), nose(SQRT2, TWO_PI / n)]
    for k in range(n):
        probes.append(shaft(TWO_PI * k / n, 1.0 + l / 2))
    probes += [shaft(0.0, ship.top), shaft(TWO_PI / n, ship.top), fin(0, s), fin(n - 1, s)]
    return probes


def probe_distances(mesh, probes):
    ids = [mesh.node(p) for p in probes]
    D = mesh.distances(ids)
    return D[:, ids]


def convergence(ship, resolution, probes=None, stencil=3, s=1.0):
    """Relative change of probe distances when the mesh is refined twofold."""
    probes = probes or default_probes(ship, s)
    m1 = build_mesh(ship, resolution, stencil, fin_length=s)
    m2 = build_mesh(ship, 2 * m1.resolution, stencil, rows=2 * m1.rows, rings=2 * m1.rings, fin_length=s)
    d1 = probe_distances(m1, probes)
    d2 = probe_distances(m2, probes)
    mask = d1 > 0
    factor = float(np.max(np.abs(d1 - d2)[mask] / d1[mask]))
    exact = np.array([[ship.distance(p, q) for q in probes] for p in probes])
    mask = exact > 0
    return {"factor": factor, "resolution": m1.resolution, "refined": m2.resolution,
            "mesh_vs_exact": float(np.max((d1 - exact)[mask] / exact[mask])),
            "mesh_below_exact": float(np.max(exact - d1)),
            "edge_scale": TWO_PI / m1.resolution, "probes": len(probes)}


def ring_four_point(mesh):
    """Four-point delta of the top circle, a lower bound for the mesh's delta."""
    from . import hyperbolic as H
    M = mesh.resolution
    top = [mesh.row_node(mesh.rows, j) for j in range(M)]
    row = mesh.distances([top[0]])[0, top]
    D = row[(np.arange(M)[None, :] - np.arange(M)[:, None]) % M]
    return H.four_point_delta(H.FiniteMetric(D))


def _claimed_angles(n):
    return [((4 * k + 1) * math.pi / (2 * n)) % TWO_PI for k in range(2 * n)]


def example_report(ship, s=5.0, r_small=0.25, resolution=96, stencil=3):
    """Circumcentre of a fin orbit, Fix sets and their separation on the mesh."""
    mesh = build_mesh(ship, resolution, stencil, fin_length=s)
    n, M = ship.n, mesh.resolution
    tol = TWO_PI / M
    xs = [mesh.fin_node(k, mesh.fin_nodes) for k in range(n)]
    Dx = mesh.distances(xs)
    ecc = Dx.max(axis=0)
    rad = float(ecc.min())
    centres = np.nonzero(ecc <= rad + 1e-9)[0].tolist()
    cpts = [mesh.points[c] for c in centres]

    def on_top(p):
        return p.region == SHAFT and abs(p.b - ship.top) <= 1e-9

    def off_claim(p):
        return min(float(_angdiff(p.a, a)) for a in _claimed_angles(n))

    def off_mid(p):
        return min(float(_angdiff(p.a, (2 * k + 1) * math.pi / n)) for k in range(n))

    claimed_nodes = [mesh.node(shaft(a, ship.top)) for a in _claimed_angles(n)]
    claimed = any(on_top(p) and off_claim(p) <= tol + 1e-12 for p in cpts)
    midway = any(on_top(p) and off_mid(p) <= tol + 1e-12 for p in cpts)

    delta = ring_four_point(mesh)
    diam = mesh.orbit_diameters()
    fix_small = np.nonzero(diam <= 2 * r_small + 1e-12)[0]
    fix_delta = np.nonzero(diam <= 2 * delta + 1e-12)[0]
    to_small = mesh.distances(fix_small, min_only=True)
    to_delta = mesh.distances(fix_delta, min_only=True)
    d_c_fix = float(min(to_small[c] for c in centres))
    haus = float(max(to_small[fix_delta].max(), to_delta[fix_small].max()))
    small_in_nose = all(mesh.points[x].region == NOSE for x in fix_small)
    return {
        "n": n, "l": ship.l, "s": s, "resolution": M, "stencil": stencil, "mesh_points": mesh.size,
        "circumradius": rad,
        "centres": [{"region": p.region, "theta": p.a, "t": p.b} for p in cpts if p.region == SHAFT]
                   + [{"region": p.region, "a": p.a, "b": p.b} for p in cpts if p.region != SHAFT],
        "centre_matches_claimed_form": claimed,
        "centre_midway_between_fins": midway,
        "claimed_form_eccentricity": float(min(ecc[c] for c in claimed_nodes)),
        "angle_tolerance": tol,
        "delta_four_point_top_circle": delta,
        "r_small": r_small,
        "fix_small_size": int(len(fix_small)), "fix_small_in_nose": small_in_nose,
        "fix_delta_size": int(len(fix_delta)),
        "centre_to_fix_small": d_c_fix,
        "hausdorff_fix_delta_fix_small": haus,
    }
