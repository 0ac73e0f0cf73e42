"""Independent oracles: straight lines on flat models of S_1_1 and S_0_4.

Neither oracle uses the linked-pair machinery; they read words off from
crossings of straight lines with a fixed arc system.
"""
import itertools
import math
from fractions import Fraction


def _crossings(z0, z1, families):
    """Crossings of the segment z0 -> z1 with line families.

    ``families`` maps a name to (normal, offsets_ok, arc_direction) where the
    lines are {z : normal . z = c} for integers c with offsets_ok(c), and
    arc_direction(point) gives the oriented arc direction at a crossing.
    """
    events = []
    dx, dy = z1[0] - z0[0], z1[1] - z0[1]
    for name, (normal, ok, arcdir) in families.items():
        a0 = normal[0] * z0[0] + normal[1] * z0[1]
        a1 = normal[0] * z1[0] + normal[1] * z1[1]
        if a0 == a1:
            continue
        lo, hi = sorted((a0, a1))
        for c in range(math.floor(lo), math.ceil(hi) + 1):
            if not ok(c) or not (lo < c < hi):
                continue
            t = (c - a0) / (a1 - a0)
            p = (z0[0] + t * dx, z0[1] + t * dy)
            ad = arcdir(p)
            sign = ad[0] * dy - ad[1] * dx
            events.append((t, name if sign > 0 else name.upper()))
    events.sort()
    return [e[1] for e in events]


# -- once-punctured square torus ------------------------------------------

def torus_word(p, q):
    """Word of the straight closed line of slope (p, q) on the square torus."""
    z0 = (Fraction(1, 7), Fraction(1, 11))
    ev = []
    if p:
        for m in range(-abs(p) - 2, abs(p) + 3):
            t = (m - z0[0]) / p
            if 0 < t <= 1:
                ev.append((t, "a" if p > 0 else "A"))
    if q:
        for m in range(-abs(q) - 2, abs(q) + 3):
            t = (m - z0[1]) / q
            if 0 < t <= 1:
                ev.append((t, "b" if q > 0 else "B"))
    ev.sort()
    return "".join(c for _, c in ev)


def torus_slopes(bound=5):
    out = []
    for p in range(-bound, bound + 1):
        for q in range(-bound, bound + 1):
            if math.gcd(p, q) == 1 and (p > 0 or (p == 0 and q > 0)):
                out.append((p, q))
    return out


# -- pillowcase: R^2 / <translations by 2Z^2, half-turns about Z^2> ----------

def _v_dir(pt):
    return (0, -1) if math.floor(pt[1]) % 2 == 0 else (0, 1)


def _h_dir(pt):
    return (1, 0) if math.floor(pt[0]) % 2 == 0 else (-1, 0)


def _d_dir(pt):
    return (1, -1) if math.floor(pt[0]) % 2 == 0 else (-1, 1)


PILLOW_ARCS = {
    "v": ((1, 0), lambda c: c % 2 == 0, _v_dir),
    "h": ((0, 1), lambda c: c % 2 == 1, _h_dir),
    "d": ((1, 1), lambda c: c % 2 == 1, _d_dir),
}


def pillow_path_word(points):
    word = []
    for z0, z1 in zip(points, points[1:]):
        word += _crossings(z0, z1, PILLOW_ARCS)
    return "".join(word)


def pillow_word(p, q):
    z0 = (Fraction(3, 13), Fraction(5, 17))
    return pillow_path_word([z0, (z0[0] + 2 * p, z0[1] + 2 * q)])


def pillow_puncture_words(steps=64, eps=Fraction(1, 10)):
    """Half-turn loops around the four cone points."""
    out = []
    for c in [(0, 0), (1, 0), (0, 1), (1, 1)]:
        pts = []
        for k in range(steps + 1):
            th = 0.3 + math.pi * k / steps
            pts.append((c[0] + float(eps) * math.cos(th), c[1] + float(eps) * math.sin(th)))
        out.append(pillow_path_word(pts))
    return out


def pillow_to_catalog(S):
    """A letter substitution carrying pillowcase words to the catalog S_0_4.

    Found by searching permutations and inversions of the three arc letters
    that send the four puncture loops onto the catalog's peripheral classes.
    """
    from curvecx.curves import normalize
    target = {normalize(S, w) for w in S.peripheral_words}
    loops = pillow_puncture_words()
    for perm in itertools.permutations("abc"):
        for flips in itertools.product((False, True), repeat=3):
            sub = {}
            for src, dst, f in zip("vhd", perm, flips):
                sub[src] = dst.upper() if f else dst
                sub[src.upper()] = dst if f else dst.upper()
            mapped = {normalize(S, "".join(sub[ch] for ch in w)) for w in loops}
            if mapped == target:
                return sub
    raise AssertionError("no substitution matches the peripheral structure")


# -- metric graphs: brute-force delta ------------------------------------

def all_pairs_hops(n, edges):
    adj = {v: set() for v in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    D = [[None] * n for _ in range(n)]
    for s in range(n):
        D[s][s] = 0
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if D[s][w] is None:
                        D[s][w] = D[s][u] + 1
                        nxt.append(w)
            frontier = nxt
    return D, adj


def vertex_geodesics(D, adj, x, y):
    if x == y:
        return [[x]]
    out = []
    for w in adj[x]:
        if D[w][y] == D[x][y] - 1:
            out += [[x] + p for p in vertex_geodesics(D, adj, w, y)]
    return out


def _point(path, s):
    k = int(math.floor(s))
    if k >= len(path) - 1:
        return (path[-1], path[-1], Fraction(0))
    return (path[k], path[k + 1], s - k)


def _point_distance(D, P, Q):
    (u1, v1, f1), (u2, v2, f2) = P, Q
    best = min(f1 + D[u1][u2] + f2, f1 + D[u1][v2] + (1 - f2),
               (1 - f1) + D[v1][u2] + f2, (1 - f1) + D[v1][v2] + (1 - f2))
    if {u1, v1} == {u2, v2}:
        g2 = f2 if (u1, v1) == (u2, v2) else 1 - f2
        best = min(best, abs(f1 - g2))
    return best


def brute_thin_delta(n, edges, step=Fraction(1, 8)):
    """Max over vertex-cornered triangles and all geodesic choices of the
    distance between points at equal distance from a shared corner, up to
    the tripod branch point."""
    D, adj = all_pairs_hops(n, edges)
    best = Fraction(0)
    geo = {}
    for x in range(n):
        for y in range(n):
            geo[x, y] = vertex_geodesics(D, adj, x, y)
    for x in range(n):
        for y in range(n):
            for z in range(y + 1, n):
                reach = Fraction(D[x][y] + D[x][z] - D[y][z], 2)
                s = Fraction(0)
                while s <= reach:
                    for p in geo[x, y]:
                        for q in geo[x, z]:
                            best = max(best, _point_distance(D, _point(p, s), _point(q, s)))
                    s += step
    return best


def brute_four_point(n, edges):
    D, _ = all_pairs_hops(n, edges)
    best = Fraction(0)
    for a, b, c, d in itertools.combinations(range(n), 4):
        s = sorted([D[a][b] + D[c][d], D[a][c] + D[b][d], D[a][d] + D[b][c]])
        best = max(best, Fraction(s[2] - s[1], 2))
    return best
