"""Hot loops.  Every function here compiles under numba when enabled and
runs unchanged as plain Python otherwise (see ``_accel``).

Words are int64 arrays of letter codes; ``pos[c]`` is the slot of letter
``c`` in the cyclic order at the vertex and ``N`` the number of letters.
"""
import numpy as np

from ._accel import njit


# -- cyclic order at infinity -------------------------------------------

@njit
def _ray_letter(w, n, start, back, k):
    if back:
        return w[(start - 1 - k) % n] ^ 1
    return w[(start + k) % n]


@njit
def _prefix(w1, n1, s1, b1, w2, n2, s2, b2, bound):
    for k in range(bound):
        if _ray_letter(w1, n1, s1, b1, k) != _ray_letter(w2, n2, s2, b2, k):
            return k
    return -1


@njit
def _orient_letters(h1, h2, h3, pos, N):
    d2 = (pos[h2] - pos[h1]) % N
    d3 = (pos[h3] - pos[h1]) % N
    return 1 if d2 < d3 else -1


@njit
def orient3(w1, n1, s1, b1, w2, n2, s2, b2, w3, n3, s3, b3, pos, N):
    """Cyclic orientation of three periodic rays from the root; 0 if two coincide."""
    p12 = _prefix(w1, n1, s1, b1, w2, n2, s2, b2, n1 + n2)
    p13 = _prefix(w1, n1, s1, b1, w3, n3, s3, b3, n1 + n3)
    p23 = _prefix(w2, n2, s2, b2, w3, n3, s3, b3, n2 + n3)
    if p12 < 0 or p13 < 0 or p23 < 0:
        return 0
    if p12 == p13 and p13 == p23:
        k = p12
        return _orient_letters(_ray_letter(w1, n1, s1, b1, k),
                               _ray_letter(w2, n2, s2, b2, k),
                               _ray_letter(w3, n3, s3, b3, k), pos, N)
    if p12 > p13:
        m = p12
        back = _ray_letter(w1, n1, s1, b1, m - 1) ^ 1
        return _orient_letters(_ray_letter(w1, n1, s1, b1, m),
                               _ray_letter(w2, n2, s2, b2, m), back, pos, N)
    if p13 > p12:
        m = p13
        back = _ray_letter(w1, n1, s1, b1, m - 1) ^ 1
        return _orient_letters(_ray_letter(w1, n1, s1, b1, m), back,
                               _ray_letter(w3, n3, s3, b3, m), pos, N)
    m = p23
    back = _ray_letter(w2, n2, s2, b2, m - 1) ^ 1
    return _orient_letters(back, _ray_letter(w2, n2, s2, b2, m),
                           _ray_letter(w3, n3, s3, b3, m), pos, N)


@njit
def linked(u, nu, i, v, nv, j, pos, N):
    """Crossing test for the axes of shift ``i`` of u and shift ``j`` of v.

    Each crossing of the two axes is counted at the vertex where u enters
    the shared part; there u's backward ray leaves both rays of v.  Returns
    0 if not counted, else the sign +1/-1 (orientation of u-, v-, u+).
    """
    ub = u[(i - 1) % nu] ^ 1
    if ub == v[j % nv] or ub == (v[(j - 1) % nv] ^ 1):
        return 0
    o1 = orient3(u, nu, i, 1, u, nu, i, 0, v, nv, j, 0, pos, N)
    o2 = orient3(u, nu, i, 1, u, nu, i, 0, v, nv, j, 1, pos, N)
    if o1 == 0 or o2 == 0 or o1 == o2:
        return 0
    return orient3(u, nu, i, 1, v, nv, j, 1, u, nu, i, 0, pos, N)


@njit
def count_linked(u, v, pos, N):
    nu = u.shape[0]
    nv = v.shape[0]
    c = 0
    for i in range(nu):
        for j in range(nv):
            if linked(u, nu, i, v, nv, j, pos, N) != 0:
                c += 1
    return c


@njit
def count_self_linked(u, pos, N):
    """Ordered pairs of distinct shifts of a primitive word that link."""
    n = u.shape[0]
    c = 0
    for i in range(n):
        for j in range(n):
            if i != j and linked(u, n, i, u, n, j, pos, N) != 0:
                c += 1
    return c


@njit
def self_linked_batch(flat, offsets, pos, N):
    m = offsets.shape[0] - 1
    out = np.zeros(m, dtype=np.int64)
    for a in range(m):
        out[a] = count_self_linked(flat[offsets[a]:offsets[a + 1]], pos, N)
    return out


@njit
def intersection_table(flat, offsets, pos, N):
    """Pairwise linked-pair counts for distinct primitive words."""
    m = offsets.shape[0] - 1
    out = np.zeros((m, m), dtype=np.int64)
    for a in range(m):
        u = flat[offsets[a]:offsets[a + 1]]
        for b in range(a + 1, m):
            v = flat[offsets[b]:offsets[b + 1]]
            c = count_linked(u, v, pos, N)
            out[a, b] = c
            out[b, a] = c
    return out


@njit
def intersection_row(flat, offsets, u, pos, N):
    m = offsets.shape[0] - 1
    out = np.zeros(m, dtype=np.int64)
    for b in range(m):
        out[b] = count_linked(u, flat[offsets[b]:offsets[b + 1]], pos, N)
    return out


# -- graph metrics --------------------------------------------------------

@njit
def bfs_all(indptr, indices, n):
    """All-pairs hop distances of a CSR graph; -1 where unreachable."""
    D = np.full((n, n), -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        D[s, s] = 0
        head = 0
        tail = 1
        queue[0] = s
        while head < tail:
            x = queue[head]
            head += 1
            dx = D[s, x] + 1
            for e in range(indptr[x], indptr[x + 1]):
                y = indices[e]
                if D[s, y] < 0:
                    D[s, y] = dx
                    queue[tail] = y
                    tail += 1
    return D


@njit
def _edge_fibre(A, B, C, E, same, tmax):
    """Largest distance between points at equal time on two geodesic edges.

    Points sit at parameter tau in [0, tmax] on edges p->p' and q->q' with
    A = pq, B = p'q', C = pq', E = p'q.  The distance is
    min(A + 2 tau, B + 2 - 2 tau, C + 1, E + 1), a concave function.
    """
    if same:
        return 0.0
    t = (2.0 + B - A) / 4.0
    if t < 0.0:
        t = 0.0
    if t > tmax:
        t = tmax
    v = A + 2.0 * t
    w = B + 2.0 - 2.0 * t
    if w < v:
        v = w
    if C + 1.0 < v:
        v = C + 1.0
    if E + 1.0 < v:
        v = E + 1.0
    return v


@njit
def thin_delta_graph(D, indptr, indices, sources):
    """Thin-triangle delta over all triangles with corners at graph vertices.

    For a corner x and the other corners y, z, points at distance s from x
    on [x, y] and [x, z] share a tripod fibre for s up to <y, z>_x.  Every
    choice of geodesics is covered by taking all geodesic vertices (integer
    s) and all geodesic edges (s between integers).
    """
    n = D.shape[0]
    best = 0.0
    order = np.empty(n, dtype=np.int64)
    start = np.zeros(n + 2, dtype=np.int64)
    for xi in range(sources.shape[0]):
        x = sources[xi]
        # vertices sorted by distance from x; level k is order[start[k]:start[k+1]]
        maxd = 0
        for v in range(n):
            if D[x, v] > maxd:
                maxd = D[x, v]
        for k in range(maxd + 2):
            start[k] = 0
        for v in range(n):
            start[D[x, v] + 1] += 1
        for k in range(1, maxd + 2):
            start[k] += start[k - 1]
        fill = start.copy()
        for v in range(n):
            d = D[x, v]
            order[fill[d]] = v
            fill[d] += 1
        for y in range(n):
            for z in range(y + 1, n):
                twice = D[x, y] + D[x, z] - D[y, z]
                if twice <= 0:
                    continue
                dxy = D[x, y]
                dxz = D[x, z]
                k = 0
                while 2 * k <= twice:
                    for a in range(start[k], start[k + 1]):
                        p = order[a]
                        if D[p, y] != dxy - k:
                            continue
                        for b in range(start[k], start[k + 1]):
                            q = order[b]
                            if D[q, z] != dxz - k:
                                continue
                            if D[p, q] > best:
                                best = D[p, q]
                            if 2 * k < twice:
                                tmax = (twice - 2 * k) / 2.0
                                if tmax > 1.0:
                                    tmax = 1.0
                                for e in range(indptr[p], indptr[p + 1]):
                                    p2 = indices[e]
                                    if D[x, p2] != k + 1 or D[p2, y] != dxy - k - 1:
                                        continue
                                    for f in range(indptr[q], indptr[q + 1]):
                                        q2 = indices[f]
                                        if D[x, q2] != k + 1 or D[q2, z] != dxz - k - 1:
                                            continue
                                        v = _edge_fibre(D[p, q], D[p2, q2], D[p, q2], D[p2, q],
                                                        p == q and p2 == q2, tmax)
                                        if v > best:
                                            best = v
                    k += 1
    return best


@njit
def four_point_exhaustive(D, pi, pj, pd):
    """Exact four-point delta (doubled) over all quadruples.

    ``pi, pj, pd`` list the pairs with their distance, sorted by decreasing
    distance.  For a quadruple with largest sum xy + zw the doubled excess is
    at most 2 min(xy, zw) by the triangle inequality, so the scan stops once
    that bound no longer beats the running best.
    Returns twice the delta to keep integer metrics exact.
    """
    m = pi.shape[0]
    best = 0.0
    for a in range(m):
        if 2.0 * pd[a] <= best:
            break
        x = pi[a]
        y = pj[a]
        dxy = pd[a]
        for b in range(a, m):
            dzw = pd[b]
            if 2.0 * dzw <= best:
                break
            z = pi[b]
            w = pj[b]
            s2 = D[x, z] + D[y, w]
            s3 = D[x, w] + D[y, z]
            other = s2 if s2 > s3 else s3
            e = dxy + dzw - other
            if e > best:
                best = e
    return best


@njit
def four_point_sampled(D, quads):
    best = 0.0
    for q in range(quads.shape[0]):
        x = quads[q, 0]
        y = quads[q, 1]
        z = quads[q, 2]
        w = quads[q, 3]
        s1 = D[x, y] + D[z, w]
        s2 = D[x, z] + D[y, w]
        s3 = D[x, w] + D[y, z]
        # the largest of the three sums minus the middle one
        if s1 >= s2 and s1 >= s3:
            e = s1 - (s2 if s2 > s3 else s3)
        elif s2 >= s3:
            e = s2 - (s1 if s1 > s3 else s3)
        else:
            e = s3 - (s1 if s1 > s2 else s2)
        if e > best:
            best = e
    return best


@njit
def orbit_diameters(D, perms):
    """max over group elements g of d(x, gx) for every point x."""
    n = D.shape[0]
    out = np.zeros(n, dtype=D.dtype)
    for x in range(n):
        best = D[x, x]
        for g in range(perms.shape[0]):
            v = D[x, perms[g, x]]
            if v > best:
                best = v
        out[x] = best
    return out
