"""A hyperbolic structure realizing the free group of a one-vertex surface.

The fundamental domain is an ideal 2r-gon in the upper half plane whose
k-th side is crossed by the letter ``rotation[k]``; the generator for
letter x carries the side of X onto the side of x.  Shears are fixed but
generic, so closed geodesics of distinct simple classes meet transversally
and in minimal position.  Crossing positions along each geodesic then give a
globally consistent order of crossings.  Several geodesics may still pass
through one point (every such structure has symmetries that force this);
the arrangement breaks those ties.

Arithmetic runs in float64 and is repeated in mpmath when two positions
come too close to separate.
"""
import math

import mpmath


class Numbers:
    def __init__(self, precise=False):
        self.precise = precise
        if precise:
            self.ctx = mpmath.mp.clone()
            self.ctx.dps = 60
            self.num = self.ctx.mpf
            self.sqrt = self.ctx.sqrt
            self.log = self.ctx.log
            self.acosh = self.ctx.acosh
            self.floor = self.ctx.floor
        else:
            self.num = float
            self.sqrt = math.sqrt
            self.log = math.log
            self.acosh = math.acosh
            self.floor = math.floor


def _mobius_to_standard(p1, p2, p3):
    # sends p1 -> 0, p2 -> inf, p3 -> 1
    return (p3 - p2, -p1 * (p3 - p2), p3 - p1, -p2 * (p3 - p1))


def _mul(A, B):
    a, b, c, d = A
    e, f, g, h = B
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _inv(A):
    a, b, c, d = A
    return (d, -b, -c, a)


def _normalize(A, nb):
    a, b, c, d = A
    det = a * d - b * c
    if det <= 0:
        raise ArithmeticError("side pairing reverses orientation")
    s = nb.sqrt(det)
    return (a / s, b / s, c / s, d / s)


def apply(A, z):
    a, b, c, d = A
    den = c * z + d
    if den == 0:
        return math.inf
    return (a * z + b) / den


class Realization:
    def __init__(self, S, precise=False):
        self.S = S
        self.nb = nb = Numbers(precise)
        N = S.nletters
        # fixed generic jitter; deterministic
        jitter = [0.0, 0.137, -0.091, 0.173, -0.058, 0.112, -0.149, 0.071,
                  -0.123, 0.044, 0.159, -0.077, 0.098, -0.166, 0.031, 0.121]
        verts = [nb.num(k) + nb.num(jitter[k % len(jitter)]) * nb.num(1 + k // len(jitter)) / 3
                 for k in range(N)]
        self.vertices = verts
        pos = S.position
        G = [None] * N
        for g in range(S.rank):
            x, X = 2 * g, 2 * g + 1
            kx, kX = pos[x], pos[X]
            frac = nb.num(0.37) + nb.num(0.05) * nb.num(g) / nb.num(S.rank)
            if kx < N - 1:
                w = verts[kx] + frac * (verts[kx + 1] - verts[kx])
            else:
                w = verts[N - 1] + nb.num(1) + frac
            src = (verts[kX % N], verts[(kX + 1) % N], verts[(kX + 2) % N])
            dst = (verts[(kx + 1) % N], verts[kx % N], w)
            A = _mobius_to_standard(*src)
            B = _mobius_to_standard(*dst)
            M = _normalize(_mul(_inv(B), A), nb)
            G[x] = M
            G[X] = _inv(M)
        self.G = G
        self._cache = {}

    def matrix(self, codes):
        codes = tuple(codes)
        M = self._cache.get(codes)
        if M is None:
            one = self.nb.num(1)
            zero = self.nb.num(0)
            M = (one, zero, zero, one)
            for c in codes:
                M = _mul(M, self.G[c])
            if len(self._cache) < 100000:
                self._cache[codes] = M
        return M

    def fixed_points(self, M):
        """(repelling, attracting) endpoints of a hyperbolic element."""
        nb = self.nb
        a, b, c, d = M
        tr = a + d
        disc = tr * tr - 4
        if disc <= 0:
            raise ArithmeticError("element is not hyperbolic")
        r = nb.sqrt(disc)
        if c == 0:
            raise ArithmeticError("fixed point at infinity")
        z1 = (a - d + r) / (2 * c)
        z2 = (a - d - r) / (2 * c)
        if abs(c * z1 + d) > 1:
            return z2, z1
        return z1, z2

    def translation_length(self, M):
        tr = abs(M[0] + M[3])
        return 2 * self.nb.acosh(tr / 2)

    def axis_chart(self, M):
        """Map sending the axis of M to the imaginary axis, moving upward."""
        r, a = self.fixed_points(M)
        one = self.nb.num(1)
        if a > r:
            return (-one, r, one, -a)
        return (one, -r, one, -a)
