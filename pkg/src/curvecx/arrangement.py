"""Minimal-position arrangements of multicurve tuples and the filling test."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import curves as C
from .geometry import Realization, _inv, _mul, apply


class ArrangementError(ValueError):
    pass


class _TooClose(ArithmeticError):
    pass


DISC = "disc"
PUNCTURED = "punctured_disc"
OTHER = "other"


@dataclass(frozen=True)
class Crossing:
    comp_a: int
    pos_a: int      # tree index on component a (shift of its word)
    comp_b: int
    pos_b: int
    sign: int       # +1 when the ends of a, b alternate as (a-, b-, a+, b+)


@dataclass(frozen=True)
class Segment:
    comp: int
    start: int      # crossing ids
    end: int
    word: tuple     # group element carried from start to end


@dataclass(frozen=True)
class Face:
    boundary: tuple  # half-edges (crossing, slot)
    word: str
    kind: str
    puncture: int | None = None


@dataclass
class Arrangement:
    surface: object
    entries: tuple                      # per entry, tuple of CurveClass
    components: tuple                   # flattened CurveClass list
    owner: tuple                        # entry index of each component
    crossings: list
    order: dict                         # component -> crossing ids along it
    segments: list
    faces: list = field(default_factory=list)
    connected: bool = False
    fills: bool = False
    precise: bool = False

    @property
    def euler(self):
        V = len(self.crossings)
        return V - 2 * V + len(self.faces)

    def crossings_between(self, e1, e2):
        return sum(1 for x in self.crossings
                   if {self.owner[x.comp_a], self.owner[x.comp_b]} == {e1, e2})

    def to_json(self):
        S = self.surface
        return {
            "entries": [[c.word for c in e] for e in self.entries],
            "crossings": [
                {"i": self.owner[x.comp_a], "curve_a": self.components[x.comp_a].word, "p": x.pos_a,
                 "j": self.owner[x.comp_b], "curve_b": self.components[x.comp_b].word, "q": x.pos_b,
                 "sign": x.sign}
                for x in self.crossings
            ],
            "segments": {self.components[c].word: [
                {"from": s.start, "to": s.end, "word": S.format(s.word)}
                for s in self.segments if s.comp == c] for c in range(len(self.components))},
            "faces": [{"word": f.word, "kind": f.kind, "puncture": f.puncture} for f in self.faces],
            "connected": self.connected,
            "fills": self.fills,
        }


def _element(word, n, p, q):
    """Group element read along word^inf from index p to q (inverse if q < p)."""
    if q >= p:
        return tuple(word[k % n] for k in range(p, q))
    return tuple(word[k % n] ^ 1 for k in range(p - 1, q - 1, -1))


def _locate(R, comps, pairs):
    """Positions along both geodesics of every crossing, plus the crossing angle."""
    nb = R.nb
    mats = [R.matrix(c.codes) for c in comps]
    fixes = [R.fixed_points(M) for M in mats]
    charts = [R.axis_chart(M) for M in mats]
    lengths = [R.translation_length(M) for M in mats]
    located = []
    for (a, i, b, j, sign) in pairs:
        u, v = comps[a].codes, comps[b].codes
        gu, gv = R.matrix(u[:i]), R.matrix(v[:j])
        out = []
        for (me, other, g_me, g_other, chk) in ((a, b, gu, gv, True), (b, a, gv, gu, False)):
            # the other axis seen from this curve's own lift
            h = _mul(g_me, _inv(g_other))
            r, at = fixes[other]
            T = charts[me]
            x1 = apply(T, apply(h, r))
            x2 = apply(T, apply(h, at))
            prod = x1 * x2
            if not prod < 0:
                if not nb.precise:
                    raise _TooClose()
                raise ArrangementError("geodesics fail to cross where linked pairs say they do")
            if chk and (1 if x1 > 0 else -1) != sign:
                if not nb.precise:
                    raise _TooClose()
                raise ArrangementError("crossing sign disagrees with the cyclic order at infinity")
            out.append(nb.log(-prod) / 2)
            if chk:
                # angle from a's direction (up the imaginary axis) to b's
                x1f, x2f = float(x1), float(x2)
                rad = abs(x2f - x1f) / 2
                sigma = 1.0 if x2f > x1f else -1.0
                cos_t = sigma * (x1f + x2f) / 2 / rad
                sin_t = -sigma * math.sqrt(max(-x1f * x2f, 0.0)) / rad
        located.append((out[0], out[1], cos_t, sin_t))
    return located, lengths


def _offsets(n):
    """Distinct generic normal offsets, one per component."""
    return [math.sqrt(k + 2) - 1.3 * k for k in range(n)]


def _orders(comps, pairs, located, lengths, nb, tol):
    """Per component: cyclically sorted list of (position, tree index, crossing id).

    Crossings at the same point (several geodesics through one point, which
    symmetric pieces of any hyperbolic metric force) are ordered as if each
    geodesic were pushed to a nearby equidistant curve by its own offset.
    """
    eps = _offsets(len(comps))
    per = {k: [] for k in range(len(comps))}
    for x, ((a, i, b, j, _), (sa, sb, cos_t, sin_t)) in enumerate(zip(pairs, located)):
        pa = (eps[a] * cos_t - eps[b]) / sin_t
        pb = (eps[b] * cos_t - eps[a]) / -sin_t
        for comp, idx, s, pert in ((a, i, sa, pa), (b, j, sb, pb)):
            ell = lengths[comp]
            n = len(comps[comp])
            k0 = int(nb.floor(s / ell))
            pos = s - k0 * ell
            if pos > ell * (1 - tol):
                pos -= ell
                k0 += 1
            per[comp].append((pos, idx - k0 * n, x, pert))
    for comp, lst in per.items():
        lst.sort(key=lambda e: e[0])
        ell = lengths[comp]
        groups, cur = [], []
        for e in lst:
            if cur and e[0] - cur[-1][0] >= tol * ell:
                groups.append(cur)
                cur = []
            cur.append(e)
        if cur:
            groups.append(cur)
        if not nb.precise and any(len(g) > 1 for g in groups):
            return None
        ordered = []
        for g in groups:
            g.sort(key=lambda e: e[3])
            if any(abs(e2[3] - e1[3]) < 1e-9 for e1, e2 in zip(g, g[1:])):
                return None
            ordered.extend(g)
        per[comp] = [e[:3] for e in ordered]
    return per


def build_arrangement(S, alpha, check=True):
    entries = C.as_tuple(S, alpha)
    comps, owner = [], []
    for e, comp in enumerate(entries):
        for c in comp:
            if c in comps:
                raise ArrangementError(f"component {c.word} is shared between entries")
            if check and C.classify(S, c) != C.SIMPLE:
                raise ArrangementError(f"component {c.word or '<trivial>'} is not simple and essential")
            comps.append(c)
            owner.append(e)
    for e, comp in enumerate(entries):
        for x in range(len(comp)):
            for y in range(x + 1, len(comp)):
                if C.intersection_number(S, comp[x], comp[y]):
                    raise ArrangementError(f"components of entry {e} intersect")

    pairs = []
    for a in range(len(comps)):
        for b in range(a + 1, len(comps)):
            if owner[a] == owner[b]:
                continue
            for (i, j, s) in C.linked_pairs(S, comps[a], comps[b]):
                pairs.append((a, i, b, j, s))

    per = None
    precise = False
    for precise in (False, True):
        R = Realization(S, precise=precise)
        try:
            located, lengths = _locate(R, comps, pairs)
        except _TooClose:
            continue
        per = _orders(comps, pairs, located, lengths, R.nb, 1e-9 if not precise else 1e-40)
        if per is not None:
            break
    if per is None:
        raise ArrangementError("could not separate crossing positions")

    crossings = [Crossing(a, i, b, j, s) for (a, i, b, j, s) in pairs]
    order = {c: [x for (_, _, x) in per[c]] for c in per}
    segments = []
    # half-edge slots: 0 = a forward, 1 = a backward, 2 = b forward, 3 = b backward
    half_pair = {}
    seg_of = {}
    for comp, lst in per.items():
        n = len(comps[comp])
        w = comps[comp].codes
        for t, (s, p, x) in enumerate(lst):
            s2, p2, y = lst[(t + 1) % len(lst)]
            if t + 1 == len(lst):
                p2 += n
            segments.append(Segment(comp, x, y, tuple(C.free_reduce(_element(w, n, p, p2)))))
            sid = len(segments) - 1
            out_slot = 0 if crossings[x].comp_a == comp else 2
            in_slot = 1 if crossings[y].comp_a == comp else 3
            half_pair[(x, out_slot)] = (y, in_slot)
            half_pair[(y, in_slot)] = (x, out_slot)
            seg_of[(x, out_slot)] = (sid, False)
            seg_of[(y, in_slot)] = (sid, True)

    arr = Arrangement(S, entries, tuple(comps), tuple(owner), crossings, order, segments, precise=precise)

    # connectivity of the 4-valent graph over all components
    used = {c for c in per if per[c]}
    arr.connected = bool(crossings) and len(used) == len(comps) and _connected(crossings)
    arr.faces = _faces(S, crossings, half_pair, seg_of, segments)
    arr.fills = _fills(S, arr)
    return arr


def _connected(crossings):
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x in crossings:
        parent[find(x.comp_a)] = find(x.comp_b)
    roots = {find(x.comp_a) for x in crossings}
    return len(roots) == 1


_ROT = {1: (0, 2, 1, 3), -1: (0, 3, 1, 2)}


def _next_ccw(crossings, h):
    x, slot = h
    rot = _ROT[crossings[x].sign]
    k = rot.index(slot)
    return (x, rot[(k + 1) % 4])


def _faces(S, crossings, half_pair, seg_of, segments):
    periph = {C.canonical(S.parse(w)): k for k, w in enumerate(S.peripheral_words)}
    faces, done = [], set()
    for x in range(len(crossings)):
        for slot in range(4):
            h = (x, slot)
            if h in done:
                continue
            cyc, word = [], []
            while h not in done:
                done.add(h)
                cyc.append(h)
                sid, backward = seg_of[h]
                w = segments[sid].word
                word.extend(C.inverse(w) if backward else w)
                h = _next_ccw(crossings, half_pair[h])
            red = C.cyclic_reduce(word)
            if not red:
                kind, punct = DISC, None
            else:
                root, k = C.primitive_root(red)
                punct = periph.get(C.canonical(root)) if k == 1 else None
                kind = PUNCTURED if punct is not None else OTHER
            faces.append(Face(tuple(cyc), S.format(C.canonical(red)), kind, punct))
    return faces


def _fills(S, arr):
    if not arr.connected:
        return False
    if any(f.kind == OTHER for f in arr.faces):
        return False
    punct = sorted(f.puncture for f in arr.faces if f.kind == PUNCTURED)
    if punct != list(range(S.punctures)):
        return False
    return arr.euler == 2 - 2 * S.genus


def fills(S, alpha):
    return build_arrangement(S, alpha).fills
