"""The rectangle-tiled flat surface dual to a filling arrangement.

Each crossing of components from entries i and j becomes a t_i by t_j
rectangle; rectangles glue along the segments of the curves.  Lengths of
curves are only exposed through the L1 identity, with the Euclidean length
bracketed by [l1/sqrt 2, l1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import curves as C
from .arrangement import PUNCTURED, build_arrangement


class FlatError(ValueError):
    pass


def as_weights(t):
    """Exact rationals where possible; floats pass through."""
    out = []
    for x in t:
        if isinstance(x, (int, Fraction)):
            out.append(Fraction(x))
        elif isinstance(x, str):
            out.append(Fraction(x))
        else:
            out.append(float(x))
    return out


@dataclass(frozen=True)
class Rectangle:
    crossing: int
    entries: tuple      # (i, j)
    curves: tuple       # (component a, component b) words
    sides: tuple        # (t_i, t_j): width across a, width across b

    @property
    def area(self):
        return self.sides[0] * self.sides[1]


@dataclass(frozen=True)
class Gluing:
    component: str
    rect_from: int
    rect_to: int
    length: object      # width of the annulus the segment runs in


@dataclass(frozen=True)
class ConePoint:
    face: int
    corners: int        # cone angle is corners * pi / 2
    puncture: int | None


@dataclass(frozen=True)
class CoreAnnulus:
    core: C.CurveClass
    entry: int
    width: object
    rectangles: tuple
    length: object      # i(t.alpha, core)

    @property
    def area(self):
        return self.width * self.length


@dataclass
class FlatSurface:
    arrangement: object
    weights: tuple
    rectangles: list
    gluings: list
    cone_points: list

    @property
    def surface(self):
        return self.arrangement.surface

    def to_json(self):
        f = _jsonable
        return {
            "weights": [f(x) for x in self.weights],
            "area": f(area(self)),
            "rectangles": [{"crossing": r.crossing, "entries": list(r.entries),
                            "curves": list(r.curves), "sides": [f(s) for s in r.sides]}
                           for r in self.rectangles],
            "gluings": [{"component": g.component, "from": g.rect_from, "to": g.rect_to,
                         "length": f(g.length)} for g in self.gluings],
            "cone_points": [{"face": c.face, "angle_quarters": c.corners, "puncture": c.puncture}
                            for c in self.cone_points],
            "annuli": [{"core": a.core.word, "entry": a.entry, "width": f(a.width),
                        "length": f(a.length), "area": f(a.area), "rectangles": list(a.rectangles)}
                       for a in core_annuli(self)],
        }


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    return x


def build_flat(arrangement, t) -> FlatSurface:
    A = arrangement
    if not A.fills:
        raise FlatError("arrangement does not fill the surface")
    t = as_weights(t)
    if len(t) != len(A.entries):
        raise FlatError(f"{len(t)} weights for {len(A.entries)} entries")
    if any(not x > 0 for x in t):
        raise FlatError("all weights must be strictly positive")
    rects = []
    for k, x in enumerate(A.crossings):
        i, j = A.owner[x.comp_a], A.owner[x.comp_b]
        rects.append(Rectangle(k, (i, j), (A.components[x.comp_a].word, A.components[x.comp_b].word),
                               (t[i], t[j])))
    glue = []
    for s in A.segments:
        glue.append(Gluing(A.components[s.comp].word, s.start, s.end, t[A.owner[s.comp]]))
    cones = [ConePoint(k, len(f.boundary), f.puncture if f.kind == PUNCTURED else None)
             for k, f in enumerate(A.faces)]
    return FlatSurface(A, tuple(t), rects, glue, cones)


def flat_from_tuple(S, alpha, t) -> FlatSurface:
    return build_flat(build_arrangement(S, alpha), t)


def area(F: FlatSurface):
    return sum((r.area for r in F.rectangles), Fraction(0))


def core_annuli(F: FlatSurface):
    A = F.arrangement
    out = []
    for c, comp in enumerate(A.components):
        e = A.owner[c]
        ids = tuple(A.order[c])
        if not ids:
            raise FlatError(f"component {comp.word} crosses nothing")
        length = Fraction(0)
        for x in ids:
            X = A.crossings[x]
            other = X.comp_b if X.comp_a == c else X.comp_a
            length += F.weights[A.owner[other]]
        out.append(CoreAnnulus(comp, e, F.weights[e], ids, length))
    return out


def l1_length(S, alpha, t, gamma):
    g = C.normalize(S, gamma) if isinstance(gamma, (str, C.CurveClass)) else gamma
    if isinstance(g, C.CurveClass) and not g.codes:
        raise FlatError("trivial curve has no length")
    return C.weighted_intersection(S, as_weights(t), alpha, g)


def euclidean_length_bounds(S, alpha, t, gamma):
    l1 = l1_length(S, alpha, t, gamma)
    return (float(l1) / math.sqrt(2), l1)


def _le_sqrt2_times(lhs, rhs):
    """lhs <= sqrt(2) * rhs, exactly for rationals (both sides nonnegative)."""
    if isinstance(lhs, Fraction) and isinstance(rhs, Fraction):
        return lhs * lhs <= 2 * rhs * rhs
    return float(lhs) <= math.sqrt(2) * float(rhs) * (1 + 1e-12)


def annulus_inequalities(F: FlatSurface, annulus: CoreAnnulus, beta):
    S = F.surface
    total = area(F)
    alpha = F.arrangement.entries
    beta = C.normalize(S, beta)
    width = annulus.width
    i_core = C.intersection_number(S, annulus.core, beta)
    l1_beta = C.weighted_intersection(S, F.weights, alpha, beta)
    checks = []
    # the annulus length read off its rectangles must be i(t.alpha, core)
    lhs1 = width * C.weighted_intersection(S, F.weights, alpha, annulus.core)
    checks.append({"name": "annulus_area", "lhs": lhs1, "rhs": total, "relation": "<=",
                   "ok": lhs1 <= total, "identity": lhs1 == annulus.area})
    lhs2 = width * i_core
    checks.append({"name": "width_times_crossings", "lhs": lhs2, "rhs": l1_beta, "relation": "<=",
                   "ok": lhs2 <= l1_beta})
    rhs3 = total / width
    checks.append({"name": "length_vs_area_over_width", "lhs": annulus.length, "rhs": rhs3,
                   "relation": "<= sqrt2 *", "ok": _le_sqrt2_times(annulus.length, rhs3)})
    return {"core": annulus.core.word, "beta": beta.word, "checks": checks,
            "ok": all(c["ok"] for c in checks) and checks[0]["identity"]}
