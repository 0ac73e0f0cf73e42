"""Finite covers from permutation representations.

A cover of degree d is given by one permutation of the sheets {0..d-1} per
base generator.  Crossing the dart of generator g forward moves a path from
sheet i to sheet rho[g][i]; a word acts left to right.  The cover ribbon
graph has darts (base dart, sheet).  Because every spanning-tree path
carries no letter, the cover word of a closed dart path is just the list of
its non-tree darts; no basepoint conjugation is needed.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import curves as C
from . import curvegraph as CG
from . import hyperbolic as H
from .surface import build_surface, load_surface


class CoverError(ValueError):
    pass


DEFAULT_GROUP_CAP = math.factorial(10)


# -- permutations -----------------------------------------------------------

def compose(p, q):
    """First p, then q."""
    return tuple(q[x] for x in p)


def invert(p):
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def identity(d):
    return tuple(range(d))


def cycles(p):
    seen, out = set(), []
    for i in range(len(p)):
        if i in seen:
            continue
        cyc, x = [], i
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = p[x]
        out.append(tuple(cyc))
    return out


def generated_group(gens, d, cap=DEFAULT_GROUP_CAP):
    ident = identity(d)
    elems = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                c = compose(h, g)
                if c not in elems:
                    elems.add(c)
                    if len(elems) > cap:
                        raise CoverError(f"image group exceeds the cap {cap}")
                    nxt.append(c)
        frontier = nxt
    return sorted(elems)


# -- specs ------------------------------------------------------------------

@dataclass(frozen=True)
class CoverSpec:
    base: object
    degree: int
    rho: tuple          # rho[k] is the sheet permutation of generator k

    def __post_init__(self):
        d = self.degree
        if d < 1:
            raise CoverError("degree must be positive")
        if len(self.rho) != self.base.rank:
            raise CoverError(f"need {self.base.rank} permutations, got {len(self.rho)}")
        for p in self.rho:
            if sorted(p) != list(range(d)):
                raise CoverError(f"{list(p)} is not a permutation of {d} sheets")

    def letter_perm(self, code):
        p = self.rho[code >> 1]
        return invert(p) if code & 1 else p

    def monodromy(self, codes):
        p = identity(self.degree)
        for c in codes:
            p = compose(p, self.letter_perm(c))
        return p

    def transitive(self):
        seen, stack = {0}, [0]
        while stack:
            i = stack.pop()
            for p in self.rho:
                for j in (p[i], invert(p)[i]):
                    if j not in seen:
                        seen.add(j)
                        stack.append(j)
        return len(seen) == self.degree

    def image(self, cap=DEFAULT_GROUP_CAP):
        return generated_group(self.rho, self.degree, cap)

    def to_json(self):
        S = self.base
        return {"base": S.name or S.to_json(), "degree": self.degree,
                "rho": {g: [x + 1 for x in p] for g, p in zip(S.generators, self.rho)}}


def make_spec(base, rho, degree=None):
    """rho: mapping generator name -> one-line permutation on 1..d (or a list)."""
    S = load_surface(base)
    if isinstance(rho, dict):
        unknown = set(rho) - set(S.generators)
        if unknown:
            raise CoverError(f"unknown generators {sorted(unknown)}")
        if not rho and degree is None:
            raise CoverError("empty rho needs an explicit degree")
        d = degree or len(next(iter(rho.values())))
        # generators left out act trivially
        perms = [tuple(x - 1 for x in rho[g]) if g in rho else identity(d) for g in S.generators]
    else:
        perms = [tuple(p) for p in rho]
        d = degree or len(perms[0])
    return CoverSpec(S, d, tuple(perms))


def load_spec(path_or_dict):
    data = path_or_dict
    if not isinstance(data, dict):
        with open(data) as fh:
            data = json.load(fh)
    return make_spec(data["base"], data["rho"], data.get("degree"))


def random_spec(rng, base, degree):
    S = load_surface(base)
    while True:
        perms = tuple(tuple(int(x) for x in rng.permutation(degree)) for _ in range(S.rank))
        spec = CoverSpec(S, degree, perms)
        if spec.transitive():
            return spec


def is_regular(spec):
    return len(spec.image()) == spec.degree


def regularize(spec, cap=DEFAULT_GROUP_CAP):
    """Right-regular representation of the image: sheet h moves to h * rho(g)."""
    elems = spec.image(cap)
    index = {h: k for k, h in enumerate(elems)}      # identity sorts first
    rho = tuple(tuple(index[compose(h, g)] for h in elems) for g in spec.rho)
    return CoverSpec(spec.base, len(elems), rho), elems


# -- cover surfaces -----------------------------------------------------

@dataclass
class Cover:
    spec: CoverSpec
    total: object
    dart_id: dict           # (base dart, sheet) -> cover dart id
    dart_of: dict           # cover dart id -> (base dart, sheet)
    _deck: list | None = field(default=None, repr=False)

    @property
    def base(self):
        return self.spec.base

    @property
    def degree(self):
        return self.spec.degree

    def dart_perm(self, d):
        code = self.base.dart_letter[d]
        return identity(self.degree) if code < 0 else self.spec.letter_perm(code)

    def _base_path(self, code):
        S = self.base
        path = S.generator_paths[code >> 1]
        if code & 1:
            path = tuple(S.pairing[x] for x in reversed(path))
        return path

    def word_up(self, codes, sheet=0):
        """Lift a base word starting on ``sheet``: (cover codes, final sheet)."""
        out, i = [], sheet
        for c in codes:
            for d in self._base_path(c):
                x = self.dart_id[(d, i)]
                code = self.total.dart_letter[x]
                if code >= 0:
                    out.append(code)
                i = self.dart_perm(d)[i]
        return tuple(C.free_reduce(out)), i

    def _cover_path(self, code):
        T = self.total
        path = T.generator_paths[code >> 1]
        if code & 1:
            path = tuple(T.pairing[x] for x in reversed(path))
        return path

    def word_down(self, codes):
        out = []
        for c in codes:
            for x in self._cover_path(c):
                d, _ = self.dart_of[x]
                code = self.base.dart_letter[d]
                if code >= 0:
                    out.append(code)
        return tuple(C.free_reduce(out))

    def apply_sheet_map(self, tau, codes):
        """Image of a cover word under the dart map (d, i) -> (d, tau(i))."""
        out = []
        for c in codes:
            for x in self._cover_path(c):
                d, i = self.dart_of[x]
                code = self.total.dart_letter[self.dart_id[(d, tau[i])]]
                if code >= 0:
                    out.append(code)
        return C.make_class(self.total, out)

    def deck_group(self):
        if self._deck is None:
            self._deck = deck_transformations(self.spec)
        return self._deck

    def deck_image(self, g, alpha):
        alpha = C.normalize(self.total, alpha)
        return self.apply_sheet_map(g, alpha.codes)

    def orbit(self, alpha):
        alpha = C.normalize(self.total, alpha)
        out = []
        for g in self.deck_group():
            b = self.deck_image(g, alpha)
            if b not in out:
                out.append(b)
        return sorted(out)


def build_cover(spec) -> Cover:
    if not spec.transitive():
        raise CoverError("rho is not transitive; the cover would be disconnected")
    S = spec.base
    d = spec.degree
    dart_id, dart_of = {}, {}
    darts = []
    for i in range(d):
        for x in S.darts:
            name = f"{x}@{i}"
            dart_id[(x, i)] = name
            dart_of[name] = (x, i)
            darts.append(name)
    pairing = {}
    for i in range(d):
        for x in S.darts:
            j = identity(d)[i] if S.dart_letter[x] < 0 else spec.letter_perm(S.dart_letter[x])[i]
            pairing[dart_id[(x, i)]] = dart_id[(S.pairing[x], j)]
    vcycles = [[dart_id[(x, i)] for x in cyc] for i in range(d) for cyc in S.vertex_cycles]
    name = f"{S.name or 'base'}~{d}"
    T = build_surface(darts, vcycles, pairing, name=name)
    return Cover(spec, T, dart_id, dart_of)


def deck_transformations(spec):
    """Sheet permutations commuting with every rho(g): the centralizer of the image."""
    d = spec.degree
    gens = list(spec.rho) + [invert(p) for p in spec.rho]
    out = []
    for j in range(d):
        tau = [-1] * d
        tau[0] = j
        stack, ok = [0], True
        while stack and ok:
            i = stack.pop()
            for p in gens:
                a, b = p[i], p[tau[i]]
                if tau[a] < 0:
                    tau[a] = b
                    stack.append(a)
                elif tau[a] != b:
                    ok = False
                    break
        if ok and sorted(tau) == list(range(d)):
            out.append(tuple(tau))
    return sorted(out)


def euler_check(cover):
    return cover.total.euler_characteristic == cover.degree * cover.base.euler_characteristic


# -- lifts and pushforwards ------------------------------------------------

@dataclass(frozen=True)
class LiftComponent:
    curve: C.CurveClass
    sheet: int          # least sheet of the cycle
    degree: int         # cycle length: the component covers its image this many times


def _lift_components(cover, base_codes):
    perm = cover.spec.monodromy(base_codes)
    comps = []
    for cyc in cycles(perm):
        i, k = min(cyc), len(cyc)
        codes, end = cover.word_up(tuple(base_codes) * k, i)
        if end != i:  # pragma: no cover - cycle length guarantees closure
            raise CoverError("lifted path failed to close")
        comps.append(LiftComponent(C.make_class(cover.total, codes), i, k))
    return comps


def lift(cover, a, check=True):
    S = cover.base
    a = C.normalize(S, a)
    if not C.is_simple_essential(S, a):
        raise C.CurveError(f"{a.word} is not simple essential on the base")
    comps = _lift_components(cover, a.codes)
    if check:
        T = cover.total
        for x, y in itertools.combinations(comps, 2):
            if x.curve != y.curve and C.intersection_number(T, x.curve, y.curve) != 0:
                raise CoverError("lift components intersect")  # pragma: no cover
        for x in comps:
            if not C.is_simple_essential(T, x.curve):
                raise CoverError(f"lift component {x.curve.word} is not simple essential")  # pragma: no cover
    return comps


def lift_multicurve(cover, a):
    out = []
    for comp in lift(cover, a):
        if comp.curve not in out:
            out.append(comp.curve)
    return out


@dataclass(frozen=True)
class PushForward:
    curve: C.CurveClass     # the image class P(alpha)
    root: C.CurveClass      # its primitive root, the image as a set
    multiplicity: int


def push_forward(cover, alpha):
    T, S = cover.total, cover.base
    alpha = C.normalize(T, alpha)
    if not alpha.codes:
        raise C.CurveError("trivial curve")
    img = C.make_class(S, cover.word_down(alpha.codes))
    if not img.codes:
        raise C.CurveError(f"{alpha.word} pushes forward to the trivial class")
    root, k = C.primitive_root(img.codes)
    return PushForward(img, C.make_class(S, root), k)


def lifting_identity(cover, b, image_root):
    """i(P^-1(b), lifts of r) against deg * i(b, r)."""
    T, S = cover.total, cover.base
    b = C.normalize(S, b)
    r = C.normalize(S, image_root)
    lb = [x.curve for x in _lift_components(cover, b.codes)]
    lr = [x.curve for x in _lift_components(cover, r.codes)]
    lhs = sum(C.intersection_number(T, x, y) for x in lb for y in lr)
    rhs = cover.degree * C.intersection_number(S, b, r)
    return {"b": b.word, "image": r.word, "lhs": lhs, "rhs": rhs, "ok": lhs == rhs}


def pi_projection(cover, base_slice, alpha, samples=8):
    if len(base_slice) == 0:
        raise CoverError("base slice is empty")
    P = push_forward(cover, alpha)
    row = base_slice.row(P.root)
    m = int(row.min())
    ties = [base_slice.vertices[k] for k in np.nonzero(row == m)[0]]
    b = min(ties)
    comps = lift_multicurve(cover, b)
    checks = []
    # identity check on the argmin and a deterministic spread of other vertices
    picks = [base_slice.index[b]] + list(range(0, len(base_slice), max(1, len(base_slice) // samples)))[:samples]
    for k in dict.fromkeys(picks):
        checks.append(lifting_identity(cover, base_slice.vertices[k], P.root))
    return {
        "alpha": C.normalize(cover.total, alpha).word,
        "image": P.curve.word, "image_root": P.root.word, "multiplicity": P.multiplicity,
        "b": b.word, "min_intersection": m, "ties": len(ties),
        "pi": [c.word for c in comps],
        "identity_checks": checks,
        "identity_ok": all(c["ok"] for c in checks),
        "regular": is_regular(cover.spec),
    }


# -- experiments ---------------------------------------------------------

def image_vertices(cover, base_slice, cover_slice):
    """Slice indices of lift components of base-slice vertices; misses counted."""
    ids, missing = set(), 0
    for b in base_slice.vertices:
        for c in lift_multicurve(cover, b):
            if c in cover_slice.index:
                ids.add(cover_slice.index[c])
            else:
                missing += 1
    return ids, missing


def _multicurve_ids(cover_slice, comps):
    ids = [cover_slice.index[c] for c in comps if c in cover_slice.index]
    return ids, len(ids) < len(comps)


def _exact_pairs(sl, X, Y):
    return all(CG.distance_index(sl, x, y).exact for x in X for y in Y)


def experiment_coverproj(cover, base_slice, cover_slice, alpha):
    T = cover.total
    alpha = C.normalize(T, alpha)
    a = cover_slice.vertex(alpha)
    D = cover_slice.D
    if (D < 0).any():
        raise CG.SliceError("cover slice is disconnected")
    I, missing = image_vertices(cover, base_slice, cover_slice)
    pi = pi_projection(cover, base_slice, alpha)
    pids, truncated = _multicurve_ids(cover_slice, [C.normalize(T, w) for w in pi["pi"]])
    if not pids:
        raise CG.SliceError("no component of pi(alpha) lies in the cover slice")
    proj = CG.nearest_points(D, I, a)
    dist = max(min(int(D[p, q]) for q in pids) for p in proj)
    # intermediate: projections of image curves onto the hull of the orbit of alpha
    orbit_ids, orbit_trunc = _multicurve_ids(cover_slice, cover.orbit(alpha))
    Hull, approx = CG.hull_indices(cover_slice, orbit_ids)
    inter = 0
    for g in sorted(I):
        beta = CG.nearest_points(D, Hull, g)
        inter = max(inter, max(min(int(D[x, q]) for q in pids) for x in beta))
    return {
        "alpha": alpha.word, "pi": pi["pi"], "b": pi["b"],
        "image_size": len(I), "image_missing": missing,
        "projection": sorted(cover_slice.vertices[p].word for p in proj),
        "distance": dist, "in_image": a in I,
        "exact": _exact_pairs(cover_slice, proj, pids),
        "hull_projection_to_pi": inter, "hull_approximate": approx,
        "truncated": truncated or orbit_trunc,
    }


def experiment_covercirc(cover, cover_slice, base_slice, alpha, sweep=CG.DEFAULT_L_SWEEP):
    if not is_regular(cover.spec):
        raise CoverError("circumcentre experiment needs a regular cover")
    T = cover.total
    alpha = C.normalize(T, alpha)
    orbit = cover.orbit(alpha)
    oids, trunc = _multicurve_ids(cover_slice, orbit)
    if trunc:
        raise CG.SliceError("orbit leaves the cover slice")
    M = H.FiniteMetric(cover_slice.D.astype(np.float64))
    rad, centres = H.circumcentre(M, oids)
    pi = pi_projection(cover, base_slice, alpha)
    comps = [C.normalize(T, w) for w in pi["pi"]]
    pids, ptrunc = _multicurve_ids(cover_slice, comps)
    D = cover_slice.D
    dist = max(min(int(D[c, q]) for q in pids) for c in centres) if pids else None
    G = len(cover.deck_group())
    # all-ones balances a G-invariant multicurve against the orbit
    per_entry = [sum(C.intersection_number(T, c, o) for c in comps) for o in orbit]
    balanced = len(set(per_entry)) == 1
    norm2 = C.self_weight(T, [1] * len(orbit), [[o] for o in orbit])
    lhs = sum(per_entry)
    member = []
    for L in sweep:
        bound2 = (L * G) ** 2 * norm2
        member.append({"L": L, "member": lhs * lhs <= bound2})
    return {
        "alpha": alpha.word, "orbit": [o.word for o in orbit], "deck_order": G,
        "radius": rad, "centres": sorted(cover_slice.vertices[c].word for c in centres),
        "pi": pi["pi"], "distance": dist,
        "exact": _exact_pairs(cover_slice, centres, pids) if pids else False,
        "ones_balanced": balanced, "orbit_intersections": per_entry,
        "short_membership": member,
        "fitted_L0": (lhs / (G * math.sqrt(norm2))) if norm2 else None,
        "truncated": ptrunc,
    }


def experiment_qi(cover, base_slice, cover_slice, pairs=None):
    D0, D1 = base_slice.D, cover_slice.D
    if (D0 < 0).any() or (D1 < 0).any():
        raise CG.SliceError("both slices must be connected")
    lifts = {}
    for k, b in enumerate(base_slice.vertices):
        ids, trunc = _multicurve_ids(cover_slice, lift_multicurve(cover, b))
        if ids and not trunc:
            lifts[k] = ids
    keys = sorted(lifts)
    if pairs is None:
        pairs = list(itertools.combinations(keys, 2))
    rows = []
    for a, b in pairs:
        if a not in lifts or b not in lifts:
            continue
        ds = int(D0[a, b])
        dc = min(int(D1[x, y]) for x in lifts[a] for y in lifts[b])
        rows.append({"a": base_slice.vertices[a].word, "b": base_slice.vertices[b].word,
                     "d_base": ds, "d_cover": dc,
                     "exact_base": CG.distance_index(base_slice, a, b).exact})
    # smallest lam with x / lam - lam <= y <= lam * (x + 1)
    lam = 1.0
    for r in rows:
        x, y = r["d_base"], r["d_cover"]
        lam = max(lam, y / (x + 1), (-y + math.sqrt(y * y + 4 * x)) / 2)
    disjoint_ok = all(r["d_cover"] <= 1 for r in rows if r["d_base"] <= 1)
    return {"pairs": len(rows), "scatter": rows, "fitted_lambda": lam,
            "disjoint_pairs_ok": disjoint_ok}


def orbit_disjoint(cover, alpha):
    """diam(G alpha) <= 1, decided by intersection numbers rather than slice distances."""
    T = cover.total
    orbit = cover.orbit(alpha)
    return all(C.intersection_number(T, x, y) == 0 for x, y in itertools.combinations(orbit, 2))


def fix1_report(cover, base_slice, cover_slice):
    if not is_regular(cover.spec):
        raise CoverError("Fix(G, 1) comparison needs a regular cover")
    S = cover.base
    fix = {k for k, v in enumerate(cover_slice.vertices) if orbit_disjoint(cover, v)}
    lifted, _ = image_vertices(cover, base_slice, cover_slice)
    unexplained, explained = [], []
    for k in sorted(fix - lifted):
        v = cover_slice.vertices[k]
        P = push_forward(cover, v)
        witness = (C.is_simple_essential(S, P.root) and P.root not in base_slice.index
                   and v in lift_multicurve(cover, P.root))
        (explained if witness else unexplained).append({"curve": v.word, "image": P.root.word})
    extra = [cover_slice.vertices[k].word for k in sorted(lifted - fix)]
    return {"fix_size": len(fix), "lift_size": len(lifted),
            "fix_not_lift_explained": explained, "fix_not_lift_unexplained": unexplained,
            "lift_not_fix": extra,
            "ok": not unexplained and not extra}


def invariant_slice(cover, cover_slice):
    """The slice together with all its deck images."""
    G = cover.deck_group()
    curves_ = {cover.deck_image(g, v) for g in G for v in cover_slice.vertices}
    return CG.slice_from_curves(cover.total, curves_, cover_slice.max_word_length)


def deck_permutations(cover, cover_slice):
    """Deck action as permutations of slice indices, if the slice is invariant."""
    perms = []
    for g in cover.deck_group():
        p = []
        for v in cover_slice.vertices:
            w = cover.deck_image(g, v)
            if w not in cover_slice.index:
                raise CG.SliceError("cover slice is not invariant under the deck group")
            p.append(cover_slice.index[w])
        perms.append(p)
    return perms


def factor_check(spec, reg, rng, words=100, length=8):
    """The regularized cover factors through ``spec`` on random words."""
    elems = spec.image()
    bad = 0
    for _ in range(words):
        w = C.random_word(rng, spec.base.nletters, length)
        mine = spec.monodromy(w)[0]
        theirs = reg.monodromy(w)[0]
        if elems[theirs][0] != mine:
            bad += 1
    return {"words": words, "violations": bad}
