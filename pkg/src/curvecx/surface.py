"""Punctured surfaces as ribbon graphs.

A surface is given by darts (half-edges), a cyclic order of darts at each
vertex and the fixed-point-free involution pairing the two darts of an edge.
Boundary cycles of the thickened graph are the punctures.  After contracting
a canonical spanning tree we get one vertex with ``2r`` letters in cyclic
order; the free group on the ``r`` non-tree edges is the fundamental group
and that cyclic order induces the order at infinity used for intersection
numbers.

Letters are coded as integers: generator ``k`` is ``2k``, its inverse
``2k + 1`` (so inversion is ``code ^ 1``).  Generators print as lowercase
letters and inverses as uppercase.
"""
from __future__ import annotations

import json
import string
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class SurfaceError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PuncturedSurface:
    darts: tuple
    vertex_cycles: tuple
    pairing: dict = field(repr=False)
    genus: int
    punctures: int
    complexity: int
    generators: tuple
    rotation: tuple = field(repr=False)
    peripheral_words: tuple = field(repr=False)
    name: str | None = None
    # dart bookkeeping, used by covers
    dart_letter: dict = field(default=None, repr=False)
    vertex_of: dict = field(default=None, repr=False)
    next_dart: dict = field(default=None, repr=False)
    generator_paths: tuple = field(default=None, repr=False)
    root_paths: dict = field(default=None, repr=False)
    boundary_cycles: tuple = field(default=None, repr=False)

    # -- letters ---------------------------------------------------------
    @property
    def rank(self):
        return len(self.generators)

    @property
    def nletters(self):
        return 2 * len(self.generators)

    @property
    def euler_characteristic(self):
        return 2 - 2 * self.genus - self.punctures

    @property
    def position(self):
        pos = [0] * self.nletters
        for k, c in enumerate(self.rotation):
            pos[c] = k
        return tuple(pos)

    def letter_name(self, code):
        name = self.generators[code >> 1]
        return name.upper() if code & 1 else name

    def parse(self, word):
        """Letter codes of ``word``; whitespace is ignored."""
        if isinstance(word, (list, tuple)):
            return tuple(int(c) for c in word)
        index = {}
        for k, g in enumerate(self.generators):
            index[g] = 2 * k
            index[g.upper()] = 2 * k + 1
        out = []
        for ch in word:
            if ch.isspace():
                continue
            if ch not in index:
                raise SurfaceError(f"unknown letter {ch!r} for generators {''.join(self.generators)}")
            out.append(index[ch])
        return tuple(out)

    def format(self, codes):
        return "".join(self.letter_name(c) for c in codes)

    def summary(self):
        return {
            "name": self.name,
            "g": self.genus,
            "m": self.punctures,
            "xi": self.complexity,
            "chi": self.euler_characteristic,
            "generators": "".join(self.generators),
            "rotation": self.format(self.rotation),
            "peripheral_words": list(self.peripheral_words),
        }

    def to_json(self):
        return {
            "darts": list(self.darts),
            "vertex_cycles": [list(c) for c in self.vertex_cycles],
            "pairing": dict(self.pairing),
        }

    def __eq__(self, other):
        if not isinstance(other, PuncturedSurface):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self):
        return hash((self.darts, self.vertex_cycles))


def _reduce(codes):
    out = []
    for c in codes:
        if out and out[-1] == c ^ 1:
            out.pop()
        else:
            out.append(c)
    i, j = 0, len(out)
    while j - i >= 2 and out[i] == out[j - 1] ^ 1:
        i += 1
        j -= 1
    return out[i:j]


def _canonical(codes):
    codes = tuple(codes)
    n = len(codes)
    if n == 0:
        return codes
    inv = tuple(c ^ 1 for c in reversed(codes))
    best = codes
    for w in (codes, inv):
        for k in range(n):
            r = w[k:] + w[:k]
            if r < best:
                best = r
    return best


def build_surface(darts: Sequence[str], vertex_cycles: Sequence[Sequence[str]],
                  pairing: dict, name: str | None = None) -> PuncturedSurface:
    darts = tuple(str(d) for d in darts)
    if len(set(darts)) != len(darts):
        raise SurfaceError("duplicate dart ids")
    if not darts:
        raise SurfaceError("no darts")
    dset = set(darts)
    pairing = {str(k): str(v) for k, v in pairing.items()}
    if set(pairing) != dset:
        raise SurfaceError("pairing must be defined on every dart")
    for d, e in pairing.items():
        if e not in dset or pairing.get(e) != d or e == d:
            raise SurfaceError(f"pairing is not a fixed-point-free involution at {d!r}")
    cycles = tuple(tuple(str(d) for d in c) for c in vertex_cycles)
    seen = [d for c in cycles for d in c]
    if sorted(seen) != sorted(darts) or any(len(c) == 0 for c in cycles):
        raise SurfaceError("vertex cycles must partition the darts")

    order = {d: k for k, d in enumerate(darts)}
    vertex_of, nxt = {}, {}
    for v, c in enumerate(cycles):
        for k, d in enumerate(c):
            vertex_of[d] = v
            nxt[d] = c[(k + 1) % len(c)]

    # canonical spanning tree: BFS from the vertex holding the least dart
    root = vertex_of[darts[0]]
    root_paths = {root: ()}
    tree = set()
    queue = deque([root])
    while queue:
        v = queue.popleft()
        cyc = cycles[v]
        start = min(range(len(cyc)), key=lambda k: order[cyc[k]])
        for k in range(len(cyc)):
            d = cyc[(start + k) % len(cyc)]
            w = vertex_of[pairing[d]]
            if w not in root_paths:
                root_paths[w] = root_paths[v] + (d,)
                tree.add(d)
                tree.add(pairing[d])
                queue.append(w)
    if len(root_paths) != len(cycles):
        raise SurfaceError("ribbon graph is disconnected")

    # boundary cycles: phi = next-around-vertex after crossing the edge
    faces, done = [], set()
    for d in darts:
        if d in done:
            continue
        cyc, x = [], d
        while x not in done:
            done.add(x)
            cyc.append(x)
            x = nxt[pairing[x]]
        faces.append(tuple(cyc))
    V, E, F = len(cycles), len(darts) // 2, len(faces)
    chi_closed = V - E + F
    if (2 - chi_closed) % 2:
        raise SurfaceError("odd Euler characteristic; ribbon data inconsistent")
    genus = (2 - chi_closed) // 2
    m = F
    if m < 1:  # pragma: no cover - F >= 1 always for nonempty graphs
        raise SurfaceError("closed surfaces are not supported")

    # generators = non-tree edges, ordered by their positive dart
    positives = []
    for d in darts:
        if d in tree:
            continue
        e = pairing[d]
        if order[e] < order[d] and e not in tree:
            continue
        letterish = (len(d) == 1 and len(e) == 1 and d.isalpha() and e.isalpha()
                     and d.lower() == e.lower() and d != e)
        if letterish and d.isupper():
            continue  # the lowercase twin is positive
        if letterish or order[d] < order[e]:
            positives.append(d)
    positives.sort(key=lambda d: order[d])
    if len(positives) > 26:
        raise SurfaceError("more than 26 generators are not supported")
    names = [d.lower() for d in positives]
    if not (all(len(d) == 1 and d.islower() for d in positives) and len(set(names)) == len(names)):
        names = list(string.ascii_lowercase[: len(positives)])
    dart_letter = {d: -1 for d in darts}
    for k, d in enumerate(positives):
        dart_letter[d] = 2 * k
        dart_letter[pairing[d]] = 2 * k + 1

    # rotation at the contracted vertex
    nontree = [d for d in darts if d not in tree]
    rotation = []
    if nontree:
        c0 = nontree[0]
        c = c0
        while True:
            rotation.append(dart_letter[c])
            n_ = nxt[c]
            guard = 0
            while n_ in tree:
                n_ = nxt[pairing[n_]]
                guard += 1
                if guard > len(darts):  # pragma: no cover
                    raise SurfaceError("tree walk did not terminate")
            c = n_
            if c == c0:
                break
        if sorted(rotation) != list(range(2 * len(positives))):
            raise SurfaceError("contracted rotation is inconsistent")
    else:
        raise SurfaceError("surface with trivial fundamental group (a disc) is not supported")

    def _inverse_path(path):
        return tuple(pairing[x] for x in reversed(path))

    gen_paths = []
    for d in positives:
        v, w = vertex_of[d], vertex_of[pairing[d]]
        gen_paths.append(root_paths[v] + (d,) + _inverse_path(root_paths[w]))

    periph = []
    for f in faces:
        codes = [dart_letter[x] for x in f if dart_letter[x] >= 0]
        periph.append(tuple(_reduce(codes)))

    S = PuncturedSurface(
        darts=darts,
        vertex_cycles=cycles,
        pairing=pairing,
        genus=genus,
        punctures=m,
        complexity=3 * genus - 3 + m,
        generators=tuple(names),
        rotation=tuple(rotation),
        peripheral_words=(),
        name=name,
        dart_letter=dart_letter,
        vertex_of=vertex_of,
        next_dart=nxt,
        generator_paths=tuple(gen_paths),
        root_paths=root_paths,
        boundary_cycles=tuple(faces),
    )
    object.__setattr__(S, "peripheral_words", tuple(S.format(_canonical(p)) for p in periph))
    return S


def complexity(S: PuncturedSurface) -> int:
    return 3 * S.genus - 3 + S.punctures


def one_vertex(order: str, name=None) -> PuncturedSurface:
    """Surface from a single vertex whose darts are letters, e.g. ``"abAB"``."""
    darts = list(order)
    pairing = {d: d.swapcase() for d in darts}
    # dart ids sorted so that lowercase letters lead (stable generator order)
    ids = sorted(darts, key=lambda d: (d.lower(), d.isupper()))
    return build_surface(ids, [darts], pairing, name=name)


CATALOG = {
    "S_1_1": "abAB",
    "S_0_3": "aAbB",
    "S_0_4": "aAbBcC",
    "S_0_5": "aAbBcCdD",
    "S_1_2": "abABcC",
    "S_2_1": "abABcdCD",
}

_catalog_cache: dict = {}


def catalog(name: str) -> PuncturedSurface:
    if name not in CATALOG:
        raise SurfaceError(f"unknown catalog surface {name!r}; choose from {sorted(CATALOG)}")
    if name not in _catalog_cache:
        _catalog_cache[name] = one_vertex(CATALOG[name], name=name)
    return _catalog_cache[name]


def load_surface(spec) -> PuncturedSurface:
    """Catalog name, path to a JSON surface file, or an already-parsed dict."""
    if isinstance(spec, PuncturedSurface):
        return spec
    if isinstance(spec, dict):
        return build_surface(spec["darts"], spec["vertex_cycles"], spec["pairing"], name=spec.get("name"))
    if spec in CATALOG:
        return catalog(spec)
    with open(spec) as fh:
        data = json.load(fh)
    return build_surface(data["darts"], data["vertex_cycles"], data["pairing"], name=data.get("name"))


def random_ribbon_graph(rng, nvertices: int, nedges: int):
    """Random connected ribbon data (darts, cycles, pairing) for property tests."""
    if nedges < nvertices - 1:
        raise ValueError("too few edges for a connected graph")
    while True:
        ends = []
        # spanning tree first, then extra edges
        for v in range(1, nvertices):
            ends.append((int(rng.integers(0, v)), v))
        for _ in range(nedges - (nvertices - 1)):
            ends.append((int(rng.integers(0, nvertices)), int(rng.integers(0, nvertices))))
        darts, pairing = [], {}
        at = {v: [] for v in range(nvertices)}
        for k, (u, v) in enumerate(ends):
            d, e = f"e{k}+", f"e{k}-"
            darts += [d, e]
            pairing[d], pairing[e] = e, d
            at[u].append(d)
            at[v].append(e)
        cycles = []
        for v in range(nvertices):
            lst = at[v]
            perm = rng.permutation(len(lst))
            cycles.append([lst[i] for i in perm])
        if all(cycles):
            return darts, cycles, pairing


__all__ = [
    "PuncturedSurface", "SurfaceError", "build_surface", "catalog", "complexity",
    "load_surface", "one_vertex", "CATALOG", "random_ribbon_graph",
]
