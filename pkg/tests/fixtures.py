"""Regression fixtures shared by the unit and acceptance suites.

``python3 tests/fixtures.py --pin`` recomputes every pinned constant and
rewrites pinned.json.  Run it only when a change is meant to move them.
"""
import json
import sys
from pathlib import Path

from curvecx import covers as V
from curvecx import curvegraph as CG
from curvecx import hyperbolic as H
from curvecx.surface import catalog

PINNED = Path(__file__).with_name("pinned.json")

SHORT_SLICE_LEN = 6
HULL_LS = (2, 4)
HULL_RESOLUTION = 3
PROJ_L = 4

COVER_FIXTURES = {
    "S_0_5/ab": ("S_0_5", {"a": [2, 1], "b": [2, 1]}, 2, 5),
    "S_1_2/a": ("S_1_2", {"a": [2, 1]}, 2, 5),
    "S_1_1/a3": ("S_1_1", {"a": [2, 3, 1]}, 3, 5),
}
COVER_BASE_LEN = 4


def load_pinned():
    with open(PINNED) as fh:
        return json.load(fh)


def short_slice(name):
    return CG.build_slice(catalog(name), SHORT_SLICE_LEN)


def tuple_fixtures():
    for name, tuples in CG.FILLING_TUPLES.items():
        for k, t in enumerate(tuples):
            yield f"{name}#{k}", name, [list(e) for e in t]


def hull_values():
    out = {}
    for key, name, alpha in tuple_fixtures():
        sl = short_slice(name)
        for L in HULL_LS:
            out[f"{key}@L{L}"] = CG.hull_vs_short_hull(sl, alpha, L, HULL_RESOLUTION)
    return out


def proj_betas(sl, alpha):
    comps = {c for e in alpha for c in e}
    return [w for w in sl.words if w not in comps][:40:5]


def proj_values():
    out = {}
    for key, name, alpha in tuple_fixtures():
        sl = short_slice(name)
        reps = [CG.project_via_balance(sl, alpha, b, PROJ_L) for b in proj_betas(sl, alpha)]
        out[key] = {"hausdorff": max(r["hausdorff"] for r in reps),
                    "distance_to_short": max(r["distance_to_short"] for r in reps),
                    "approximate": any(r["approximate"] for r in reps), "betas": len(reps)}
    return out


def sweep_values():
    return {key: CG.short_diameter_sweep(short_slice(name), alpha) for key, name, alpha in tuple_fixtures()}


def cover_fixture(key):
    base, rho, degree, cover_len = COVER_FIXTURES[key]
    cv = V.build_cover(V.make_spec(catalog(base), rho, degree))
    bs = CG.build_slice(cv.base, COVER_BASE_LEN, allow_low_complexity=True)
    cs = CG.build_slice(cv.total, cover_len, allow_low_complexity=True)
    return cv, bs, cs


def cover_alphas(cv, bs, cs):
    image, _ = V.image_vertices(cv, bs, cs)
    return [v.word for k, v in enumerate(cs.vertices) if k not in image][:30:3]


def cover_values():
    out = {}
    for key in COVER_FIXTURES:
        cv, bs, cs = cover_fixture(key)
        proj, circ, skipped = [], [], []
        for a in cover_alphas(cv, bs, cs):
            try:
                p = V.experiment_coverproj(cv, bs, cs, a)
                c = V.experiment_covercirc(cv, cs, bs, a)
            except CG.SliceError:
                skipped.append(a)
                continue
            proj.append(p)
            circ.append(c)
        out[key] = {
            "coverproj": max(p["distance"] for p in proj),
            "coverproj_exact": all(p["exact"] for p in proj),
            "covercirc": max(c["distance"] for c in circ),
            "covercirc_exact": all(c["exact"] for c in circ),
            "ones_balanced": all(c["ones_balanced"] for c in circ),
            "alphas": len(proj), "skipped": skipped,
        }
    return out


# -- metric fixtures for the lemma suites --------------------------------

def _cycle(n):
    M = H.from_edges(n, [(k, (k + 1) % n) for k in range(n)])
    return M, [[(k + 1) % n for k in range(n)], [(-k) % n for k in range(n)]]


def _tree():
    # binary tree of depth 2; automorphisms swap children
    edges = [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]
    M = H.from_edges(7, edges)
    return M, [[0, 2, 1, 5, 6, 3, 4], [0, 1, 2, 4, 3, 5, 6], [0, 1, 2, 3, 4, 6, 5]]


def _grid(n):
    vid = lambda i, j: i * n + j
    edges = [(vid(i, j), vid(i, j + 1)) for i in range(n) for j in range(n - 1)]
    edges += [(vid(i, j), vid(i + 1, j)) for i in range(n - 1) for j in range(n)]
    M = H.from_edges(n * n, edges)
    flip = [vid(i, n - 1 - j) for i in range(n) for j in range(n)]
    swap = [vid(j, i) for i in range(n) for j in range(n)]
    return M, [flip, swap]


def _base_slice(name, L):
    M = CG.build_slice(catalog(name), L).metric()
    return M, [list(range(M.n))]


def _cover_slice(base, rho, degree, L):
    cv = V.build_cover(V.make_spec(catalog(base), rho, degree))
    cs = V.invariant_slice(cv, CG.build_slice(cv.total, L, allow_low_complexity=True))
    return cs.metric(), V.deck_permutations(cv, cs)


METRIC_FIXTURES = {
    "tree7": _tree,
    "C5": lambda: _cycle(5),
    "C6": lambda: _cycle(6),
    "C8": lambda: _cycle(8),
    "grid4": lambda: _grid(4),
    "slice S_0_5 L4": lambda: _base_slice("S_0_5", 4),
    "slice S_1_2 L4": lambda: _base_slice("S_1_2", 4),
    "cover S_1_1/a3 L3": lambda: _cover_slice("S_1_1", {"a": [2, 3, 1]}, 3, 3),
    "cover S_1_2/a L3": lambda: _cover_slice("S_1_2", {"a": [2, 1]}, 2, 3),
}


def metric_fixture(name):
    M, gens = METRIC_FIXTURES[name]()
    return M, H.GroupAction(M, gens)


def pin():
    data = {
        "hull": {k: v["hausdorff"] for k, v in hull_values().items()},
        "proj": {k: v["hausdorff"] for k, v in proj_values().items()},
        "short_threshold": {k: v["threshold"] for k, v in sweep_values().items()},
        "cover": {k: {"coverproj": v["coverproj"], "covercirc": v["covercirc"]}
                  for k, v in cover_values().items()},
    }
    with open(PINNED, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return data


if __name__ == "__main__":
    if "--pin" in sys.argv:
        print(json.dumps(pin(), indent=2, sort_keys=True))
