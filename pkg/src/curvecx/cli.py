"""Command line: ``curvecx <group> <command> ...`` emitting JSON reports.

Exit codes: 0 ok, 1 invariant violation, 2 bad input, 3 resource cap.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
import time
from fractions import Fraction

import numpy as np

from . import _accel
from . import covers as V
from . import curvegraph as CG
from . import curves as C
from . import flat as F
from . import hyperbolic as H
from . import rocketship as R
from .arrangement import ArrangementError, build_arrangement
from .cache import CODE_VERSION, provenance
from .config import ConfigError, load_config
from .surface import SurfaceError, load_surface

log = logging.getLogger("curvecx")

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class InvariantViolation(RuntimeError):
    pass


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, C.CurveClass):
        return x.word
    raise TypeError(f"cannot serialize {type(x).__name__}")


def parse_tuple(text):
    """JSON (``[["a"], ["b", "cd"]]``) or ``a,b+cd``: commas split entries, + joins components."""
    text = text.strip()
    if text.startswith("["):
        data = json.loads(text)
        return [e if isinstance(e, list) else [e] for e in data]
    return [[w for w in e.split("+") if w] for e in text.split(",") if e]


def parse_weights(text, n):
    if text is None:
        return [1] * n
    out = []
    for x in text.split(","):
        x = x.strip()
        out.append(Fraction(x) if "." not in x and "e" not in x.lower() else float(x))
    return out


def _file_digest(path):
    try:
        with open(path, "rb") as fh:
            return hashlib.sha256(fh.read()).hexdigest()
    except OSError:
        return None


def _surface(args):
    return load_surface(args.surface)


# -- surface ----------------------------------------------------------------

def cmd_surface_info(args, cfg):
    S = _surface(args)
    s = S.summary()
    return {"g": s["g"], "m": s["m"], "xi": s["xi"], "chi": s["chi"], "generators": s["generators"],
            "rotation": s["rotation"], "peripheral_words": s["peripheral_words"]}


# -- curves -------------------------------------------------------------------

def cmd_curves_i(args, cfg):
    S = _surface(args)
    return {"i": C.intersection_number(S, args.w1, args.w2)}


def cmd_curves_self(args, cfg):
    S = _surface(args)
    return {"self_intersection": C.self_intersection(S, args.w)}


def cmd_curves_classify(args, cfg):
    S = _surface(args)
    c = C.normalize(S, args.w)
    return {"canonical": c.word, "class": C.classify(S, c)}


def cmd_curves_arrangement(args, cfg):
    S = _surface(args)
    return build_arrangement(S, C.as_tuple(S, parse_tuple(args.tuple))).to_json()


def cmd_curves_list(args, cfg):
    S = _surface(args)
    words = CG.simple_essential_words(S, args.max_len)
    return {"count": len(words), "curves": [S.format(w) for w in words]}


# -- flat -----------------------------------------------------------------

def cmd_flat_build(args, cfg):
    S = _surface(args)
    alpha = C.as_tuple(S, parse_tuple(args.tuple))
    t = parse_weights(args.weights, len(alpha))
    fs = F.flat_from_tuple(S, alpha, t)
    out = fs.to_json()
    norm2 = C.self_weight(S, t, alpha)
    area = F.area(fs)
    out["norm_squared"] = _jsonable(norm2) if isinstance(norm2, Fraction) else norm2
    out["area_identity"] = {"lhs": out["area"], "rhs": out["norm_squared"], "ok": area == norm2}
    if area != norm2:
        raise InvariantViolation(("flat area differs from the weighted self-intersection", out))
    return out


def cmd_flat_length(args, cfg):
    S = _surface(args)
    alpha = C.as_tuple(S, parse_tuple(args.tuple))
    t = parse_weights(args.weights, len(alpha))
    lo, hi = F.euclidean_length_bounds(S, alpha, t, args.curve)
    return {"curve": C.normalize(S, args.curve).word, "l1": hi, "euclidean_lower": lo, "euclidean_upper": hi}


def cmd_flat_annulus(args, cfg):
    S = _surface(args)
    alpha = C.as_tuple(S, parse_tuple(args.tuple))
    t = parse_weights(args.weights, len(alpha))
    fs = F.flat_from_tuple(S, alpha, t)
    reports = [F.annulus_inequalities(fs, a, args.beta) for a in F.core_annuli(fs)]
    if not all(r["ok"] for r in reports):
        raise InvariantViolation(("annulus inequality failed", reports))
    return {"annuli": reports}


# -- cgraph ---------------------------------------------------------------

def _slice(args, cfg, S=None):
    S = S or _surface(args)
    return CG.build_slice(S, args.max_len, max_vertices=cfg.max_slice_vertices,
                          allow_low_complexity=getattr(args, "allow_low_complexity", False),
                          cache=cfg.cache)


def cmd_cgraph_slice(args, cfg):
    sl = _slice(args, cfg)
    D = sl.D
    return {"vertices": len(sl), "edges": int(sl.adjacency().sum() // 2), "connected": sl.connected(),
            "diameter": int(D.max()) if len(sl) and sl.connected() else None,
            "provenance": sl.provenance, "curves": sl.words}


def cmd_cgraph_dist(args, cfg):
    sl = _slice(args, cfg)
    r = CG.distance(sl, args.a, args.b)
    out = r.to_json()
    out["i"] = int(sl.table[sl.vertex(args.a), sl.vertex(args.b)])
    if r.hempel is not None and r.exact and r.upper > r.hempel:
        raise InvariantViolation(("distance exceeds the Hempel bound", out))
    return out


def cmd_cgraph_hull(args, cfg):
    sl = _slice(args, cfg)
    h, approx = CG.hull(sl, args.curves)
    return {"hull": sorted(c.word for c in h), "size": len(h), "approximate": approx}


def cmd_cgraph_short(args, cfg):
    sl = _slice(args, cfg)
    alpha = C.as_tuple(sl.surface, parse_tuple(args.tuple))
    t = parse_weights(args.weights, len(alpha))
    return CG.short_set_report(sl, alpha, t, Fraction(args.L))


def cmd_cgraph_shorthull(args, cfg):
    sl = _slice(args, cfg)
    alpha = C.as_tuple(sl.surface, parse_tuple(args.tuple))
    rep = CG.hull_vs_short_hull(sl, alpha, Fraction(args.L), args.resolution)
    rep["short_hull"] = sorted(c.word for c in CG.short_hull(sl, alpha, Fraction(args.L), args.resolution))
    return rep


def cmd_cgraph_project(args, cfg):
    sl = _slice(args, cfg)
    alpha = C.as_tuple(sl.surface, parse_tuple(args.tuple))
    return CG.project_via_balance(sl, alpha, args.beta, Fraction(args.L))


def cmd_cgraph_fourpt(args, cfg):
    sl = _slice(args, cfg)
    return CG.check_4ptint(sl, args.curves, Fraction(args.r))


def cmd_cgraph_sweep(args, cfg):
    sl = _slice(args, cfg)
    alpha = C.as_tuple(sl.surface, parse_tuple(args.tuple))
    return CG.short_diameter_sweep(sl, alpha, sweep=cfg.l_sweep)


# -- hyp ------------------------------------------------------------------

def _metric(args):
    with open(args.metric) as fh:
        return H.load_metric(json.load(fh))


def cmd_hyp_delta(args, cfg):
    M = _metric(args)
    if args.mode == "thin":
        if M.n > cfg.thin_delta_cap and args.sample is None:
            raise CG.ResourceCapError(f"{M.n} points exceed the thin-delta cap {cfg.thin_delta_cap}")
        return {"mode": "thin", "delta": H.thin_delta(M, cap=cfg.thin_delta_cap, sample=args.sample,
                                                      seed=cfg.seed)}
    rep = H.four_point_report(M, cap=cfg.max_quadruple_points, sample=args.sample, seed=cfg.seed)
    rep["mode"] = "fourpoint"
    return rep


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def cmd_hyp_circ(args, cfg):
    M = _metric(args)
    r, cs = H.circumcentre(M, _ints(args.set))
    return {"radius": r, "centres": sorted(cs)}


def cmd_hyp_fix(args, cfg):
    M = _metric(args)
    A = H.GroupAction(M, [_ints(p) for p in args.perm] or [list(range(M.n))])
    return {"group_order": len(A), "R": args.R, "fix": sorted(H.fix_set(M, A, args.R))}


def cmd_hyp_lemmas(args, cfg):
    M = _metric(args)
    A = H.GroupAction(M, [_ints(p) for p in args.perm]) if args.perm else None
    rep = H.lemma_suites(M, A, seed=cfg.seed)
    bad = {k: v["violations"] for k, v in rep.items() if isinstance(v, dict) and v["violations"]}
    if bad:
        raise InvariantViolation(("lemma suite violations", rep))
    return rep


# -- rocketship -----------------------------------------------------------

def cmd_rocket_report(args, cfg):
    ship = R.RocketShip(args.n, args.l)
    rep = R.example_report(ship, args.s, args.r_small, args.resolution, args.stencil)
    rep["convergence"] = R.convergence(ship, args.resolution, stencil=args.stencil, s=args.s)
    return rep


def cmd_rocket_distance(args, cfg):
    ship = R.RocketShip(args.n, args.l)

    def point(text):
        region, a, b = text.split(":")
        return {"nose": R.nose, "shaft": R.shaft, "fin": R.fin}[region](float(a), float(b)) \
            if region != "fin" else R.fin(int(a), float(b))
    return {"distance": ship.distance(point(args.p), point(args.q))}


# -- cover ----------------------------------------------------------------

def _cover(args):
    spec = V.load_spec(args.spec)
    return V.build_cover(spec)


def cmd_cover_build(args, cfg):
    cv = _cover(args)
    if not V.euler_check(cv):
        raise InvariantViolation(("Euler characteristic is not multiplicative", cv.total.summary()))
    reg = V.is_regular(cv.spec)
    return {"degree": cv.degree, "total": cv.total.summary(), "regular": reg,
            "deck_order": len(cv.deck_group()), "image_order": len(cv.spec.image(cfg.group_cap)),
            "euler_ok": True}


def cmd_cover_lift(args, cfg):
    cv = _cover(args)
    comps = V.lift(cv, args.w)
    return {"curve": C.normalize(cv.base, args.w).word,
            "components": [{"curve": x.curve.word, "sheet": x.sheet + 1, "degree": x.degree} for x in comps]}


def cmd_cover_push(args, cfg):
    cv = _cover(args)
    P = V.push_forward(cv, args.w)
    return {"curve": C.normalize(cv.total, args.w).word, "image": P.curve.word, "root": P.root.word,
            "multiplicity": P.multiplicity}


def _base_slice(cv, args, cfg):
    return CG.build_slice(cv.base, args.base_len, max_vertices=cfg.max_slice_vertices,
                          allow_low_complexity=True, cache=cfg.cache)


def _cover_slice(cv, args, cfg):
    return CG.build_slice(cv.total, args.cover_len, max_vertices=cfg.max_slice_vertices,
                          allow_low_complexity=True, cache=cfg.cache)


def cmd_cover_pi(args, cfg):
    cv = _cover(args)
    rep = V.pi_projection(cv, _base_slice(cv, args, cfg), args.w)
    if rep["regular"] and not rep["identity_ok"]:
        raise InvariantViolation(("lifting identity failed", rep))
    return rep


def cmd_cover_experiment(args, cfg):
    cv = _cover(args)
    name = args.name
    bs = _base_slice(cv, args, cfg)
    if name == "fix1":
        return V.fix1_report(cv, bs, _cover_slice(cv, args, cfg))
    cs = _cover_slice(cv, args, cfg)
    if name == "qi":
        rep = V.experiment_qi(cv, bs, cs)
        if args.csv:
            with open(args.csv, "w", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=["a", "b", "d_base", "d_cover", "exact_base"])
                w.writeheader()
                w.writerows(rep["scatter"])
        return rep
    if args.alpha is None:
        raise ValueError(f"experiment {name} needs --alpha")
    if name == "coverproj":
        return V.experiment_coverproj(cv, bs, cs, args.alpha)
    if name == "covercirc":
        rep = V.experiment_covercirc(cv, cs, bs, args.alpha, sweep=cfg.l_sweep)
        if not rep["ones_balanced"]:
            raise InvariantViolation(("all-ones vector is not balanced on the orbit", rep))
        return rep
    raise ValueError(f"unknown experiment {name!r}")


# -- parser -----------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="curvecx", description="Curve complexes, covers and hyperbolicity checks.")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--json", action="store_true", help="accepted for compatibility; output is always JSON")
    p.add_argument("-v", "--verbose", action="store_true")
    top = p.add_subparsers(dest="group", required=True)

    def group(name, help_):
        g = top.add_parser(name, help=help_)
        return g.add_subparsers(dest="command", required=True)

    def cmd(sub, name, fn, *arguments, help_=None):
        q = sub.add_parser(name, help=help_)
        for args, kw in arguments:
            q.add_argument(*args, **kw)
        q.add_argument("--json", action="store_true", help=argparse.SUPPRESS)
        q.set_defaults(fn=fn)
        return q

    def a(*args, **kw):
        return (args, kw)

    surf = a("surface", help="catalog name, JSON file")
    s = group("surface", "ribbon-graph surfaces")
    cmd(s, "info", cmd_surface_info, surf)

    c = group("curves", "intersection numbers and classification")
    cmd(c, "i", cmd_curves_i, surf, a("w1"), a("w2"))
    cmd(c, "self", cmd_curves_self, surf, a("w"))
    cmd(c, "classify", cmd_curves_classify, surf, a("w"))
    cmd(c, "arrangement", cmd_curves_arrangement, surf, a("tuple"))
    cmd(c, "list", cmd_curves_list, surf, a("--max-len", type=int, default=4))

    f = group("flat", "rectangle-tiled flat surfaces")
    wts = a("--weights", help="comma-separated weights, default all ones")
    cmd(f, "build", cmd_flat_build, surf, a("tuple"), wts)
    cmd(f, "length", cmd_flat_length, surf, a("tuple"), wts, a("--curve", required=True))
    cmd(f, "annulus", cmd_flat_annulus, surf, a("tuple"), wts, a("--beta", required=True))

    g = group("cgraph", "finite slices of the curve graph")
    ml = a("--max-len", type=int, default=5)
    low = a("--allow-low-complexity", action="store_true")
    cmd(g, "slice", cmd_cgraph_slice, surf, ml, low)
    cmd(g, "dist", cmd_cgraph_dist, surf, a("a"), a("b"), ml, low)
    cmd(g, "hull", cmd_cgraph_hull, surf, a("curves", nargs="+"), ml, low)
    cmd(g, "short", cmd_cgraph_short, surf, a("tuple"), wts, a("--L", default="2"), ml, low)
    cmd(g, "shorthull", cmd_cgraph_shorthull, surf, a("tuple"), a("--L", default="2"),
        a("--resolution", type=int, default=3), ml, low)
    cmd(g, "project", cmd_cgraph_project, surf, a("tuple"), a("--beta", required=True),
        a("--L", default="4"), ml, low)
    cmd(g, "fourpt", cmd_cgraph_fourpt, surf, a("curves", nargs=4), a("--r", default="1"), ml, low)
    cmd(g, "sweep", cmd_cgraph_sweep, surf, a("tuple"), ml, low)

    h = group("hyp", "hyperbolicity of finite metrics")
    met = a("metric", help="JSON with 'matrix' or 'edges'")
    cmd(h, "delta", cmd_hyp_delta, met, a("--mode", choices=["fourpoint", "thin"], default="fourpoint"),
        a("--sample", type=int))
    cmd(h, "circ", cmd_hyp_circ, met, a("--set", required=True, help="comma-separated point ids"))
    perm = a("--perm", action="append", default=[], help="comma-separated permutation; repeat per generator")
    cmd(h, "fix", cmd_hyp_fix, met, perm, a("--R", type=float, required=True))
    cmd(h, "lemmas", cmd_hyp_lemmas, met, perm)

    r = group("rocketship", "the rocketship example")
    rk = [a("--n", type=int, default=3), a("--l", type=float, default=20.0)]
    cmd(r, "report", cmd_rocket_report, *rk, a("--s", type=float, default=5.0),
        a("--resolution", type=int, default=64), a("--r-small", type=float, default=0.25),
        a("--stencil", type=int, default=3))
    cmd(r, "distance", cmd_rocket_distance, *rk, a("p", help="region:a:b"), a("q", help="region:a:b"))

    v = group("cover", "finite covers")
    spec = a("spec", help="cover spec JSON file")
    lens = [a("--base-len", type=int, default=5), a("--cover-len", type=int, default=5)]
    cmd(v, "build", cmd_cover_build, spec)
    cmd(v, "lift", cmd_cover_lift, spec, a("w"))
    cmd(v, "push", cmd_cover_push, spec, a("w"))
    cmd(v, "pi", cmd_cover_pi, spec, a("w"), lens[0])
    cmd(v, "experiment", cmd_cover_experiment, a("name", choices=["coverproj", "covercirc", "qi", "fix1"]),
        spec, a("--alpha"), a("--csv"), *lens)
    return p


def _inputs(args):
    skip = {"fn", "config", "out", "threads", "verbose", "json"}
    inputs = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    digests = {}
    for k in ("surface", "metric", "spec"):
        path = inputs.get(k)
        if isinstance(path, str):
            dg = _file_digest(path)
            if dg:
                digests[k] = dg
    return inputs, digests


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, seed=args.seed, threads=args.threads)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _accel.set_threads(cfg.threads)
    inputs, digests = _inputs(args)
    report = {"command": f"{args.group} {args.command}", "inputs": inputs,
              "provenance": provenance({"inputs": inputs, "files": digests}),
              "code_version": CODE_VERSION, "seed": cfg.seed}
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        report["results"] = args.fn(args, cfg)
    except InvariantViolation as exc:
        msg, results = exc.args[0]
        report["results"] = results
        report["violation"] = msg
        code = EXIT_INVARIANT
    except (CG.ResourceCapError, V.CoverError) as exc:
        if isinstance(exc, V.CoverError) and "cap" not in str(exc):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (SurfaceError, C.CurveError, F.FlatError, CG.SliceError, H.MetricError, R.RocketError,
            ArrangementError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report["timings"] = {"seconds": round(time.perf_counter() - t0, 6), "backend": _accel.backend()}
    text = json.dumps(report, default=_jsonable, indent=2, sort_keys=False)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
