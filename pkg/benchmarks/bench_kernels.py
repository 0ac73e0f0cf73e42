"""Time the hot kernels under numba and under the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json]

Each backend runs in its own subprocess (the switch is read at import), with
a fresh cache directory so slice construction is never served from disk.
Numba timings exclude the first call, which pays for compilation.
"""
import argparse
import json
import os
import subprocess
import sys
import tempfile
import time


def _workloads():
    import numpy as np

    from curvecx import curvegraph as CG
    from curvecx import hyperbolic as H
    from curvecx import kernels as K
    from curvecx.surface import catalog

    S = catalog("S_0_5")
    sl = CG.build_slice(S, 6)
    flat, off = sl._flat, sl._off
    pos, N = np.asarray(S.position, dtype=np.int64), S.nletters
    csr = sl.csr()
    M = sl.metric()
    ring = H.from_edges(24, [(k, (k + 1) % 24) for k in range(24)]).subdivide()
    perms = np.array([[(k + s) % M.n for k in range(M.n)] for s in range(4)], dtype=np.int64)

    return {
        "intersection_table": lambda: K.intersection_table(flat, off, pos, N),
        "bfs_all": lambda: K.bfs_all(csr[0], csr[1], len(sl)),
        "thin_delta": lambda: H.thin_delta(ring),
        "four_point": lambda: H.four_point_delta(M),
        "orbit_diameters": lambda: K.orbit_diameters(M.D, perms),
    }, {"slice_vertices": len(sl), "ring_points": ring.n}


def child(repeat):
    from curvecx import _accel
    jobs, sizes = _workloads()
    out = {}
    for name, fn in jobs.items():
        fn()  # warm-up (numba compiles here)
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        out[name] = best
    return {"backend": _accel.backend(), "seconds": out, "sizes": sizes}


def run_backend(flag, repeat):
    env = dict(os.environ, CURVECX_NUMBA=flag, CURVECX_CACHE=tempfile.mkdtemp(prefix="curvecx-bench-"))
    r = subprocess.run([sys.executable, __file__, "--child", "--repeat", str(repeat)],
                       capture_output=True, text=True, env=env)
    if r.returncode:
        sys.exit(r.stderr)
    return json.loads(r.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        print(json.dumps(child(args.repeat)))
        return
    fast = run_backend("1", args.repeat)
    slow = run_backend("0", args.repeat)
    if args.json:
        print(json.dumps({"numba": fast, "python": slow}, indent=2))
        return
    print(f"sizes: {fast['sizes']}")
    print(f"{'kernel':<20}{'numba (s)':>12}{'python (s)':>12}{'speedup':>10}")
    for name, t in fast["seconds"].items():
        p = slow["seconds"][name]
        print(f"{name:<20}{t:>12.4f}{p:>12.4f}{p / t if t else float('inf'):>9.1f}x")


if __name__ == "__main__":
    main()
