"""Numba switch for the hot kernels.

Set ``CURVECX_NUMBA=0`` to run every kernel as plain Python/numpy.  The
flag is read once at import time; the benchmark flips it in a subprocess.
"""
import os

_flag = os.environ.get("CURVECX_NUMBA", "1").strip().lower()
USE_NUMBA = _flag not in ("0", "false", "no", "off")

if USE_NUMBA:
    # TBB on this image is too old and only produces a warning
    os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
    try:
        import numba
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

if USE_NUMBA:
    def njit(fn=None, **kw):
        kw.setdefault("cache", True)
        kw.setdefault("nogil", True)
        if fn is None:
            return lambda f: numba.njit(**kw)(f)
        return numba.njit(**kw)(fn)

    def set_threads(n):
        n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
        numba.set_num_threads(n)
else:
    def njit(fn=None, **kw):
        if fn is None:
            return lambda f: f
        return fn

    def set_threads(n):
        return None


def backend():
    return "numba" if USE_NUMBA else "python"
