"""Kernel selection and threaded row-block dispatch.

The compiled extension is preferred; MDIMLAB_PURE=1 forces the numpy
fallback.  MDIMLAB_THREADS caps the number of worker threads used for
pairwise matrices (the compiled kernels release the GIL).
"""
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels

_impl = _pykernels
BACKEND = "python"
if os.environ.get("MDIMLAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:
        pass


def thread_count() -> int:
    raw = os.environ.get("MDIMLAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, min(8, os.cpu_count() or 1))


def _blocks(n, parts):
    step = max(1, -(-n // parts))
    return [(r, min(n, r + step)) for r in range(0, n, step)]


def _dispatch(fn, n, *args, impl=None):
    impl = impl or _impl
    out = np.zeros((n, n), dtype=np.float64)
    threads = thread_count() if n >= 256 else 1
    kernel = getattr(impl, fn)
    if threads == 1:
        kernel(*args, 0, n, out)
    else:
        with ThreadPoolExecutor(threads) as ex:
            list(ex.map(lambda b: kernel(*args, b[0], b[1], out), _blocks(n, threads * 4)))
    return out


def cantor_bowen_matrix(bits, lengths, weights, impl=None):
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    lengths = np.ascontiguousarray(lengths, dtype=np.int32)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if weights.shape[0] < bits.shape[2]:
        raise ValueError("weights shorter than the widest truncation")
    return _dispatch("cantor_bowen_block", bits.shape[0], bits, lengths,
                     weights[:bits.shape[2]].copy(), impl=impl)


def interval_bowen_matrix(orbits, impl=None):
    orbits = np.ascontiguousarray(orbits, dtype=np.float64)
    return _dispatch("interval_bowen_block", orbits.shape[0], orbits, impl=impl)


def first_fit(dmat, eps, impl=None):
    return (impl or _impl).first_fit(np.ascontiguousarray(dmat, dtype=np.float64), float(eps))


def greedy_set_cover(cover, impl=None):
    return (impl or _impl).greedy_set_cover(np.ascontiguousarray(cover, dtype=bool))


def max_clique(adj, impl=None):
    return (impl or _impl).max_clique(np.ascontiguousarray(adj, dtype=bool))
