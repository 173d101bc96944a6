"""Compiled kernels against the numpy fallback on identical inputs.

    python benchmarks/bench_kernels.py [--sizes 256,1024] [--repeat 3] [--csv out.csv]

Rows are deterministic apart from the timing columns; every row also checks
that both backends return identical results.
"""
import argparse
import csv
import sys
import time

import numpy as np

from mdimlab import _pykernels, kernels
from mdimlab.metric_core import CantorPoint, cantor_weights
from mdimlab.symbolic import TowerPsi, encode_orbits


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(size, rng):
    sys_ = TowerPsi(1)
    pts = [CantorPoint.from_bits(rng.integers(0, 2, 40).tolist()) for _ in range(size)]
    bits, lengths = encode_orbits(sys_, pts, 3)
    weights = cantor_weights(3.0, bits.shape[2])
    orbits = rng.random((size, 4))
    dmat = kernels.interval_bowen_matrix(orbits)
    adj_n = min(size, 48)
    adj = rng.random((adj_n, adj_n)) < 0.5
    adj = np.triu(adj, 1)
    adj = adj | adj.T
    cover = dmat < 0.2
    np.fill_diagonal(cover, True)
    yield "cantor_bowen_matrix", lambda impl: kernels.cantor_bowen_matrix(
        bits, lengths, weights, impl=impl)
    yield "interval_bowen_matrix", lambda impl: kernels.interval_bowen_matrix(orbits, impl=impl)
    yield "first_fit", lambda impl: kernels.first_fit(dmat, 0.1, impl=impl)
    yield "greedy_set_cover", lambda impl: kernels.greedy_set_cover(cover, impl=impl)
    yield f"max_clique_{adj_n}", lambda impl: kernels.max_clique(adj, impl=impl)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="256,1024")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv")
    args = ap.parse_args(argv)
    if kernels.BACKEND != "cython":
        print("compiled kernels unavailable; nothing to compare", file=sys.stderr)
        return 1
    compiled = kernels._impl
    rows = []
    for size in (int(s) for s in args.sizes.split(",")):
        rng = np.random.default_rng(args.seed)
        for name, run in cases(size, rng):
            tc, rc = _best(lambda: run(compiled), args.repeat)
            tp, rp = _best(lambda: run(_pykernels), args.repeat)
            same = bool(np.array_equal(np.asarray(rc), np.asarray(rp)))
            rows.append((name, size, tc, tp, tp / tc if tc > 0 else float("inf"), same))
    w = csv.writer(open(args.csv, "w", newline="") if args.csv else sys.stdout)
    w.writerow(["kernel", "n", "cython_s", "python_s", "speedup", "identical"])
    for name, size, tc, tp, sp, same in rows:
        w.writerow([name, size, f"{tc:.6f}", f"{tp:.6f}", f"{sp:.1f}", same])
    return 0 if all(r[-1] for r in rows) else 2


if __name__ == "__main__":
    raise SystemExit(main())
