"""numpy/pure-Python implementations of the hot kernels.

Used when the compiled extension is unavailable; the compiled module exposes
the same functions with the same outputs.
"""
import numpy as np


def cantor_bowen_block(bits, lengths, weights, r0, r1, out):
    """Fill out[r0:r1] with Bowen distances under the weighted Hamming metric.

    bits: uint8 (P, T, L); lengths: int32 (P, T); weights: float64 (L,).
    At each time only the common prefix of the two truncations counts.
    Positions are added in ascending order so that rounding matches the
    compiled kernel exactly.
    """
    p, t_len, width = bits.shape
    for t in range(t_len):
        rows = bits[r0:r1, t, :]
        cols = bits[:, t, :]
        common = np.minimum.outer(lengths[r0:r1, t], lengths[:, t])
        acc = np.zeros((r1 - r0, p))
        for m in range(int(common.max(initial=0))):
            hit = (rows[:, m][:, None] != cols[:, m][None, :]) & (m < common)
            acc += weights[m] * hit
        np.maximum(out[r0:r1], acc, out=out[r0:r1])


def interval_bowen_block(orbits, r0, r1, out):
    """out[i, j] = max_t |x_i(t) - x_j(t)| for i in [r0, r1)."""
    blk = np.abs(orbits[r0:r1, None, :] - orbits[None, :, :]).max(axis=2)
    out[r0:r1] = blk


def first_fit(dmat, eps):
    """Indices kept by a first-fit scan that admits strictly-farther points."""
    kept = []
    for i in range(dmat.shape[0]):
        if not kept or bool(np.all(dmat[i, kept] > eps)):
            kept.append(i)
    return kept


def greedy_set_cover(cover):
    """Greedy set cover: cover[c, x] says candidate c covers point x.

    Each step takes the candidate covering the most uncovered points, lowest
    index on ties.  Every point must cover itself.
    """
    cover = np.asarray(cover, dtype=bool)
    n = cover.shape[1]
    uncovered = np.ones(n, dtype=bool)
    gain = cover.sum(axis=1).astype(np.int64)
    chosen = []
    while uncovered.any():
        c = int(np.argmax(gain))
        if gain[c] == 0:
            raise ValueError("set cover candidates do not cover every point")
        newly = cover[c] & uncovered
        chosen.append(c)
        uncovered &= ~newly
        gain -= cover[:, newly].sum(axis=1)
    return chosen


def max_clique(adj):
    """Size of a maximum clique; adj is a symmetric boolean matrix (<= 64 nodes)."""
    n = adj.shape[0]
    nbr = [0] * n
    for i in range(n):
        m = 0
        for j in range(n):
            if i != j and adj[i, j]:
                m |= 1 << j
        nbr[i] = m
    best = [0]

    def colour_bound(cand):
        # greedy colouring gives an upper bound on the clique within cand
        order, bounds = [], []
        colour = 0
        rest = cand
        while rest:
            colour += 1
            avail = rest
            while avail:
                v = (avail & -avail).bit_length() - 1
                avail &= ~(1 << v)
                avail &= ~nbr[v]
                rest &= ~(1 << v)
                order.append(v)
                bounds.append(colour)
        return order, bounds

    def expand(size, cand):
        order, bounds = colour_bound(cand)
        for idx in range(len(order) - 1, -1, -1):
            if size + bounds[idx] <= best[0]:
                return
            v = order[idx]
            new = cand & nbr[v]
            if new:
                expand(size + 1, new)
            elif size + 1 > best[0]:
                best[0] = size + 1
            cand &= ~(1 << v)

    if n:
        expand(0, (1 << n) - 1)
    return best[0]
