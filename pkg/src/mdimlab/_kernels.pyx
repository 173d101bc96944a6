# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in _pykernels."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()


def cantor_bowen_block(const unsigned char[:, :, ::1] bits, const int[:, ::1] lengths,
                       const double[::1] weights, Py_ssize_t r0, Py_ssize_t r1,
                       double[:, ::1] out):
    # positions are summed in ascending order, matching the numpy fallback bit for bit
    cdef Py_ssize_t p = bits.shape[0], tl = bits.shape[1]
    cdef Py_ssize_t i, j, t, m, common
    cdef double acc, best
    cdef const unsigned char *a
    cdef const unsigned char *b
    with nogil:
        for i in range(r0, r1):
            for j in range(p):
                best = out[i, j]
                for t in range(tl):
                    common = lengths[i, t]
                    if lengths[j, t] < common:
                        common = lengths[j, t]
                    a = &bits[i, t, 0]
                    b = &bits[j, t, 0]
                    acc = 0.0
                    for m in range(common):
                        acc = acc + weights[m] * <double>(a[m] ^ b[m])
                    if acc > best:
                        best = acc
                out[i, j] = best


def interval_bowen_block(const double[:, ::1] orbits, Py_ssize_t r0, Py_ssize_t r1,
                         double[:, ::1] out):
    cdef Py_ssize_t p = orbits.shape[0], tl = orbits.shape[1]
    cdef Py_ssize_t i, j, t
    cdef double d, best
    with nogil:
        for i in range(r0, r1):
            for j in range(p):
                best = 0.0
                for t in range(tl):
                    d = orbits[i, t] - orbits[j, t]
                    if d < 0:
                        d = -d
                    if d > best:
                        best = d
                out[i, j] = best


def first_fit(const double[:, ::1] dmat, double eps):
    cdef Py_ssize_t n = dmat.shape[0], i, q
    cdef cnp.ndarray[cnp.int64_t, ndim=1] kept = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t nk = 0
    cdef bint ok
    for i in range(n):
        ok = True
        for q in range(nk):
            if not dmat[i, kept[q]] > eps:
                ok = False
                break
        if ok:
            kept[nk] = i
            nk += 1
    return [int(kept[q]) for q in range(nk)]


def greedy_set_cover(cover):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2, cast=True] cv = np.ascontiguousarray(cover, dtype=np.uint8)
    cdef Py_ssize_t nc = cv.shape[0], n = cv.shape[1], c, x, y, best_c
    cdef cnp.ndarray[cnp.int64_t, ndim=1] gain = cv.sum(axis=1).astype(np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] unc = np.ones(n, dtype=np.uint8)
    cdef Py_ssize_t left = n
    cdef int64_t best_g
    chosen = []
    while left > 0:
        best_c = 0
        best_g = gain[0]
        for c in range(1, nc):
            if gain[c] > best_g:
                best_g = gain[c]
                best_c = c
        if best_g == 0:
            raise ValueError("set cover candidates do not cover every point")
        chosen.append(int(best_c))
        for x in range(n):
            if unc[x] and cv[best_c, x]:
                unc[x] = 0
                left -= 1
                for y in range(nc):
                    if cv[y, x]:
                        gain[y] -= 1
    return chosen


cdef inline int _lowbit(uint64_t m) nogil:
    cdef int v = 0
    while not (m & 1):
        m >>= 1
        v += 1
    return v


cdef void _expand(int size, uint64_t cand, uint64_t* nbr, int* best) nogil:
    cdef int order[64]
    cdef int bounds[64]
    cdef int cnt = 0, colour = 0, v, idx
    cdef uint64_t rest = cand, avail, new
    while rest:
        colour += 1
        avail = rest
        while avail:
            v = _lowbit(avail)
            avail &= ~((<uint64_t>1) << v)
            avail &= ~nbr[v]
            rest &= ~((<uint64_t>1) << v)
            order[cnt] = v
            bounds[cnt] = colour
            cnt += 1
    for idx in range(cnt - 1, -1, -1):
        if size + bounds[idx] <= best[0]:
            return
        v = order[idx]
        new = cand & nbr[v]
        if new:
            _expand(size + 1, new, nbr, best)
        elif size + 1 > best[0]:
            best[0] = size + 1
        cand &= ~((<uint64_t>1) << v)


def max_clique(adj):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2, cast=True] a = np.ascontiguousarray(adj, dtype=np.uint8)
    cdef Py_ssize_t n = a.shape[0], i, j
    if n > 64:
        raise ValueError("max_clique supports at most 64 nodes")
    cdef uint64_t nbr[64]
    cdef int best = 0
    for i in range(n):
        nbr[i] = 0
        for j in range(n):
            if i != j and a[i, j]:
                nbr[i] |= (<uint64_t>1) << j
    if n:
        if n == 64:
            _expand(0, ~(<uint64_t>0), nbr, &best)
        else:
            _expand(0, ((<uint64_t>1) << n) - 1, nbr, &best)
    return best
