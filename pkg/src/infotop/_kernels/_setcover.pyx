# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled set-cover kernels.

Same search as ``_setcover_py`` (reduction, greedy bound, branch on the
rarest uncovered cell, gain-ordered branching) over fixed-width uint64 words.
"""
from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy

from ._setcover_py import _greedy, _reduce

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

cdef enum:
    WORD = 64

cdef struct Ctx:
    uint64_t* cands
    int C
    int W
    int* cell_start
    int* cell_items
    uint64_t* unc
    int* chosen
    int* best
    int best_len
    int* order
    int* gain


cdef inline int popc(uint64_t x) nogil:
    return __builtin_popcountll(x)


cdef void _search(Ctx* c, int depth) noexcept nogil:
    cdef int W = c.W
    cdef uint64_t* unc = c.unc + depth * W
    cdef uint64_t* nxt
    cdef uint64_t x
    cdef int w, j, k, g, cnt = 0, maxgain = 0, lb, room, pick = -1, fewest = 0x7fffffff
    cdef int b, n, start, t, tg
    cdef int* order
    cdef int* gain
    for w in range(W):
        cnt += popc(unc[w])
    if cnt == 0:
        if depth < c.best_len:
            memcpy(c.best, c.chosen, depth * sizeof(int))
            c.best_len = depth
        return
    room = c.best_len - depth
    if room <= 1:
        return
    for j in range(c.C):
        g = 0
        for w in range(W):
            g += popc(c.cands[j * W + w] & unc[w])
        if g > maxgain:
            maxgain = g
    lb = (cnt + maxgain - 1) // maxgain
    if lb >= room:
        return
    for w in range(W):
        x = unc[w]
        while x:
            b = __builtin_ctzll(x) + w * WORD
            n = c.cell_start[b + 1] - c.cell_start[b]
            if n < fewest:
                fewest = n
                pick = b
            x &= x - 1
    start = c.cell_start[pick]
    order = c.order + depth * c.C
    gain = c.gain + depth * c.C
    for k in range(fewest):
        j = c.cell_items[start + k]
        g = 0
        for w in range(W):
            g += popc(c.cands[j * W + w] & unc[w])
        # stable insertion: gain descending, index ascending
        t = k
        while t > 0 and gain[t - 1] < g:
            order[t] = order[t - 1]
            gain[t] = gain[t - 1]
            t -= 1
        order[t] = j
        gain[t] = g
    nxt = c.unc + (depth + 1) * W
    for k in range(fewest):
        j = order[k]
        for w in range(W):
            nxt[w] = unc[w] & ~c.cands[j * W + w]
        c.chosen[depth] = j
        _search(c, depth + 1)
        if c.best_len - depth <= 1:
            return


cdef void _to_words(object m, uint64_t* out, int W):
    cdef int w
    cdef object mask = 0xFFFFFFFFFFFFFFFF
    for w in range(W):
        out[w] = <uint64_t>((m >> (64 * w)) & mask)


def min_set_cover(masks, full):
    if full == 0:
        return []
    union = 0
    for m in masks:
        union |= m
    if union & full != full:
        return None
    cands, origin = _reduce(masks, full)
    greedy = _greedy(cands, full)
    cdef int C = len(cands)
    cdef int nbits = full.bit_length()
    cdef int W = (nbits + WORD - 1) // WORD
    cdef int D = len(greedy) + 1
    cdef Ctx c
    cdef int j, b, pos
    c.C = C
    c.W = W
    c.cands = <uint64_t*>malloc(C * W * sizeof(uint64_t))
    c.unc = <uint64_t*>malloc((D + 1) * W * sizeof(uint64_t))
    c.cell_start = <int*>malloc((nbits + 1) * sizeof(int))
    c.cell_items = <int*>malloc((C * nbits + 1) * sizeof(int))
    c.chosen = <int*>malloc(D * sizeof(int))
    c.best = <int*>malloc(D * sizeof(int))
    c.order = <int*>malloc(D * C * sizeof(int))
    c.gain = <int*>malloc(D * C * sizeof(int))
    try:
        for j in range(C):
            _to_words(cands[j], c.cands + j * W, W)
        _to_words(full, c.unc, W)
        pos = 0
        for b in range(nbits):
            c.cell_start[b] = pos
            if (full >> b) & 1:
                for j in range(C):
                    if (cands[j] >> b) & 1:
                        c.cell_items[pos] = j
                        pos += 1
        c.cell_start[nbits] = pos
        for j in range(len(greedy)):
            c.best[j] = greedy[j]
        c.best_len = len(greedy)
        with nogil:
            _search(&c, 0)
        return sorted(origin[c.best[j]] for j in range(c.best_len))
    finally:
        free(c.cands)
        free(c.unc)
        free(c.cell_start)
        free(c.cell_items)
        free(c.chosen)
        free(c.best)
        free(c.order)
        free(c.gain)


def covering_subsets(masks, full):
    cdef int n = len(masks)
    if n > 26:
        raise ValueError("subset enumeration is limited to 26 members")
    cdef int nbits = max(full.bit_length(), 1)
    cdef int W = (nbits + WORD - 1) // WORD
    cdef long long total = 1LL << n
    cdef long long s, prev
    cdef int w, low, ok
    cdef uint64_t* acc = <uint64_t*>malloc(total * W * sizeof(uint64_t))
    cdef uint64_t* mw = <uint64_t*>malloc((n if n else 1) * W * sizeof(uint64_t))
    cdef uint64_t* fw = <uint64_t*>malloc(W * sizeof(uint64_t))
    out = []
    try:
        for low in range(n):
            _to_words(masks[low], mw + low * W, W)
        _to_words(full, fw, W)
        for w in range(W):
            acc[w] = 0
        if full == 0:
            out.append(0)
        for s in range(1, total):
            low = __builtin_ctzll(<unsigned long long>s)
            prev = s & (s - 1)
            ok = 1
            for w in range(W):
                acc[s * W + w] = acc[prev * W + w] | mw[low * W + w]
                if (acc[s * W + w] & fw[w]) != fw[w]:
                    ok = 0
            if ok:
                out.append(s)
        return out
    finally:
        free(acc)
        free(mw)
        free(fw)
