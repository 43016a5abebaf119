"""Pure-Python set-cover kernels over integer bitmasks.

Reference implementation; ``_setcover.pyx`` runs the same search with
fixed-width word arrays.  Both return identical index lists.
"""


def _reduce(masks, full):
    """Drop empty, duplicated and dominated masks; keep the lowest index."""
    seen = {}
    for i, m in enumerate(masks):
        m &= full
        if m and m not in seen:
            seen[m] = i
    items = sorted(seen.items(), key=lambda kv: (-kv[0].bit_count(), kv[1]))
    kept = []
    for m, i in items:
        if not any(m | k == k for k, _ in kept):
            kept.append((m, i))
    kept.sort(key=lambda kv: kv[1])
    return [m for m, _ in kept], [i for _, i in kept]


def _greedy(cands, full):
    uncovered = full
    chosen = []
    while uncovered:
        best, best_gain = -1, 0
        for j, m in enumerate(cands):
            g = (m & uncovered).bit_count()
            if g > best_gain:
                best, best_gain = j, g
        chosen.append(best)
        uncovered &= ~cands[best]
    return chosen


def min_set_cover(masks, full):
    """Indices of a minimum-cardinality subfamily whose union contains ``full``.

    Returns None when even the whole family misses a bit of ``full``; an
    empty list when ``full`` is 0.
    """
    if full == 0:
        return []
    union = 0
    for m in masks:
        union |= m
    if union & full != full:
        return None
    cands, origin = _reduce(masks, full)
    best = _greedy(cands, full)
    nbits = full.bit_length()
    cell_lists = {}
    for b in range(nbits):
        bit = 1 << b
        if full & bit:
            cell_lists[b] = [j for j, m in enumerate(cands) if m & bit]
    best_holder = [list(best)]

    def search(uncovered, chosen):
        if not uncovered:
            if len(chosen) < len(best_holder[0]):
                best_holder[0] = list(chosen)
            return
        room = len(best_holder[0]) - len(chosen)
        if room <= 1:
            return
        maxgain = 0
        for m in cands:
            g = (m & uncovered).bit_count()
            if g > maxgain:
                maxgain = g
        lb = -(-uncovered.bit_count() // maxgain)
        if lb >= room:
            return
        pick, fewest = -1, None
        u = uncovered
        while u:
            low = u & -u
            b = low.bit_length() - 1
            c = len(cell_lists[b])
            if fewest is None or c < fewest:
                pick, fewest = b, c
            u ^= low
        branch = sorted(cell_lists[pick], key=lambda j: (-(cands[j] & uncovered).bit_count(), j))
        for j in branch:
            chosen.append(j)
            search(uncovered & ~cands[j], chosen)
            chosen.pop()

    search(full, [])
    return sorted(origin[j] for j in best_holder[0])


def covering_subsets(masks, full):
    """Every subset (as an index bitmask) of ``masks`` whose union contains ``full``.

    Subsets are listed in increasing bitmask order; the empty subset counts
    only when ``full`` is 0.
    """
    n = len(masks)
    out = []
    for s in range(1 << n):
        acc = 0
        t = s
        while t:
            low = t & -t
            acc |= masks[low.bit_length() - 1]
            t ^= low
        if acc & full == full:
            out.append(s)
    return out
