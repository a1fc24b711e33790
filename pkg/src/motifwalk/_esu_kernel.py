"""Compiled ESU counting over CSR adjacency.

Counts every connected induced k-node subgraph by its key in *discovery
order* (position 0 is the ESU root, position i the i-th added node). Keys
in discovery order are isomorphic relabelings of the sorted-order key, so
class totals are unaffected.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _lookup(indptr, indices, labels, u, v):
    lo = indptr[u]
    hi = indptr[u + 1]
    while lo < hi:
        mid = (lo + hi) >> 1
        x = indices[mid]
        if x < v:
            lo = mid + 1
        elif x > v:
            hi = mid
        else:
            return labels[mid]
    return 0


@njit(cache=True)
def esu_count_keys(indptr, indices, labels, k, base, weights, roots, counts):
    """Add the key counts of all k-CISes rooted at ``roots`` into ``counts``.

    ``weights[i, j]`` is the positional weight of pair ``(i, j)``.
    Returns the number of subgraphs counted.
    """
    n = indptr.shape[0] - 1
    maxdeg = 0
    for v in range(n):
        d = indptr[v + 1] - indptr[v]
        if d > maxdeg:
            maxdeg = d
    cap = k * maxdeg + 1
    ext = np.empty((k + 1, cap), dtype=np.int64)
    extlen = np.zeros(k + 1, dtype=np.int64)
    pos = np.zeros(k + 1, dtype=np.int64)
    keyat = np.zeros(k + 1, dtype=np.int64)
    sub = np.empty(k, dtype=np.int64)
    mark = np.zeros(n, dtype=np.int32)
    total = 0
    for ri in range(roots.shape[0]):
        v = roots[ri]
        sub[0] = v
        mark[v] += 1
        m = 0
        for t in range(indptr[v], indptr[v + 1]):
            u = indices[t]
            mark[u] += 1
            if u > v:
                ext[1, m] = u
                m += 1
        extlen[1] = m
        pos[1] = 0
        keyat[1] = 0
        d = 1
        while d >= 1:
            if pos[d] >= extlen[d]:
                # level exhausted: drop the node added to reach it
                d -= 1
                if d >= 1:
                    w = sub[d]
                    mark[w] -= 1
                    for t in range(indptr[w], indptr[w + 1]):
                        mark[indices[t]] -= 1
                continue
            i = pos[d]
            w = ext[d, i]
            pos[d] = i + 1
            key = keyat[d]
            for j in range(d):
                key += _lookup(indptr, indices, labels, sub[j], w) * weights[j, d]
            if d + 1 == k:
                counts[key] += 1
                total += 1
                continue
            # child extension: remaining siblings plus w's exclusive neighbors
            m = 0
            for t in range(i + 1, extlen[d]):
                ext[d + 1, m] = ext[d, t]
                m += 1
            for t in range(indptr[w], indptr[w + 1]):
                u = indices[t]
                if u > v and mark[u] == 0:
                    ext[d + 1, m] = u
                    m += 1
            sub[d] = w
            mark[w] += 1
            for t in range(indptr[w], indptr[w + 1]):
                mark[indices[t]] += 1
            extlen[d + 1] = m
            pos[d + 1] = 0
            keyat[d + 1] = key
            d += 1
        mark[v] -= 1
        for t in range(indptr[v], indptr[v + 1]):
            mark[indices[t]] -= 1
    return total
