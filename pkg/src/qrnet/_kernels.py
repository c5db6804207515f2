"""Compiled traversal kernels over CSR adjacency.

Every kernel handles a contiguous block of source nodes and releases the GIL,
so blocks can be dispatched to a thread pool. Within a block the arithmetic
order is fixed by the CSR layout, which keeps results independent of how many
threads run the blocks.
"""

from __future__ import annotations

import heapq

import numpy as np
from numba import njit


@njit(nogil=True, cache=True)
def brandes_block(indptr, indices, start, stop):
    """Unnormalised betweenness contributions of sources ``start..stop-1`` (BFS)."""
    n = indptr.shape[0] - 1
    bc = np.zeros(n)
    sigma = np.zeros(n)
    delta = np.zeros(n)
    dist = np.full(n, -1, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    for s in range(start, stop):
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = order[head]
            head += 1
            dv = dist[v]
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
        # successor-side accumulation: no predecessor lists needed
        for i in range(tail - 1, -1, -1):
            v = order[i]
            dv = dist[v]
            acc = 0.0
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if dist[w] == dv + 1:
                    acc += sigma[v] / sigma[w] * (1.0 + delta[w])
            delta[v] = acc
            if v != s:
                bc[v] += acc
        for i in range(tail):
            v = order[i]
            dist[v] = -1
            sigma[v] = 0.0
            delta[v] = 0.0
    return bc


@njit(nogil=True, cache=True)
def brandes_block_weighted(indptr, indices, lengths, start, stop):
    """Dijkstra variant of :func:`brandes_block`; ``lengths`` are edge lengths."""
    n = indptr.shape[0] - 1
    bc = np.zeros(n)
    sigma = np.zeros(n)
    delta = np.zeros(n)
    dist = np.full(n, np.inf)
    done = np.zeros(n, dtype=np.bool_)
    order = np.empty(n, dtype=np.int64)
    touched = np.empty(n, dtype=np.int64)
    for s in range(start, stop):
        dist[s] = 0.0
        sigma[s] = 1.0
        touched[0] = s
        ntouched = 1
        heap = [(0.0, s)]
        tail = 0
        while len(heap) > 0:
            d, v = heapq.heappop(heap)
            if done[v] or d > dist[v]:
                continue
            done[v] = True
            order[tail] = v
            tail += 1
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                nd = d + lengths[p]
                if nd < dist[w]:
                    if dist[w] == np.inf:
                        touched[ntouched] = w
                        ntouched += 1
                    dist[w] = nd
                    sigma[w] = sigma[v]
                    heapq.heappush(heap, (nd, w))
                elif nd == dist[w] and not done[w]:
                    sigma[w] += sigma[v]
        for i in range(tail - 1, -1, -1):
            v = order[i]
            acc = 0.0
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if done[w] and dist[v] + lengths[p] == dist[w]:
                    acc += sigma[v] / sigma[w] * (1.0 + delta[w])
            delta[v] = acc
            if v != s:
                bc[v] += acc
        for i in range(ntouched):
            v = touched[i]
            dist[v] = np.inf
            done[v] = False
            sigma[v] = 0.0
            delta[v] = 0.0
    return bc


@njit(nogil=True, cache=True)
def reach_sums_block(indptr, indices, start, stop):
    """For each root in the block: (count reached, sum of hops, sum of 1/hops).

    Run on the reversed graph this yields the incoming-distance sums that
    closeness and harmonic centrality need.
    """
    n = indptr.shape[0] - 1
    m = stop - start
    reached = np.zeros(m, dtype=np.int64)
    total = np.zeros(m)
    harmonic = np.zeros(m)
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for r in range(start, stop):
        dist[r] = 0
        queue[0] = r
        head = 0
        tail = 1
        hsum = 0.0
        dsum = 0.0
        while head < tail:
            v = queue[head]
            head += 1
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue[tail] = w
                    tail += 1
                    dsum += dist[w]
                    hsum += 1.0 / dist[w]
        reached[r - start] = tail - 1
        total[r - start] = dsum
        harmonic[r - start] = hsum
        for i in range(tail):
            dist[queue[i]] = -1
    return reached, total, harmonic


@njit(nogil=True, cache=True)
def reach_sums_block_weighted(indptr, indices, lengths, start, stop):
    n = indptr.shape[0] - 1
    m = stop - start
    reached = np.zeros(m, dtype=np.int64)
    total = np.zeros(m)
    harmonic = np.zeros(m)
    dist = np.full(n, np.inf)
    done = np.zeros(n, dtype=np.bool_)
    touched = np.empty(n, dtype=np.int64)
    for r in range(start, stop):
        dist[r] = 0.0
        touched[0] = r
        ntouched = 1
        heap = [(0.0, r)]
        count = 0
        dsum = 0.0
        hsum = 0.0
        while len(heap) > 0:
            d, v = heapq.heappop(heap)
            if done[v] or d > dist[v]:
                continue
            done[v] = True
            if v != r:
                count += 1
                dsum += d
                hsum += 1.0 / d
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                nd = d + lengths[p]
                if nd < dist[w]:
                    if dist[w] == np.inf:
                        touched[ntouched] = w
                        ntouched += 1
                    dist[w] = nd
                    heapq.heappush(heap, (nd, w))
        reached[r - start] = count
        total[r - start] = dsum
        harmonic[r - start] = hsum
        for i in range(ntouched):
            dist[touched[i]] = np.inf
            done[touched[i]] = False
    return reached, total, harmonic
