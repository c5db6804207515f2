"""The six node-centrality measures over a QRGraph.

Defaults work on the unweighted directed structure. ``weighted=True`` turns
edge weights into path lengths ``1/weight`` for the path-based measures and
into transition/adjacency weights for PageRank and eigenvector centrality.
``undirected=True`` symmetrises the edge set first.
"""

from __future__ import annotations

import logging
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import _kernels
from .builder import QRGraph

log = logging.getLogger(__name__)

MEASURES = ("degree", "betweenness", "closeness", "pagerank", "eigenvector", "harmonic")

# fixed source-block size; block boundaries never depend on the thread count
BLOCK_SIZE = 128


class PageRankNotConverged(RuntimeError):
    def __init__(self, scores: np.ndarray, residual: float, iterations: int):
        super().__init__(f"PageRank did not converge in {iterations} iterations "
                         f"(L1 residual {residual:.3e})")
        self.scores = scores
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class Adjacency:
    """Index-space CSR view of a graph, in both directions."""

    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    out_ptr: np.ndarray
    out_idx: np.ndarray
    out_w: np.ndarray
    in_ptr: np.ndarray
    in_idx: np.ndarray
    in_w: np.ndarray

    @classmethod
    def from_graph(cls, g: QRGraph, undirected: bool = False) -> Adjacency:
        src, dst, w = g.edge_arrays()
        if undirected:
            src, dst, w = _symmetrise(g.n, src, dst, w)
        out_ptr, out_idx, out_w = _csr(g.n, src, dst, w)
        in_ptr, in_idx, in_w = _csr(g.n, dst, src, w)
        return cls(g.n, src, dst, w, out_ptr, out_idx, out_w, in_ptr, in_idx, in_w)

    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_ptr)

    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_ptr)


def _symmetrise(n, src, dst, w):
    # reciprocal pairs merge into one undirected edge carrying the summed weight
    a = np.minimum(src, dst)
    b = np.maximum(src, dst)
    key = a * n + b
    uniq, inv = np.unique(key, return_inverse=True)
    wsum = np.bincount(inv, weights=w, minlength=len(uniq))
    ua, ub = uniq // n, uniq % n
    return (np.concatenate([ua, ub]), np.concatenate([ub, ua]),
            np.concatenate([wsum, wsum]))


def _csr(n, rows, cols, vals):
    order = np.lexsort((cols, rows))
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=ptr[1:])
    return ptr, np.ascontiguousarray(cols[order]), np.ascontiguousarray(vals[order])


def _blocks(n: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + BLOCK_SIZE, n)) for lo in range(0, n, BLOCK_SIZE)]


def _resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = os.cpu_count() or 1
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    return threads


def _run_blocks(fn, blocks, threads):
    """Apply ``fn(lo, hi)`` over blocks; results come back in block order."""
    if threads == 1 or len(blocks) <= 1:
        return [fn(lo, hi) for lo, hi in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda b: fn(*b), blocks))


def _adjacency(g, adj, undirected):
    return adj if adj is not None else Adjacency.from_graph(g, undirected)


def degree_centrality(g: QRGraph, *, undirected: bool = False,
                      adj: Adjacency | None = None) -> np.ndarray:
    """(distinct in-neighbours + distinct out-neighbours) / (n - 1).

    In undirected mode each neighbour counts once.
    """
    if g.n < 2:
        raise ValueError("degree centrality needs at least 2 nodes")
    a = _adjacency(g, adj, undirected)
    deg = a.out_degree() if undirected else a.out_degree() + a.in_degree()
    return deg / (g.n - 1)


def betweenness_centrality(g: QRGraph, *, weighted: bool = False, undirected: bool = False,
                           threads: int | None = None, adj: Adjacency | None = None) -> np.ndarray:
    """Brandes betweenness normalised by (n-1)(n-2)."""
    n = g.n
    if n < 3:
        if n:
            warnings.warn("betweenness is identically zero for fewer than 3 nodes", stacklevel=2)
        return np.zeros(n)
    a = _adjacency(g, adj, undirected)
    if weighted:
        lengths = 1.0 / a.out_w
        fn = lambda lo, hi: _kernels.brandes_block_weighted(a.out_ptr, a.out_idx, lengths, lo, hi)
    else:
        fn = lambda lo, hi: _kernels.brandes_block(a.out_ptr, a.out_idx, lo, hi)
    total = np.zeros(n)
    for part in _run_blocks(fn, _blocks(n), _resolve_threads(threads)):
        total += part
    return total / ((n - 1) * (n - 2))


def _incoming_sums(a: Adjacency, weighted: bool, threads: int | None):
    if weighted:
        lengths = 1.0 / a.in_w
        fn = lambda lo, hi: _kernels.reach_sums_block_weighted(a.in_ptr, a.in_idx, lengths, lo, hi)
    else:
        fn = lambda lo, hi: _kernels.reach_sums_block(a.in_ptr, a.in_idx, lo, hi)
    parts = _run_blocks(fn, _blocks(a.n), _resolve_threads(threads))
    if not parts:
        return np.zeros(0, dtype=np.int64), np.zeros(0), np.zeros(0)
    return tuple(np.concatenate(col) for col in zip(*parts))


def _closeness_from_sums(n, reached, total):
    out = np.zeros(n)
    ok = reached > 0
    k = reached[ok].astype(np.float64)
    out[ok] = (k / total[ok]) * (k / (n - 1))
    return out


def closeness_centrality(g: QRGraph, *, weighted: bool = False, undirected: bool = False,
                         threads: int | None = None, adj: Adjacency | None = None) -> np.ndarray:
    """Incoming-distance closeness scaled by the reachable fraction.

    With k nodes able to reach v at total distance S: (k/S) * (k/(n-1)), and 0
    when nothing reaches v.
    """
    if g.n < 2:
        raise ValueError("closeness centrality needs at least 2 nodes")
    reached, total, _ = _incoming_sums(_adjacency(g, adj, undirected), weighted, threads)
    return _closeness_from_sums(g.n, reached, total)


def harmonic_centrality(g: QRGraph, *, weighted: bool = False, undirected: bool = False,
                        threads: int | None = None, adj: Adjacency | None = None) -> np.ndarray:
    """Sum of 1/d(u, v) over all u that reach v. Not normalised."""
    _, _, harm = _incoming_sums(_adjacency(g, adj, undirected), weighted, threads)
    return harm


@dataclass
class IterationInfo:
    iterations: int
    converged: bool
    residual: float
    degenerate: bool = False


def pagerank(g: QRGraph, damping: float = 0.85, tol: float = 1e-9, max_iter: int = 1000, *,
             weighted: bool = False, undirected: bool = False,
             adj: Adjacency | None = None) -> tuple[np.ndarray, IterationInfo]:
    """Power iteration with uniform teleport and uniform dangling redistribution.

    Stops when the L1 change between sweeps drops below ``tol``; raises
    PageRankNotConverged (carrying the last iterate) otherwise.
    """
    n = g.n
    if n < 1:
        raise ValueError("PageRank needs at least 1 node")
    if not 0 < damping < 1:
        raise ValueError(f"damping must lie in (0, 1), got {damping}")
    a = _adjacency(g, adj, undirected)
    w = a.weight if weighted else np.ones_like(a.weight)
    out_w = np.bincount(a.src, weights=w, minlength=n)
    dangling = out_w == 0
    share = np.zeros_like(w)
    if len(w):
        share = w / out_w[a.src]

    x = np.full(n, 1.0 / n)
    residual = np.inf
    for it in range(1, max_iter + 1):
        flow = np.bincount(a.dst, weights=x[a.src] * share, minlength=n)
        nxt = damping * (flow + x[dangling].sum() / n) + (1.0 - damping) / n
        nxt /= nxt.sum()
        residual = float(np.abs(nxt - x).sum())
        x = nxt
        if residual < tol:
            return x, IterationInfo(it, True, residual)
    raise PageRankNotConverged(x, residual, max_iter)


def is_acyclic(a: Adjacency) -> bool:
    indeg = a.in_degree().copy()
    stack = list(np.flatnonzero(indeg == 0))
    seen = 0
    while stack:
        v = stack.pop()
        seen += 1
        for w in a.out_idx[a.out_ptr[v]:a.out_ptr[v + 1]]:
            indeg[w] -= 1
            if indeg[w] == 0:
                stack.append(w)
    return seen == a.n


def eigenvector_centrality(g: QRGraph, tol: float = 1e-9, max_iter: int = 1000, *,
                           weighted: bool = False, undirected: bool = False,
                           adj: Adjacency | None = None) -> tuple[np.ndarray, IterationInfo]:
    """Dominant eigenvector of the in-edge structure, unit L2 norm.

    Iterates x <- x + A^T x from the uniform vector; the identity shift leaves
    the eigenvector unchanged but removes the oscillation periodic graphs cause.
    Acyclic graphs (nilpotent adjacency) and runs that do not settle within
    ``max_iter`` sweeps come back as all-zero with ``degenerate`` set.
    """
    n = g.n
    if n < 1:
        raise ValueError("eigenvector centrality needs at least 1 node")
    a = _adjacency(g, adj, undirected)
    if is_acyclic(a):
        return np.zeros(n), IterationInfo(0, False, float("nan"), degenerate=True)
    w = a.weight if weighted else np.ones_like(a.weight)

    x = np.full(n, 1.0 / np.sqrt(n))
    residual = np.inf
    for it in range(1, max_iter + 1):
        nxt = x + np.bincount(a.dst, weights=x[a.src] * w, minlength=n)
        nxt /= np.linalg.norm(nxt)
        residual = float(np.abs(nxt - x).max())
        x = nxt
        if residual < tol:
            return x, IterationInfo(it, True, residual)
    log.warning("eigenvector iteration did not settle (residual %.3e); flagged degenerate", residual)
    return np.zeros(n), IterationInfo(max_iter, False, residual, degenerate=True)


def all_pairs_hop_distances(g: QRGraph) -> Iterator[tuple[int, dict[int, int]]]:
    """Yield ``(u, {v: d(u, v)})`` per node by BFS over out-edges; d(u, u) = 0."""
    a = Adjacency.from_graph(g)
    ids = g.nodes
    for s in range(a.n):
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                for w in a.out_idx[a.out_ptr[v]:a.out_ptr[v + 1]]:
                    w = int(w)
                    if w not in dist:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            frontier = nxt
        yield ids[s], {ids[v]: d for v, d in dist.items()}


@dataclass
class CentralityTable:
    nodes: tuple[int, ...]
    degree: np.ndarray
    betweenness: np.ndarray
    closeness: np.ndarray
    pagerank: np.ndarray
    eigenvector: np.ndarray
    harmonic: np.ndarray
    convergence_info: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in MEASURES:
            if len(getattr(self, name)) != len(self.nodes):
                raise ValueError(f"{name} has {len(getattr(self, name))} scores "
                                 f"for {len(self.nodes)} nodes")

    def column(self, name: str) -> np.ndarray:
        return getattr(self, name)

    @property
    def converged(self) -> bool:
        return bool(self.convergence_info.get("pagerank_converged", True))


def compute_centralities(g: QRGraph, *, damping: float = 0.85, tol: float = 1e-9,
                         max_iter: int = 1000, weighted: bool = False, undirected: bool = False,
                         threads: int | None = None) -> CentralityTable:
    """All six measures in one pass over a shared adjacency.

    PageRank non-convergence does not raise here: the last iterate is kept and
    ``convergence_info['pagerank_converged']`` is False.
    """
    n = g.n
    if n == 0:
        empty = np.zeros(0)
        return CentralityTable((), *(empty,) * 6, convergence_info={
            "pagerank_iterations": 0, "pagerank_converged": True,
            "eigenvector_iterations": 0, "eigenvector_converged": True,
            "eigenvector_degenerate": False})
    a = Adjacency.from_graph(g, undirected)
    deg = degree_centrality(g, adj=a, undirected=undirected)
    btw = betweenness_centrality(g, weighted=weighted, threads=threads, adj=a)
    reached, total, harm = _incoming_sums(a, weighted, threads)
    clo = _closeness_from_sums(n, reached, total)
    try:
        pr, pr_info = pagerank(g, damping, tol, max_iter, weighted=weighted, adj=a)
    except PageRankNotConverged as exc:
        pr, pr_info = exc.scores, IterationInfo(exc.iterations, False, exc.residual)
    ev, ev_info = eigenvector_centrality(g, tol, max_iter, weighted=weighted, adj=a)
    info = {
        "pagerank_iterations": pr_info.iterations,
        "pagerank_converged": pr_info.converged,
        "pagerank_residual": pr_info.residual,
        "eigenvector_iterations": ev_info.iterations,
        "eigenvector_converged": ev_info.converged,
        "eigenvector_degenerate": ev_info.degenerate,
    }
    return CentralityTable(g.nodes, deg, btw, clo, pr, ev, harm, info)
