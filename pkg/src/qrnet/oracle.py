"""Slow, dense reference implementations used to check the real kernels.

Nothing here imports the centrality module or its compiled kernels. Graphs are
tiny boolean matrices and every measure is computed the most literal way:
Floyd-Warshall distances, explicit enumeration of shortest paths, an explicit
Google matrix, and repeated squaring for the eigenvector limit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_NODES = 12
MAX_BETWEENNESS_NODES = 8
UNREACHABLE = -1


@dataclass(frozen=True)
class DenseGraph:
    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be square")
        if a.diagonal().any():
            raise ValueError("self-loops are not allowed")
        object.__setattr__(self, "adjacency", a)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @classmethod
    def from_edges(cls, n: int, edges) -> DenseGraph:
        a = np.zeros((n, n), dtype=bool)
        for s, t in edges:
            a[s, t] = True
        return cls(a)


def _check_size(g: DenseGraph, cap: int):
    if g.n > cap:
        raise ValueError(f"oracle limited to {cap} nodes, got {g.n}")


def oracle_distances(g: DenseGraph) -> np.ndarray:
    """Floyd-Warshall hop counts; UNREACHABLE marks missing paths."""
    _check_size(g, MAX_NODES)
    n = g.n
    inf = n + 1
    d = np.where(g.adjacency, 1, inf)
    np.fill_diagonal(d, 0)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i, k] + d[k, j] < d[i, j]:
                    d[i, j] = d[i, k] + d[k, j]
    return np.where(d >= inf, UNREACHABLE, d)


def oracle_degree(g: DenseGraph) -> np.ndarray:
    a = g.adjacency
    return (a.sum(axis=0) + a.sum(axis=1)) / (g.n - 1)


def _shortest_paths(g: DenseGraph, d: np.ndarray, s: int, t: int) -> list[list[int]]:
    paths = []

    def walk(path):
        v = path[-1]
        if v == t:
            paths.append(list(path))
            return
        for w in range(g.n):
            if g.adjacency[v, w] and d[s, w] == d[s, v] + 1 and d[w, t] == d[v, t] - 1:
                path.append(w)
                walk(path)
                path.pop()

    walk([s])
    return paths


def oracle_betweenness(g: DenseGraph) -> np.ndarray:
    """Enumerate every shortest s->t path and count interior visits."""
    _check_size(g, MAX_BETWEENNESS_NODES)
    n = g.n
    out = np.zeros(n)
    if n < 3:
        return out
    d = oracle_distances(g)
    for s in range(n):
        for t in range(n):
            if s == t or d[s, t] == UNREACHABLE:
                continue
            paths = _shortest_paths(g, d, s, t)
            for v in range(n):
                if v in (s, t):
                    continue
                out[v] += sum(v in p for p in paths) / len(paths)
    return out / ((n - 1) * (n - 2))


def oracle_closeness(g: DenseGraph) -> np.ndarray:
    d = oracle_distances(g)
    n = g.n
    out = np.zeros(n)
    for v in range(n):
        incoming = [d[u, v] for u in range(n) if u != v and d[u, v] != UNREACHABLE]
        if incoming:
            k = len(incoming)
            out[v] = (k / sum(incoming)) * (k / (n - 1))
    return out


def oracle_harmonic(g: DenseGraph) -> np.ndarray:
    d = oracle_distances(g)
    n = g.n
    return np.array([sum(1.0 / d[u, v] for u in range(n) if u != v and d[u, v] != UNREACHABLE)
                     for v in range(n)])


def google_matrix(g: DenseGraph, damping: float) -> np.ndarray:
    """Column-stochastic G with G[i, j] = P(step j -> i)."""
    n = g.n
    a = g.adjacency.astype(float)
    out = a.sum(axis=1)
    s = np.empty((n, n))
    for j in range(n):
        s[:, j] = a[j] / out[j] if out[j] else 1.0 / n
    return damping * s + (1.0 - damping) / n


def oracle_pagerank(g: DenseGraph, damping: float = 0.85, tol: float = 1e-9) -> np.ndarray:
    _check_size(g, MAX_NODES)
    gm = google_matrix(g, damping)
    x = np.full(g.n, 1.0 / g.n)
    while True:
        nxt = gm @ x
        if np.abs(nxt - x).sum() < tol / 10:
            return nxt / nxt.sum()
        x = nxt


def _strong_components(reach: np.ndarray) -> list[list[int]]:
    n = reach.shape[0]
    comps, seen = [], set()
    for v in range(n):
        if v in seen:
            continue
        comp = [u for u in range(n) if u == v or (reach[v, u] and reach[u, v])]
        seen.update(comp)
        comps.append(comp)
    return comps


def eigenvector_is_degenerate(g: DenseGraph) -> bool:
    """True when power iteration from the uniform vector has no usable limit.

    That happens when the adjacency matrix is nilpotent (no cycles), or when
    the spectral radius is attained by two strong components one of which can
    reach the other (a defective dominant eigenvalue; iterates drift at a
    polynomial rate instead of settling).
    """
    a = g.adjacency.astype(float)
    n = g.n
    if not np.linalg.matrix_power(a, n).any():
        return True
    reach = oracle_distances(g) != UNREACHABLE
    comps = _strong_components(reach)
    radii = [max(abs(np.linalg.eigvals(a[np.ix_(c, c)]))) for c in comps]
    rho = max(radii)
    basic = [c for c, r in zip(comps, radii) if abs(r - rho) < 1e-9]
    for c1 in basic:
        for c2 in basic:
            if c1 is not c2 and reach[c1[0], c2[0]]:
                return True
    return False


def oracle_eigenvector(g: DenseGraph) -> np.ndarray | None:
    """Limit of normalised (I + A^T)^k 1 via repeated squaring; None when degenerate."""
    _check_size(g, MAX_NODES)
    if eigenvector_is_degenerate(g):
        return None
    m = np.eye(g.n) + g.adjacency.T.astype(float)
    # 2**24 effective sweeps; many more squarings amplify rounding between
    # tied dominant eigenvalues
    for _ in range(24):
        m = m @ m
        m /= np.abs(m).max()
    x = m @ np.ones(g.n)
    return x / np.linalg.norm(x)


def oracle_all(g: DenseGraph, damping: float = 0.85) -> dict[str, np.ndarray | None]:
    return {
        "degree": oracle_degree(g),
        "betweenness": oracle_betweenness(g),
        "closeness": oracle_closeness(g),
        "pagerank": oracle_pagerank(g, damping),
        "eigenvector": oracle_eigenvector(g),
        "harmonic": oracle_harmonic(g),
    }
