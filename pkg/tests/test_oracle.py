import ast
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given

import qrnet.oracle as oracle_mod
from qrnet.builder import graph_from_edges
from qrnet.centrality import compute_centralities
from qrnet.oracle import (UNREACHABLE, DenseGraph, eigenvector_is_degenerate, oracle_all,
                          oracle_betweenness, oracle_distances, oracle_eigenvector,
                          oracle_pagerank)

from conftest import small_digraphs

PATH = DenseGraph.from_edges(3, [(0, 1), (1, 2)])
CYCLE = DenseGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])


def test_distances():
    d = oracle_distances(PATH)
    assert d[0, 2] == 2 and d[2, 0] == UNREACHABLE
    assert (np.diag(d) == 0).all()
    edgeless = oracle_distances(DenseGraph(np.zeros((4, 4), bool)))
    assert (edgeless[~np.eye(4, dtype=bool)] == UNREACHABLE).all()


def test_size_caps():
    with pytest.raises(ValueError):
        oracle_distances(DenseGraph(np.zeros((13, 13), bool)))
    with pytest.raises(ValueError):
        oracle_betweenness(DenseGraph(np.zeros((9, 9), bool)))


def test_self_loops_rejected():
    with pytest.raises(ValueError):
        DenseGraph(np.eye(3, dtype=bool))


def test_betweenness_examples():
    assert np.allclose(oracle_betweenness(PATH), [0, 0.5, 0])
    assert np.allclose(oracle_betweenness(CYCLE), [0.5] * 3)
    star = DenseGraph.from_edges(5, [(0, k) for k in range(1, 5)])
    assert oracle_betweenness(star)[0] == 0


def test_pagerank_examples():
    assert np.allclose(oracle_pagerank(CYCLE), [1 / 3] * 3)
    a = np.linalg.solve([[1.0, -0.425], [1.0, 1.0]], [0.075, 1.0])
    assert np.allclose(oracle_pagerank(DenseGraph.from_edges(2, [(0, 1)])), a, atol=1e-9)
    assert np.allclose(a, [0.3509, 0.6491], atol=5e-5)
    assert oracle_pagerank(DenseGraph(np.zeros((1, 1), bool)))[0] == pytest.approx(1.0)


def test_eigenvector_degeneracy():
    assert eigenvector_is_degenerate(PATH)
    assert not eigenvector_is_degenerate(CYCLE)
    # two 2-cycles chained by an edge: equal spectral radii, defective
    chained = DenseGraph.from_edges(4, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 2)])
    assert eigenvector_is_degenerate(chained)
    assert oracle_eigenvector(chained) is None
    apart = DenseGraph.from_edges(4, [(0, 1), (1, 0), (2, 3), (3, 2)])
    assert np.allclose(oracle_eigenvector(apart), [0.5] * 4)


def test_oracle_shares_no_code_with_kernels():
    tree = ast.parse(Path(oracle_mod.__file__).read_text())
    imported = {n.module for n in ast.walk(tree) if isinstance(n, ast.ImportFrom)}
    imported |= {a.name for n in ast.walk(tree) if isinstance(n, ast.Import) for a in n.names}
    assert not any("centrality" in m or "_kernels" in m or "builder" in m for m in imported if m)


@given(small_digraphs(min_nodes=2, max_nodes=6))
def test_kernels_agree_with_oracle(graph):
    n, edges = graph
    table = compute_centralities(graph_from_edges(edges, nodes=range(n)), threads=1)
    ref = oracle_all(DenseGraph.from_edges(n, edges))
    for name, expected in ref.items():
        got = table.column(name)
        if name == "eigenvector":
            assert (expected is None) == table.convergence_info["eigenvector_degenerate"]
            if expected is None:
                continue
        tol = 1e-6 if name in ("pagerank", "eigenvector") else 1e-9
        assert np.allclose(got, expected, atol=tol, rtol=0), name
