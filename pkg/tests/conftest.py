import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qrnet.builder import graph_from_edges

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def small_digraphs(draw, min_nodes=2, max_nodes=6):
    """(n, edge list) over nodes 0..n-1, no self-loops."""
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return n, sorted(edges)


def random_adjacency(rng, n, p):
    a = rng.random((n, n)) < p
    np.fill_diagonal(a, False)
    return a


def graph_of(a):
    n = a.shape[0]
    return graph_from_edges([(i, j) for i in range(n) for j in range(n) if a[i, j]],
                            nodes=range(n))


@pytest.fixture(autouse=True)
def _quiet_small_graph_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="betweenness is identically zero")
        yield
