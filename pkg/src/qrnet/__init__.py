"""Questioner-responder network analytics for Stack Exchange data dumps."""

__version__ = "0.1.0"

from .analytics import classify_roles, correlation_matrix, metric_stats
from .builder import QRGraph, build_graph, derive_interactions, edge_weight
from .centrality import CentralityTable, compute_centralities
from .ingest import PostRecord, fetch_dump, iter_posts, parse_posts

__all__ = [
    "CentralityTable", "PostRecord", "QRGraph", "build_graph", "classify_roles",
    "compute_centralities", "correlation_matrix", "derive_interactions", "edge_weight",
    "fetch_dump", "iter_posts", "metric_stats", "parse_posts",
]
