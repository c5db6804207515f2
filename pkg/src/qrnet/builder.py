"""Questioner -> responder interactions and the aggregated weighted digraph."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .ingest import PostRecord, PostType

DEFAULT_EPSILON = 0.01

# multiplier taking hours to the configured response-time unit
TIME_UNITS = {"hours": 1.0, "minutes": 60.0, "seconds": 3600.0}


@dataclass(frozen=True)
class Interaction:
    questioner: int
    responder: int
    response_time_hours: float
    question_id: int
    answer_id: int

    def __post_init__(self):
        if not self.response_time_hours >= 0:
            raise ValueError(f"negative response time {self.response_time_hours}")
        if self.question_id == self.answer_id:
            raise ValueError("question_id and answer_id must differ")


@dataclass
class AnomalyCounts:
    negative_response_time: int = 0
    self_answers: int = 0
    orphan_answers: int = 0


@dataclass(frozen=True)
class EdgeData:
    weight: float
    interaction_count: int


@dataclass(frozen=True)
class QRGraph:
    """Immutable weighted digraph over user ids.

    ``nodes`` is sorted ascending; ``edges`` maps ``(src, dst)`` to EdgeData.
    """

    nodes: tuple[int, ...]
    edges: Mapping[tuple[int, int], EdgeData]
    epsilon: float = DEFAULT_EPSILON
    anomaly_counts: AnomalyCounts = field(default_factory=AnomalyCounts)

    @property
    def n(self) -> int:
        return len(self.nodes)

    def index(self) -> dict[int, int]:
        return {u: i for i, u in enumerate(self.nodes)}

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(src_index, dst_index, weight) arrays in sorted (src, dst) order."""
        pos = self.index()
        keys = sorted(self.edges)
        src = np.fromiter((pos[s] for s, _ in keys), dtype=np.int64, count=len(keys))
        dst = np.fromiter((pos[d] for _, d in keys), dtype=np.int64, count=len(keys))
        w = np.fromiter((self.edges[k].weight for k in keys), dtype=np.float64, count=len(keys))
        return src, dst, w


def _hours_between(later: datetime, earlier: datetime) -> float:
    return (later - earlier).total_seconds() / 3600.0


def derive_interactions(posts: Iterable[PostRecord]) -> tuple[list[Interaction], AnomalyCounts]:
    """Pair every answer with its parent question.

    Posts may come in any order; answers are buffered until all questions are
    indexed. Output is ordered by answer id.
    """
    questions: dict[int, tuple[int | None, datetime]] = {}
    answers: list[PostRecord] = []
    for post in posts:
        if post.post_type is PostType.QUESTION:
            questions[post.post_id] = (post.owner_user_id, post.creation_time)
        else:
            answers.append(post)

    anomalies = AnomalyCounts()
    out: list[Interaction] = []
    for ans in sorted(answers, key=lambda p: p.post_id):
        parent = questions.get(ans.parent_id)
        if parent is None:
            anomalies.orphan_answers += 1
            continue
        asker, asked_at = parent
        if asker == ans.owner_user_id:
            anomalies.self_answers += 1
            continue
        hours = _hours_between(ans.creation_time, asked_at)
        if hours < 0:
            anomalies.negative_response_time += 1
            continue
        out.append(Interaction(asker, ans.owner_user_id, hours, ans.parent_id, ans.post_id))
    return out, anomalies


def edge_weight(r: float, epsilon: float = DEFAULT_EPSILON) -> float:
    if r < 0:
        raise ValueError(f"response time must be non-negative, got {r}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return 1.0 / (r + epsilon)


def build_graph(interactions: Iterable[Interaction], epsilon: float = DEFAULT_EPSILON, *,
                time_unit: str = "hours", reverse_edges: bool = False,
                anomalies: AnomalyCounts | None = None) -> QRGraph:
    """Aggregate interactions into one edge per ordered user pair.

    Edge weight is the sum of ``1/(r + epsilon)`` over the pair's interactions,
    with ``r`` expressed in ``time_unit``. Per-edge terms are summed with
    ``math.fsum`` so the result does not depend on input order.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    scale = TIME_UNITS[time_unit]
    terms: dict[tuple[int, int], list[float]] = {}
    for it in interactions:
        key = (it.responder, it.questioner) if reverse_edges else (it.questioner, it.responder)
        if key[0] == key[1]:
            raise ValueError(f"self-interaction for user {key[0]}")
        terms.setdefault(key, []).append(edge_weight(it.response_time_hours * scale, epsilon))

    edges = {k: EdgeData(math.fsum(ws), len(ws)) for k, ws in sorted(terms.items())}
    nodes = tuple(sorted({u for k in edges for u in k}))
    return QRGraph(nodes, MappingProxyType(edges), epsilon, anomalies or AnomalyCounts())


def graph_from_edges(edges: Iterable[tuple[int, int]], nodes: Iterable[int] = ()) -> QRGraph:
    """Unit-weight graph from a bare edge list; handy for tests and synthetic runs."""
    emap = {}
    for s, d in edges:
        if s == d:
            raise ValueError(f"self-loop on {s}")
        emap[(s, d)] = EdgeData(1.0, 1)
    allnodes = set(nodes) | {u for k in emap for u in k}
    return QRGraph(tuple(sorted(allnodes)), MappingProxyType(dict(sorted(emap.items()))))
