"""Synthetic QR-shaped graphs and Posts dumps for scale and memory checks."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone
from typing import BinaryIO

import numpy as np

from .builder import QRGraph, graph_from_edges

# role mix of the largest community in the published role table
ROLE_MIX = {"questioner_only": 27345, "responder_only": 6668, "both": 3654}


def qr_like_graph(n_nodes: int, n_edges: int, seed: int = 0, zipf: float = 1.1,
                  mixed_bias: float = 0.2) -> QRGraph:
    """Directed graph with exactly ``n_nodes`` nodes and ``n_edges`` distinct edges.

    Nodes are split into ask-only, answer-only and mixed users in ROLE_MIX
    proportions. Edges run asker -> answerer; answerers are drawn from a
    heavy-tailed popularity distribution so a few users answer most questions,
    as on real sites. Every node gets at least one edge.
    """
    rng = np.random.default_rng(seed)
    total = sum(ROLE_MIX.values())
    n_q = round(n_nodes * ROLE_MIX["questioner_only"] / total)
    n_b = round(n_nodes * ROLE_MIX["both"] / total)
    perm = rng.permutation(n_nodes) + 1
    q_only, both, r_only = perm[:n_q], perm[n_q:n_q + n_b], perm[n_q + n_b:]
    askers = np.concatenate([q_only, both])
    answerers = np.concatenate([both, r_only])
    pop = 1.0 / np.arange(1, len(answerers) + 1) ** zipf
    pop /= pop.sum()
    # mixed users skew toward the popular end, which closes ask/answer cycles
    rank_key = rng.random(len(answerers))
    rank_key[:len(both)] *= mixed_bias
    answerers = answerers[np.argsort(rank_key, kind="stable")]

    edges: set[tuple[int, int]] = set()

    def add(s, d):
        if s != d:
            edges.add((int(s), int(d)))

    # coverage: every user gets one edge in its role
    for a in askers:
        add(a, answerers[rng.choice(len(answerers), p=pop)])
    for r in r_only:
        add(askers[rng.integers(len(askers))], r)
    for b in both:
        add(askers[rng.integers(len(askers))], b)
    if len(edges) > n_edges:
        raise ValueError(f"{n_nodes} nodes need more than {n_edges} edges for coverage")
    while len(edges) < n_edges:
        k = n_edges - len(edges)
        src = askers[rng.integers(len(askers), size=k)]
        dst = answerers[rng.choice(len(answerers), size=k, p=pop)]
        for s, d in zip(src, dst):
            if len(edges) >= n_edges:
                break
            add(s, d)
    return graph_from_edges(sorted(edges), nodes=perm)


def write_posts_xml(fh: BinaryIO, n_rows: int, seed: int = 0, n_users: int = 50_000,
                    answer_fraction: float = 0.6):
    """Stream a synthetic Posts.xml with ``n_rows`` rows to a binary file handle.

    Rows are written in id order with increasing timestamps; answers point at
    a random earlier question. Memory use is independent of ``n_rows``.
    """
    rng = np.random.default_rng(seed)
    start = datetime(2020, 1, 1, tzinfo=timezone.utc)
    fh.write(b'<?xml version="1.0" encoding="utf-8"?>\n<posts>\n')
    last_question = 0
    batch = 10_000
    post_id = 0
    while post_id < n_rows:
        k = min(batch, n_rows - post_id)
        is_answer = rng.random(k) < answer_fraction
        owners = rng.integers(1, n_users + 1, size=k)
        gaps = rng.integers(1, 600_000, size=k)
        lines = []
        for j in range(k):
            post_id += 1
            ts = start + timedelta(milliseconds=int(post_id) * 60_000 + int(gaps[j]) % 1000)
            stamp = ts.strftime("%Y-%m-%dT%H:%M:%S.") + f"{ts.microsecond // 1000:03d}"
            if is_answer[j] and last_question:
                parent = int(rng.integers(max(1, last_question - 500), last_question + 1))
                lines.append(f'  <row Id="{post_id}" PostTypeId="2" ParentId="{parent}" '
                             f'CreationDate="{stamp}" OwnerUserId="{owners[j]}" Score="0" />\n')
            else:
                last_question = post_id
                lines.append(f'  <row Id="{post_id}" PostTypeId="1" CreationDate="{stamp}" '
                             f'OwnerUserId="{owners[j]}" Score="0" Title="synthetic question" />\n')
        fh.write("".join(lines).encode())
    fh.write(b"</posts>\n")
