"""Acceptance criteria, one check per criterion.

Each check returns (passed, detail) and prints a single PASS/FAIL line. Run
standalone with ``python3 tests/test_acceptance.py`` or through pytest.
"""

from __future__ import annotations

import logging
import math
import os
import re
import subprocess
import sys
import tempfile
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

from qrnet.analytics import correlation_matrix, present_ratio, qr_ratio
from qrnet.builder import edge_weight, graph_from_edges
from qrnet.centrality import MEASURES, CentralityTable, compute_centralities, pagerank
from qrnet.cli import main as qrnet
from qrnet.oracle import DenseGraph, oracle_all
from qrnet.synthetic import qr_like_graph

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"

# (questioners_only, responders_only) -> published QR ratio
PUBLISHED_RATIOS = [
    ("Data Science", 14084, 3448, "4.09"),
    ("Artificial Intelligence", 4128, 1167, "3.54"),
    ("Project Management", 3440, 657, "5.23"),
    ("GenAI", 91, 42, "2.17"),
    ("Software Engineering", 27345, 6668, "4.10"),
]
# (nodes, edges) from the published network-size table
PUBLISHED_SIZES = {
    "Data Science": ("17,523", "26,509"),
    "Artificial Intelligence": ("5295", "7,546"),
    "Project Management": ("4,097", "5,700"),
    "GenAI": ("155", "133"),
    "Software Engineering": ("34,013", "57,391"),
}
SE_NODES, SE_EDGES = 34_013, 57_391

GRAPHS_PER_CELL = 200
DENSITIES = (0.3, 0.7)


def _random_graphs(seed=2024):
    rng = np.random.default_rng(seed)
    for n in range(2, 7):
        for p in DENSITIES:
            for _ in range(GRAPHS_PER_CELL):
                a = rng.random((n, n)) < p
                np.fill_diagonal(a, False)
                yield n, [(int(i), int(j)) for i, j in zip(*np.nonzero(a))]


def check_qr_ratio():
    misses = []
    for site, q, r, published in PUBLISHED_RATIOS:
        shown = present_ratio(qr_ratio(q, r))
        if shown != published:
            misses.append(f"{site} {q}/{r}={q / r:.4f} -> {shown}, published {published}")
    return not misses, "; ".join(misses) or "all five ratios match"


def check_edge_weight():
    rng = np.random.default_rng(7)
    rs = [0.0, 0.99, 99.99, 1e6] + list(rng.uniform(0, 1e4, 500)) + list(10 ** rng.uniform(-6, 6, 500))
    worst = max(abs(edge_weight(r, 0.01) - 1 / (r + 0.01)) * (r + 0.01) for r in rs)
    return worst <= 1e-12, f"{len(rs)} values, max relative error {worst:.2e}"


def check_oracle_equivalence():
    t0 = time.perf_counter()
    count, bad = 0, []
    for n, edges in _random_graphs():
        count += 1
        table = compute_centralities(graph_from_edges(edges, nodes=range(n)), threads=1)
        ref = oracle_all(DenseGraph.from_edges(n, edges))
        for name in MEASURES:
            expected = ref[name]
            if name == "eigenvector":
                if (expected is None) != table.convergence_info["eigenvector_degenerate"]:
                    bad.append((n, edges, "eigenvector degeneracy"))
                    continue
                if expected is None:
                    continue
            tol = 1e-6 if name in ("pagerank", "eigenvector") else 1e-9
            if not np.allclose(table.column(name), expected, atol=tol, rtol=0):
                bad.append((n, edges, name))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 60 and count >= GRAPHS_PER_CELL * 5 * len(DENSITIES)
    detail = f"{count} graphs, {len(bad)} mismatches, {elapsed:.1f}s"
    if bad:
        detail += f", first {bad[0]}"
    return ok, detail


def check_pagerank_conservation():
    worst, count = 0.0, 0
    graphs = list(_random_graphs(seed=99))
    graphs += [(n, []) for n in range(1, 9)]           # every node dangling
    graphs += [(5, [(0, 1), (0, 2), (1, 2)])]          # partly dangling
    for n, edges in graphs:
        g = graph_from_edges(edges, nodes=range(n))
        for weighted in (False, True):
            scores, _ = pagerank(g, weighted=weighted)
            worst = max(worst, abs(math.fsum(scores) - 1.0))
            count += 1
    big = qr_like_graph(3000, 5000, seed=3)
    scores, _ = pagerank(big)
    worst = max(worst, abs(math.fsum(scores) - 1.0))
    return worst <= 1e-9, f"{count + 1} graphs, max |sum - 1| = {worst:.1e}"


def check_correlation_properties():
    rng = np.random.default_rng(11)
    worst_sym = worst_diag = worst_inv = 0.0
    out_of_range = 0
    for _ in range(100):
        n = int(rng.integers(5, 60))
        cols = {m: rng.standard_normal(n) * rng.uniform(0.1, 10) for m in MEASURES}
        cm = correlation_matrix(CentralityTable(tuple(range(n)), **cols))
        a = cm.as_array()
        worst_sym = max(worst_sym, float(np.max(np.abs(a - a.T))))
        worst_diag = max(worst_diag, float(np.max(np.abs(np.diag(a) - 1))))
        out_of_range += int(np.sum((a < -1) | (a > 1)))
        moved = {m: v * rng.uniform(0.01, 100) + rng.uniform(-1e3, 1e3) for m, v in cols.items()}
        b = correlation_matrix(CentralityTable(tuple(range(n)), **moved)).as_array()
        worst_inv = max(worst_inv, float(np.max(np.abs(a - b))))
    ok = worst_sym <= 1e-12 and worst_diag <= 1e-12 and out_of_range == 0 and worst_inv <= 1e-9
    return ok, (f"100 tables, asymmetry {worst_sym:.1e}, diagonal error {worst_diag:.1e}, "
                f"{out_of_range} out of range, scale/shift drift {worst_inv:.1e}")


def check_golden():
    golden = FIXTURES / "golden"
    diffs = []
    with tempfile.TemporaryDirectory() as tmp:
        for threads in (1, 2, 8):
            out = Path(tmp) / f"t{threads}"
            code = qrnet(["analyze", "--posts", str(FIXTURES / "mini_posts.xml"), "--out", str(out),
                          "--threads", str(threads)])
            if code != 0:
                diffs.append(f"threads={threads} exit {code}")
                continue
            for name in ("report.json", "centrality.csv"):
                if (out / name).read_bytes() != (golden / name).read_bytes():
                    diffs.append(f"threads={threads} {name}")
    return not diffs, "; ".join(diffs) or "byte-identical at 1, 2 and 8 threads"


_INGEST_PROBE = """
import sys
from qrnet.ingest import IngestStats, iter_posts
stats = IngestStats()
with open(sys.argv[1], "rb") as fh:
    for _ in iter_posts(fh, stats):
        pass
assert stats.is_balanced()
# VmHWM belongs to this address space; ru_maxrss would inherit the parent's peak
hwm = next(l for l in open("/proc/self/status") if l.startswith("VmHWM:"))
print(stats.rows_read, hwm.split()[1])
"""


def check_scale():
    g = qr_like_graph(SE_NODES, SE_EDGES, seed=0)
    t0 = time.perf_counter()
    table = compute_centralities(g, threads=os.cpu_count())
    elapsed = time.perf_counter() - t0
    finite = all(np.isfinite(table.column(m)).all() for m in MEASURES)

    with tempfile.TemporaryDirectory() as tmp:
        posts = Path(tmp) / "Posts.xml"
        gen = ("from qrnet.synthetic import write_posts_xml\n"
               f"with open({str(posts)!r}, 'wb') as fh: write_posts_xml(fh, 1_000_000, seed=1)")
        subprocess.run([sys.executable, "-c", gen], check=True)
        proc = subprocess.run([sys.executable, "-c", _INGEST_PROBE, str(posts)],
                              capture_output=True, text=True, check=True)
    rows, rss_kb = map(int, proc.stdout.split())
    rss_mb = rss_kb / 1024
    ok = (g.n == SE_NODES and len(g.edges) == SE_EDGES and finite and elapsed < 300
          and rows == 1_000_000 and rss_mb < 256)
    return ok, (f"{g.n} nodes / {len(g.edges)} edges, all measures in {elapsed:.1f}s "
                f"on {os.cpu_count()} core(s); 1M-row ingest peak RSS {rss_mb:.0f} MB")


def check_runbook():
    runbook = ROOT / "docs" / "RUNBOOK.md"
    script = ROOT / "scripts" / "reproduce_live.py"
    if not runbook.exists() or not script.exists():
        return False, "runbook or reproduction script missing"
    text = runbook.read_text()
    missing = []
    for site, (nodes, edges) in PUBLISHED_SIZES.items():
        row = next((l for l in text.splitlines() if l.startswith(f"| {site} |")), "")
        if not re.search(rf"\|\s*{re.escape(nodes)}\s*\|\s*{re.escape(edges)}\s*\|", row):
            missing.append(site)
    steps = all(s in text for s in ("qrnet fetch", "7z x", "qrnet analyze", "drift"))
    ok = not missing and steps
    return ok, ("runbook lists published node/edge counts for all five sites and the "
                "fetch, decompress and analyze steps" if ok
                else f"missing rows {missing}, steps present: {steps}")


CRITERIA = [
    (1, "QR-ratio reproduction", check_qr_ratio),
    (2, "edge-weight formula", check_edge_weight),
    (3, "oracle equivalence", check_oracle_equivalence),
    (4, "PageRank conservation", check_pagerank_conservation),
    (5, "correlation-matrix properties", check_correlation_properties),
    (6, "golden end-to-end", check_golden),
    (7, "desk-scale performance", check_scale),
    (8, "live reproduction runbook", check_runbook),
]


def run_one(number, name, check):
    logging.getLogger("qrnet").setLevel(logging.ERROR)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        ok, detail = check()
    line = f"{'PASS' if ok else 'FAIL'} [{number}] {name}: {detail}"
    return ok, line


@pytest.mark.parametrize("number, name, check", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, name, check, capsys):
    ok, line = run_one(number, name, check)
    with capsys.disabled():
        print(f"\n{line}")
    assert ok, line


if __name__ == "__main__":
    results = [run_one(*c) for c in CRITERIA]
    for _, line in results:
        print(line, flush=True)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
