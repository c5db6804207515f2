#!/usr/bin/env python3
"""Regenerate the golden outputs for tests/fixtures/mini_posts.xml.

Runs ``qrnet analyze`` on the fixture, then re-derives every centrality column
with the dense oracle and refuses to write goldens unless they agree.

    python scripts/make_goldens.py [--check]
"""

from __future__ import annotations

import argparse
import csv
import filecmp
import sys
import tempfile
from pathlib import Path

import numpy as np

from qrnet.cli import main as qrnet_main
from qrnet.oracle import DenseGraph, oracle_all

ROOT = Path(__file__).resolve().parents[1]
FIXTURE = ROOT / "tests" / "fixtures" / "mini_posts.xml"
GOLDEN = ROOT / "tests" / "fixtures" / "golden"
FILES = ("report.json", "centrality.csv")


def verify_against_oracle(outdir: Path):
    with open(outdir / "centrality.csv") as fh:
        rows = list(csv.DictReader(fh))
    ids = [int(r["user_id"]) for r in rows]
    pos = {u: i for i, u in enumerate(ids)}
    with open(outdir / "edges.tsv") as fh:
        edges = [(pos[int(r["src"])], pos[int(r["dst"])]) for r in csv.DictReader(fh, delimiter="\t")]
    expected = oracle_all(DenseGraph.from_edges(len(ids), edges))
    for name, ref in expected.items():
        got = np.array([float(r[name]) for r in rows])
        if ref is None:
            ref = np.zeros(len(ids))
        tol = 1e-6 if name in ("pagerank", "eigenvector") else 1e-9
        if not np.allclose(got, ref, atol=tol, rtol=0):
            raise SystemExit(f"{name} disagrees with oracle:\n  cli    {got}\n  oracle {ref}")
        print(f"oracle agrees: {name}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare instead of overwriting")
    args = ap.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp)
        rc = qrnet_main(["analyze", "--posts", str(FIXTURE), "--out", str(out), "--threads", "1"])
        if rc != 0:
            raise SystemExit(f"qrnet analyze exited {rc}")
        verify_against_oracle(out)
        if args.check:
            same = all(filecmp.cmp(out / f, GOLDEN / f, shallow=False) for f in FILES)
            print("goldens up to date" if same else "goldens differ")
            return 0 if same else 1
        GOLDEN.mkdir(parents=True, exist_ok=True)
        for f in FILES:
            (GOLDEN / f).write_bytes((out / f).read_bytes())
            print(f"wrote {GOLDEN / f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
