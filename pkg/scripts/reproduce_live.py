"""Live reproduction: fetch -> decompress -> analyze -> compare against published counts.

Needs network access and the 7z binary (p7zip). Dumps drift every quarter, so
node/edge counts are reported next to the published values with the relative
drift rather than asserted.

    python3 scripts/reproduce_live.py --work live --sites genai ai
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import subprocess
import sys
from pathlib import Path

from qrnet.cli import main as qrnet

# published (questions, nodes, edges) per community, March 2024 dumps
PUBLISHED = {
    "datascience": ("Data Science", 36_775, 17_523, 26_509),
    "ai": ("Artificial Intelligence", 12_380, 5_295, 7_546),
    "pm": ("Project Management", 6_398, 4_097, 5_700),
    "genai": ("GenAI", 268, 155, 133),
    "softwareengineering": ("Software Engineering", 63_423, 34_013, 57_391),
}


def decompress(archive: Path, dest: Path) -> Path:
    seven = shutil.which("7z") or shutil.which("7za")
    if seven is None:
        sys.exit("7z not found; install p7zip and retry")
    subprocess.run([seven, "x", "-y", f"-o{dest}", str(archive), "Posts.xml"], check=True,
                   stdout=subprocess.DEVNULL)
    return dest / "Posts.xml"


def run_site(key: str, work: Path, threads: int) -> dict | None:
    slug = f"{key}.stackexchange.com"
    site_dir = work / key
    site_dir.mkdir(parents=True, exist_ok=True)
    archive = site_dir / f"{slug}.7z"
    if not archive.exists():
        code = qrnet(["fetch", slug, "--dest", str(site_dir)])
        if code != 0:
            print(f"{key}: fetch failed (exit {code})", file=sys.stderr)
            return None
    posts = site_dir / "Posts.xml"
    if not posts.exists():
        posts = decompress(archive, site_dir)
    out = site_dir / "out"
    code = qrnet(["analyze", "--posts", str(posts), "--out", str(out), "--site", key,
                  "--threads", str(threads)])
    if code not in (0, 4):
        print(f"{key}: analyze failed (exit {code})", file=sys.stderr)
        return None
    return json.loads((out / "report.json").read_text())


def drift(got: int, want: int) -> str:
    return f"{(got - want) / want:+.1%}"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--work", type=Path, default=Path("live"))
    ap.add_argument("--sites", nargs="+", choices=sorted(PUBLISHED), default=sorted(PUBLISHED))
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args(argv)
    threads = args.threads or os.cpu_count() or 1

    header = f"{'site':<24}{'questions':>10}{'pub':>9}{'nodes':>9}{'pub':>9}{'drift':>8}{'edges':>9}{'pub':>9}{'drift':>8}"
    lines = [header]
    reports = []
    for key in args.sites:
        rep = run_site(key, args.work, threads)
        if rep is None:
            continue
        reports.append(args.work / key / "out" / "report.json")
        name, questions, nodes, edges = PUBLISHED[key]
        g = rep["graph"]
        q = rep["ingest"]["questions"]
        lines.append(f"{name:<24}{q:>10}{questions:>9}{g['nodes']:>9}{nodes:>9}{drift(g['nodes'], nodes):>8}"
                     f"{g['edges']:>9}{edges:>9}{drift(g['edges'], edges):>8}")
    print("\n".join(lines))
    if len(reports) >= 2:
        qrnet(["compare", *map(str, reports), "--csv", str(args.work / "comparison.csv")])
    return 0 if reports else 1


if __name__ == "__main__":
    sys.exit(main())
