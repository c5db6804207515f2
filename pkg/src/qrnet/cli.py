"""``qrnet`` command line: fetch dumps, analyse a Posts.xml, compare reports.

Exit codes:
    0  success
    2  usage error, invalid config, unreadable input, bad slug, schema mismatch
    3  Posts.xml is not well-formed XML
    4  PageRank did not converge (a partial report is still written)
    5  network failure while fetching
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import urllib.error
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .analytics import (CorrelationMatrix, classify_roles, correlation_matrix, metric_stats,
                        present_ratio)
from .builder import DEFAULT_EPSILON, TIME_UNITS, QRGraph, build_graph, derive_interactions
from .centrality import MEASURES, CentralityTable, compute_centralities
from .ingest import DumpParseError, FetchError, IngestStats, fetch_dump, iter_posts, validate_slug

log = logging.getLogger("qrnet")

SCHEMA_VERSION = 1
FORMATS = ("csv", "json", "edgelist", "dot")
DEFAULT_FORMATS = ("csv", "json", "edgelist")

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_CONVERGENCE, EXIT_NETWORK = 0, 2, 3, 4, 5


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    posts: Path
    out: Path
    epsilon: float = DEFAULT_EPSILON
    time_unit: str = "hours"
    damping: float = 0.85
    tol: float = 1e-9
    max_iter: int = 1000
    weighted: bool = False
    undirected: bool = False
    reverse_edges: bool = False
    population_std: bool = False
    threads: int | None = None
    formats: tuple[str, ...] = DEFAULT_FORMATS
    site: str | None = None

    def validate(self):
        if not self.epsilon > 0:
            raise ConfigError(f"--epsilon must be > 0, got {self.epsilon}")
        if not 0 < self.damping < 1:
            raise ConfigError(f"--damping must lie in (0, 1), got {self.damping}")
        if not self.tol > 0 or self.max_iter < 1:
            raise ConfigError("--tol must be > 0 and --max-iter >= 1")
        if self.time_unit not in TIME_UNITS:
            raise ConfigError(f"--time-unit must be one of {sorted(TIME_UNITS)}")
        if self.threads is not None and self.threads < 1:
            raise ConfigError("--threads must be >= 1")
        unknown = set(self.formats) - set(FORMATS)
        if unknown:
            raise ConfigError(f"unknown output format(s): {', '.join(sorted(unknown))}")
        try:
            self.out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"output directory {self.out} is not writable: {exc}") from None
        if not os.access(self.out, os.W_OK):
            raise ConfigError(f"output directory {self.out} is not writable")

    def site_label(self) -> str:
        if self.site:
            return self.site
        if self.posts.stem.lower() == "posts" and self.posts.parent.name:
            return self.posts.parent.name
        return self.posts.stem

    def echo(self) -> dict:
        # run-invariant settings only; paths and thread count stay out so the
        # report is byte-identical wherever and however it is produced
        return {
            "posts_file": self.posts.name,
            "epsilon": self.epsilon,
            "time_unit": self.time_unit,
            "damping": self.damping,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "weighted": self.weighted,
            "undirected": self.undirected,
            "reverse_edges": self.reverse_edges,
            "std": "population" if self.population_std else "sample",
        }


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def _clean(x):
    """JSON-safe float: NaN/inf become None."""
    if x is None:
        return None
    x = float(x)
    return x if x == x and abs(x) != float("inf") else None


def write_centrality_csv(table: CentralityTable, path: Path):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["user_id", *MEASURES])
    cols = [table.column(m) for m in MEASURES]
    for i, u in enumerate(table.nodes):
        w.writerow([u, *(fmt(c[i]) for c in cols)])
    path.write_text(buf.getvalue(), encoding="utf-8")


def write_edges_tsv(g: QRGraph, path: Path):
    lines = ["src\tdst\tweight\tcount"]
    for (s, d), e in sorted(g.edges.items()):
        lines.append(f"{s}\t{d}\t{fmt(e.weight)}\t{e.interaction_count}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_dot(g: QRGraph, path: Path):
    """Sources (only ask) blue, targets (only answer) coral, mixed users grey."""
    has_out = {s for s, _ in g.edges}
    has_in = {d for _, d in g.edges}
    lines = ["digraph qr {", "  node [style=filled];"]
    for u in g.nodes:
        if u in has_out and u not in has_in:
            color = "blue"
        elif u in has_in and u not in has_out:
            color = "coral"
        else:
            color = "grey"
        lines.append(f'  "{u}" [fillcolor={color}];')
    for (s, d), e in sorted(g.edges.items()):
        lines.append(f'  "{s}" -> "{d}" [weight={fmt(e.weight)}, count={e.interaction_count}];')
    lines.append("}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _correlation_json(cm: CorrelationMatrix | None, error: str | None) -> dict:
    if cm is None:
        return {"labels": None, "values": None, "error": error}
    return {"labels": list(cm.labels),
            "values": [[_clean(v) for v in row] for row in cm.values],
            "error": None}


@dataclass
class AnalysisResult:
    report: dict
    graph: QRGraph
    table: CentralityTable
    stats: IngestStats = field(default_factory=IngestStats)


def analyze(config: RunConfig) -> AnalysisResult:
    """Full pipeline in memory; raises OSError/DumpParseError on bad input."""
    stats = IngestStats()
    with open(config.posts, "rb") as fh:
        interactions, anomalies = derive_interactions(iter_posts(fh, stats))
    g = build_graph(interactions, config.epsilon, time_unit=config.time_unit,
                    reverse_edges=config.reverse_edges, anomalies=anomalies)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        table = compute_centralities(g, damping=config.damping, tol=config.tol,
                                     max_iter=config.max_iter, weighted=config.weighted,
                                     undirected=config.undirected, threads=config.threads)
    roles, _ = classify_roles(interactions)
    moments = metric_stats(table, ddof=0 if config.population_std else 1) if g.n else {}
    cm, cm_error = None, None
    try:
        cm = correlation_matrix(table)
    except ValueError as exc:  # too few nodes, or NoCorrelations
        cm_error = str(exc)

    info = {k: (_clean(v) if isinstance(v, float) else v)
            for k, v in table.convergence_info.items()}
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "site": config.site_label(),
        "config": config.echo(),
        "ingest": asdict(stats),
        "anomalies": asdict(anomalies),
        "graph": {"nodes": g.n, "edges": len(g.edges), "interactions": len(interactions)},
        "roles": {
            "questioners_only": roles.questioners_only,
            "responders_only": roles.responders_only,
            "both": roles.both,
            "users": roles.users,
            "qr_ratio": _clean(roles.qr_ratio),
            "qr_ratio_display": present_ratio(roles.qr_ratio),
        },
        "metrics": {name: {"mean": _clean(m.mean), "std": _clean(m.std),
                           "min": _clean(m.minimum), "max": _clean(m.maximum)}
                    for name, m in moments.items()},
        "correlation": _correlation_json(cm, cm_error),
        "convergence": info,
        "partial": not table.converged,
    }
    return AnalysisResult(report, g, table, stats)


def cmd_analyze(args) -> int:
    config = RunConfig(
        posts=Path(args.posts), out=Path(args.out), epsilon=args.epsilon,
        time_unit=args.time_unit, damping=args.damping, tol=args.tol, max_iter=args.max_iter,
        weighted=args.weighted,
        undirected=args.undirected, reverse_edges=args.reverse_edges,
        population_std=args.population_std, threads=args.threads,
        formats=tuple(f.strip() for f in args.format.split(",") if f.strip()), site=args.site,
    )
    try:
        config.validate()
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    try:
        result = analyze(config)
    except OSError as exc:
        log.error("cannot read %s: %s", config.posts, exc)
        return EXIT_USAGE
    except DumpParseError as exc:
        log.error("%s: %s", config.posts, exc)
        return EXIT_PARSE

    out = config.out
    if "json" in config.formats:
        text = json.dumps(result.report, indent=2, sort_keys=False, allow_nan=False)
        (out / "report.json").write_text(text + "\n", encoding="utf-8")
    if "csv" in config.formats:
        write_centrality_csv(result.table, out / "centrality.csv")
    if "edgelist" in config.formats:
        write_edges_tsv(result.graph, out / "edges.tsv")
    if "dot" in config.formats:
        write_dot(result.graph, out / "graph.dot")

    r = result.report
    print(f"{r['site']}: {r['graph']['nodes']} nodes, {r['graph']['edges']} edges, "
          f"QR ratio {r['roles']['qr_ratio_display']} -> {out}")
    if r["partial"]:
        log.error("PageRank did not converge; report flagged partial")
        return EXIT_CONVERGENCE
    return EXIT_OK


def cmd_fetch(args) -> int:
    try:
        validate_slug(args.slug)
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    try:
        path, length = fetch_dump(args.slug, args.dest)
    except FetchError as exc:
        log.error("%s", exc)
        return EXIT_USAGE if exc.status == 404 else EXIT_NETWORK
    except (urllib.error.URLError, OSError) as exc:
        log.error("network error: %s", exc)
        return EXIT_NETWORK
    print(f"{path} ({length} bytes)")
    return EXIT_OK


COMPARE_COLUMNS = (
    "platform", "questions", "nodes", "edges",
    "questioners_only", "responders_only", "both", "qr_ratio",
    *(f"{m}_mean_std" for m in MEASURES),
)


def comparison_rows(reports: list[dict]) -> list[list[str]]:
    rows = []
    for rep in reports:
        row = [rep["site"], str(rep["ingest"]["questions"]), str(rep["graph"]["nodes"]),
               str(rep["graph"]["edges"]), str(rep["roles"]["questioners_only"]),
               str(rep["roles"]["responders_only"]), str(rep["roles"]["both"]),
               rep["roles"]["qr_ratio_display"]]
        for m in MEASURES:
            st = rep["metrics"].get(m)
            if not st or st["mean"] is None:
                row.append("undefined")
            else:
                std = "undefined" if st["std"] is None else f"{st['std']:.4f}"
                row.append(f"{st['mean']:.4f} ± {std}")
        rows.append(row)
    return rows


def cmd_compare(args) -> int:
    if len(args.reports) < 2:
        log.error("compare needs at least 2 reports, got %d", len(args.reports))
        return EXIT_USAGE
    reports = []
    for p in args.reports:
        try:
            rep = json.loads(Path(p).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            log.error("cannot load %s: %s", p, exc)
            return EXIT_USAGE
        if not isinstance(rep, dict) or rep.get("schema_version") != SCHEMA_VERSION:
            log.error("%s: schema version %r, expected %d", p,
                      rep.get("schema_version") if isinstance(rep, dict) else None, SCHEMA_VERSION)
            return EXIT_USAGE
        reports.append(rep)
    rows = comparison_rows(reports)

    with open(args.csv, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COMPARE_COLUMNS)
        w.writerows(rows)

    widths = [max(len(c), *(len(r[i]) for r in rows)) for i, c in enumerate(COMPARE_COLUMNS)]
    print("  ".join(c.ljust(wd) for c, wd in zip(COMPARE_COLUMNS, widths)))
    for r in rows:
        print("  ".join(v.ljust(wd) for v, wd in zip(r, widths)))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qrnet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qrnet {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fetch", help="download <slug>.7z from the dump archive")
    p.add_argument("slug", help="site slug, e.g. genai.stackexchange.com")
    p.add_argument("--dest", default="dumps", help="directory to save into (default: ./dumps)")
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("analyze", help="build the QR network and compute all measures")
    p.add_argument("--posts", required=True, help="decompressed Posts.xml")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON,
                   help="edge weight is 1/(r + epsilon) (default: %(default)s)")
    p.add_argument("--time-unit", choices=sorted(TIME_UNITS), default="hours",
                   help="unit of the response time r (default: hours)")
    p.add_argument("--damping", type=float, default=0.85, help="PageRank damping factor")
    p.add_argument("--tol", type=float, default=1e-9, help="power-iteration tolerance")
    p.add_argument("--max-iter", type=int, default=1000, help="power-iteration cap")
    p.add_argument("--weighted", action="store_true",
                   help="use response-time weights inside the centrality measures")
    p.add_argument("--undirected", action="store_true",
                   help="symmetrise the graph before computing centralities")
    p.add_argument("--reverse-edges", action="store_true",
                   help="point edges responder -> questioner")
    p.add_argument("--population-std", action="store_true",
                   help="population instead of sample standard deviation")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: all cores); output does not depend on it")
    p.add_argument("--format", default=",".join(DEFAULT_FORMATS),
                   help=f"comma list from {','.join(FORMATS)}")
    p.add_argument("--site", default=None, help="label for the report (default: from path)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="tabulate two or more report.json files")
    p.add_argument("reports", nargs="*", help="report.json files")
    p.add_argument("--csv", default="comparison.csv", help="where to write the CSV table")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="qrnet: %(levelname)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
