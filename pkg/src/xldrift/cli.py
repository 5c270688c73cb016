"""Command-line entry point: ingest, index, analyze, project, sample.

Configuration layering, lowest to highest precedence: built-in defaults
(which mirror the analysis protocol: k=10, n=1000, pool NIH+NSF+UKRI),
a key=value config file, XLD_-prefixed environment variables, then flags.

Sampling is reproducible across platforms: ids are drawn by a partial
Fisher-Yates shuffle of the ascending-sorted eligible id list using
Python's Mersenne Twister (`random.Random(seed)`).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, fields, replace

from . import __version__, analysis, corpus as corpus_mod, knn, projection
from .corpus import Corpus, CoordinateType, load_records, load_vectors
from .errors import ComputeError, DataError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_COMPUTE = 3

ENV_PREFIX = "XLD_"


@dataclass
class RunConfig:
    records: str = ""
    vectors: str = ""
    index_file: str = ""
    pair: str = "native_ja,mt_en"
    pool: str = "NIH,NSF,UKRI"
    k: int = 10
    n: int = 1000
    seed: int = 0
    degree: int = 16
    pool_size: int = 64
    entry_count: int = 4
    max_evaluations: int = 4096
    bins: int = 40
    exact: bool = False
    out: str = "out"

    def coordinate_pair(self) -> tuple[CoordinateType, CoordinateType]:
        parts = [p.strip() for p in self.pair.split(",")]
        if len(parts) != 2:
            raise ValueError(f"pair must be two coordinate types, got {self.pair!r}")
        return (CoordinateType(parts[0]), CoordinateType(parts[1]))

    def agency_pool(self) -> frozenset[str]:
        return frozenset(p.strip() for p in self.pool.split(",") if p.strip())

    def search_params(self) -> knn.SearchParams:
        return knn.SearchParams(
            pool_size=self.pool_size,
            entry_count=self.entry_count,
            max_evaluations=self.max_evaluations,
        )


_BOOL_FIELDS = {"exact"}
_INT_FIELDS = {
    "k", "n", "seed", "degree", "pool_size", "entry_count", "max_evaluations", "bins",
}


def _coerce(name: str, value: str):
    if name in _BOOL_FIELDS:
        return value.strip().lower() in ("1", "true", "yes", "on")
    if name in _INT_FIELDS:
        return int(value)
    return value


def load_config_file(path) -> dict:
    values = {}
    known = {f.name for f in fields(RunConfig)}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in known:
                raise ValueError(f"{path}:{line_no}: unknown key {key!r}")
            values[key] = _coerce(key, value.strip())
    return values


def resolve_config(args: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    config = RunConfig()
    if getattr(args, "config", None):
        config = replace(config, **load_config_file(args.config))
    for f in fields(RunConfig):
        env_key = ENV_PREFIX + f.name.upper()
        if env_key in environ:
            config = replace(config, **{f.name: _coerce(f.name, environ[env_key])})
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            config = replace(config, **{f.name: value})
    return config


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xldrift", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--records", help="record file (JSON Lines)")
        p.add_argument("--vectors", help="vector file (XLDV binary)")
        p.add_argument("--index-file", dest="index_file", help="graph index file (XLGI)")
        p.add_argument("--pair", help="coordinate-type pair, e.g. native_ja,mt_en")
        p.add_argument("--pool", help="comma-separated pool agencies")
        p.add_argument("--k", type=int, help="neighbors per retrieval (default 10)")
        p.add_argument("--n", type=int, help="sample size (default 1000)")
        p.add_argument("--seed", type=int, help="sampling / build seed")
        p.add_argument("--degree", type=int, help="graph degree (default 16)")
        p.add_argument("--pool-size", dest="pool_size", type=int, help="search pool size")
        p.add_argument("--entry-count", dest="entry_count", type=int, help="search entry points")
        p.add_argument("--max-evaluations", dest="max_evaluations", type=int,
                       help="search distance-evaluation budget")
        p.add_argument("--bins", type=int, help="histogram bin count (default 40)")
        p.add_argument("--exact", action="store_const", const=True, default=None,
                       help="use the brute-force oracle instead of the graph index")
        p.add_argument("--out", help="output directory (default ./out)")

    for name, helptext in (
        ("ingest", "load records (and vectors, if given) and print agency counts"),
        ("index", "build and persist the graph index"),
        ("analyze", "emit distance table, overlap report, and histogram"),
        ("project", "project points to 2-D and export plot data"),
        ("sample", "print the reproducible sample of paired project ids"),
    ):
        add_common(sub.add_parser(name, help=helptext))
    return parser


class _OutputTracker:
    """Removes partially written outputs when a command fails."""

    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.written = []

    def path(self, name) -> str:
        os.makedirs(self.out_dir, exist_ok=True)
        p = os.path.join(self.out_dir, name)
        self.written.append(p)
        return p

    def cleanup(self):
        for p in self.written:
            try:
                os.remove(p)
            except OSError:
                pass


def _require(config: RunConfig, *names: str) -> None:
    for name in names:
        if not getattr(config, name):
            raise ValueError(f"missing required setting {name!r} (flag --{name.replace('_', '-')})")


def _load_corpus(config: RunConfig, with_vectors: bool = True) -> Corpus:
    _require(config, "records")
    corpus = load_records(config.records)
    if with_vectors:
        _require(config, "vectors")
        load_vectors(corpus, config.vectors)
    return corpus


def _file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _config_echo(config: RunConfig) -> dict:
    return {f.name: getattr(config, f.name) for f in fields(RunConfig)}


def _build_index(config: RunConfig, corpus: Corpus):
    points = corpus.points()
    if config.exact:
        return knn.build_exact(points)
    index_path = config.index_file or os.path.join(config.out, "index.xlgi")
    if os.path.exists(index_path):
        return knn.load_graph(index_path, corpus)
    return knn.build_graph(points, degree=config.degree, build_seed=config.seed)


def cmd_ingest(config: RunConfig, out: _OutputTracker) -> int:
    corpus = _load_corpus(config, with_vectors=bool(config.vectors))
    counts = corpus.agency_counts()
    for agency in sorted(counts):
        print(f"{agency}\t{counts[agency]}")
    summary = {
        "records": len(corpus.records),
        "vectors": len(corpus.vectors),
        "agency_counts": {a: counts[a] for a in sorted(counts)},
    }
    with open(out.path("corpus_summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return EXIT_OK


def cmd_index(config: RunConfig, out: _OutputTracker) -> int:
    corpus = _load_corpus(config)
    meta = {"mode": "exact" if config.exact else "graph", "points": len(corpus.vectors)}
    if not config.exact:
        started = time.monotonic()
        index = knn.build_graph(
            corpus.points(), degree=config.degree, build_seed=config.seed
        )
        seconds = time.monotonic() - started
        knn.save_graph(index, out.path("index.xlgi"))
        meta.update(degree=config.degree, build_seed=config.seed)
        print(f"built graph index: {len(index)} points, degree {config.degree}, "
              f"{seconds:.2f}s")
    else:
        print(f"exact mode: no graph built over {len(corpus.vectors)} points")
    with open(out.path("index_meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return EXIT_OK


def cmd_analyze(config: RunConfig, out: _OutputTracker) -> int:
    corpus = _load_corpus(config)
    index = _build_index(config, corpus)
    pair = config.coordinate_pair()
    pool = config.agency_pool()
    params = config.search_params()
    spec = analysis.SampleSpec(seed=config.seed, n=config.n, pair=pair)

    report = analysis.distance_table(corpus, spec, pool, config.k, index, params)
    overlap = analysis.overlap_table(corpus, spec, pool, config.k, index, params)
    ids = sorted(analysis.sample_ids(corpus, spec))
    pair_values = [analysis.pair_distance(corpus, pid, pair) for pid in ids]
    hist = analysis.distance_histogram(pair_values, config.bins, label="within-pair")

    with open(out.path("distance_table.jsonl"), "w", encoding="utf-8") as fh:
        fh.write(analysis.distance_report_to_jsonl(report))
    with open(out.path("distance_table.txt"), "w", encoding="utf-8") as fh:
        fh.write(analysis.render_distance_table(report))
    with open(out.path("overlap.jsonl"), "w", encoding="utf-8") as fh:
        fh.write(analysis.overlap_report_to_jsonl(overlap))
    with open(out.path("overlap.txt"), "w", encoding="utf-8") as fh:
        fh.write(analysis.render_overlap_table(overlap))
    with open(out.path("histogram.txt"), "w", encoding="utf-8") as fh:
        fh.write(analysis.histogram_to_text(hist))

    manifest = {
        "version": __version__,
        "config": _config_echo(config),
        "inputs": {
            "records_sha256": _file_sha256(config.records),
            "vectors_sha256": _file_sha256(config.vectors),
        },
        "index_mode": "exact" if config.exact else "graph",
    }
    with open(out.path("manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(analysis.render_distance_table(report), end="")
    print(analysis.render_overlap_table(overlap), end="")
    return EXIT_OK


def cmd_project(config: RunConfig, out: _OutputTracker) -> int:
    corpus = _load_corpus(config)
    pair = config.coordinate_pair()
    points = corpus.points(coordinate_types=pair)
    proj = projection.pca_2d(points)
    projection.export_plot_data(proj, out.path("projection.tsv"))
    fracs = proj.variance_fractions
    print(f"projected {len(points)} points; "
          f"variance fractions {fracs[0]:.4f}, {fracs[1]:.4f}")
    return EXIT_OK


def cmd_sample(config: RunConfig, out: _OutputTracker) -> int:
    corpus = _load_corpus(config)
    spec = analysis.SampleSpec(seed=config.seed, n=config.n, pair=config.coordinate_pair())
    ids = analysis.sample_ids(corpus, spec)
    with open(out.path("sample.txt"), "w", encoding="utf-8") as fh:
        for pid in ids:
            print(pid)
            fh.write(pid + "\n")
    return EXIT_OK


_COMMANDS = {
    "ingest": cmd_ingest,
    "index": cmd_index,
    "analyze": cmd_analyze,
    "project": cmd_project,
    "sample": cmd_sample,
}


def main(argv=None, environ=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = resolve_config(args, environ)
        out = _OutputTracker(config.out)
    except (ValueError, OSError) as exc:
        print(f"xldrift: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](config, out)
    except (DataError, FileNotFoundError) as exc:
        out.cleanup()
        print(f"xldrift {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        out.cleanup()
        print(f"xldrift {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ComputeError, ArithmeticError) as exc:
        out.cleanup()
        print(f"xldrift {args.command}: compute error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
