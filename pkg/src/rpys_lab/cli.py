"""Command-line interface for batch runs and serving the HTTP API.

Exit codes: 0 success, 1 usage error, 2 data error. Diagnostics go to
standard error; data goes to standard output or to files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import Config
from .corpus import SourceFormat, detect_format, parse_scopus_csv, parse_wos_export
from .errors import RpysError, UnknownFormat
from .segments import Scale, select_k
from .session import (create_session, export_spectrum_csv, load, save,
                      session_series, session_spectrum)
from .spectrum import attach_top_clusters, detect_peaks, top_clusters_for_year

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


def _read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _load_config(path: str | None) -> Config:
    if path is None:
        return Config()
    with open(path, "r", encoding="utf-8") as fh:
        return Config.from_dict(json.load(fh))


def cmd_ingest(args) -> int:
    data = _read_input(args.infile)
    fmt = args.format
    if fmt == "auto":
        detected = detect_format(data)
        if detected is SourceFormat.UNKNOWN:
            raise UnknownFormat(
                "could not detect the export format; pass --format wos|scopus")
        fmt = detected.value
    corpus = parse_wos_export(data) if fmt == "wos" else parse_scopus_csv(data)
    for line_no, message in corpus.diagnostics:
        print(f"line {line_no}: {message}", file=sys.stderr)
    snapshot = create_session(corpus, _load_config(args.config))
    save(snapshot, args.session)
    print(f"ingested {len(corpus.publications)} publications, "
          f"{corpus.n_refs} cited references "
          f"({len(corpus.diagnostics)} rejected) -> {args.session}",
          file=sys.stderr)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    snapshot = load(args.session)
    if args.csv:
        with open(args.csv, "wb") as fh:
            export_spectrum_csv(snapshot, fh)
        print(f"wrote {args.csv}", file=sys.stderr)
    else:
        export_spectrum_csv(snapshot, sys.stdout.buffer)
        sys.stdout.buffer.flush()
    return EXIT_OK


def cmd_peaks(args) -> int:
    snapshot = load(args.session)
    peaks = detect_peaks(session_spectrum(snapshot),
                         min_deviation=args.min_deviation,
                         max_rpy=args.max_rpy)
    peaks = attach_top_clusters(peaks, snapshot.partition, k=3,
                                pair_dedup=snapshot.config.pair_dedup)
    canonical = {c.cluster_id: c.canonical.raw for c in snapshot.partition}
    print("rpy\tncr\tdeviation\ttop_clusters")
    for p in peaks:
        tops = "; ".join(f"{canonical[cid]} ({n})" for cid, n in p.top_clusters)
        print(f"{p.rpy}\t{p.ncr}\t{p.deviation:.6f}\t{tops}")
    return EXIT_OK


def cmd_segments(args) -> int:
    snapshot = load(args.session)
    fit = select_k(session_series(snapshot), args.k_max,
                   min_len=args.min_len, scale=Scale(args.scale))
    print(f"k={fit.k}\tscale={fit.scale.value}\t"
          f"total_sse={fit.total_sse:.6f}\tbic={fit.bic:.6f}")
    for seg in fit.segments:
        print(f"{seg.start_rpy}-{seg.end_rpy}\tslope={seg.slope:.6f}\t"
              f"intercept={seg.intercept:.6f}\tsse={seg.sse:.6f}")
    return EXIT_OK


def cmd_clusters(args) -> int:
    snapshot = load(args.session)
    ranked = top_clusters_for_year(args.rpy, args.top, snapshot.partition,
                                   snapshot.config.pair_dedup)
    by_id = {c.cluster_id: c for c in snapshot.partition}
    print("cluster_id\tn_cr\tcanonical")
    for cid, n_cr in ranked:
        print(f"{cid}\t{n_cr}\t{by_id[cid].canonical.raw}")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import DatasetStore, serve

    snapshot = load(args.session)
    store = DatasetStore()
    dataset_id = store.add(snapshot, path=args.session)
    port = int(os.environ.get("RPYS_LAB_PORT", args.port))
    print(f"serving dataset {dataset_id} from {args.session} "
          f"on http://{args.host}:{port}", file=sys.stderr)
    serve(store, port=port, host=args.host)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rpys-lab",
        description="Cited-references analysis: spectra, peaks, clusters, "
                    "growth segments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse an export file into a session")
    p.add_argument("--format", choices=["auto", "wos", "scopus"], default="auto")
    p.add_argument("--in", dest="infile", required=True,
                   help="input file, or - for stdin")
    p.add_argument("--session", required=True, help="session file to write")
    p.add_argument("--config", default=None,
                   help="optional JSON config file (all values have defaults)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("spectrum", help="print or export the spectrum CSV")
    p.add_argument("--session", required=True)
    p.add_argument("--csv", default=None, help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("peaks", help="list peak years")
    p.add_argument("--session", required=True)
    p.add_argument("--min-deviation", type=float, default=0.0)
    p.add_argument("--max-rpy", type=int, default=None)
    p.set_defaults(func=cmd_peaks)

    p = sub.add_parser("segments", help="fit growth segments to the spectrum")
    p.add_argument("--session", required=True)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--min-len", type=int, default=5)
    p.add_argument("--scale", choices=["linear", "log1p"], default="log1p")
    p.set_defaults(func=cmd_segments)

    p = sub.add_parser("clusters", help="rank a year's clusters")
    p.add_argument("--session", required=True)
    p.add_argument("--rpy", type=int, required=True)
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=cmd_clusters)

    p = sub.add_parser("serve", help="serve the HTTP API for a session")
    p.add_argument("--session", required=True)
    p.add_argument("--port", type=int, default=8017)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except RpysError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except UnicodeDecodeError as exc:
        print(f"error: input is not valid UTF-8: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def run() -> None:
    sys.exit(main())
