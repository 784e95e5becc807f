"""Versioned analysis sessions.

A session snapshot is immutable: advancing by one curation decision yields a
new snapshot with version + 1. Persistence is event-sourced: the file stores
the corpus, the config, and the decision log; loading re-clusters and
replays the decisions, then checks the result against the stored partition
digest so silent drift (e.g. from an algorithm change) is caught rather than
papered over.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from dataclasses import dataclass, replace

from .cluster import (DecisionKind, MergeDecision, Partition, apply_decision,
                      cluster_refs)
from .config import Config
from .corpus import Corpus, Publication, RawCitedRef, SourceFormat
from .errors import CorruptSession, EmptyCorpus, EmptyPartition, UnsupportedVersion
from .refparse import parse_corpus_refs
from .spectrum import cluster_ncr, compute_indicators, compute_spectrum

FORMAT_VERSION = 1

SPECTRUM_COLUMNS = ("rpy", "ncr", "deviation")
CLUSTER_COLUMNS = ("cluster_id", "canonical", "rpy", "n_cr", "perc_yr",
                   "perc_all", "n_top10", "n_top25", "n_top50")


@dataclass(frozen=True)
class SessionSnapshot:
    version: int
    corpus_ref: str
    corpus: Corpus
    partition: Partition
    decisions: tuple[MergeDecision, ...]
    config: Config


def _canonical(data) -> bytes:
    return json.dumps(data, sort_keys=True, separators=(",", ":")).encode("utf-8")


def corpus_digest(corpus: Corpus) -> str:
    return hashlib.sha256(_canonical(_corpus_to_dict(corpus))).hexdigest()[:16]


def partition_digest(partition: Partition) -> str:
    shape = sorted(
        [c.cluster_id, sorted([cid, pos] for cid, pos in
                              (m.raw_id for m in c.members))]
        for c in partition)
    return hashlib.sha256(_canonical(shape)).hexdigest()[:16]


def create_session(corpus: Corpus, config: Config | None = None) -> SessionSnapshot:
    """Auto-cluster a corpus into a version-1 snapshot."""
    if not corpus.publications:
        raise EmptyCorpus("corpus has no publications")
    config = config or Config()
    partition = cluster_refs(parse_corpus_refs(corpus), config.threshold)
    return SessionSnapshot(
        version=1,
        corpus_ref=corpus_digest(corpus),
        corpus=corpus,
        partition=partition,
        decisions=(),
        config=config,
    )


def advance(snapshot: SessionSnapshot, decision: MergeDecision) -> SessionSnapshot:
    """Apply one decision, returning the next version. The input is unchanged."""
    partition = apply_decision(snapshot.partition, decision)
    return replace(snapshot,
                   version=snapshot.version + 1,
                   partition=partition,
                   decisions=snapshot.decisions + (decision,))


def session_spectrum(snapshot: SessionSnapshot):
    return compute_spectrum(snapshot.partition,
                            window=snapshot.config.window,
                            pair_dedup=snapshot.config.pair_dedup)


def session_series(snapshot: SessionSnapshot) -> list[tuple[int, int]]:
    return [(p.rpy, p.ncr) for p in session_spectrum(snapshot)]


def _fmt6(value: float) -> str:
    if value == 0.0:
        value = 0.0  # avoid "-0.000000"
    return f"{value:.6f}"


def export_spectrum_csv(snapshot: SessionSnapshot, out) -> int:
    """Write the spectrum as CSV bytes (UTF-8, LF); returns the byte count."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SPECTRUM_COLUMNS)
    try:
        points = session_spectrum(snapshot)
    except EmptyCorpus:
        points = ()
    for p in points:
        writer.writerow([p.rpy, p.ncr, _fmt6(p.deviation)])
    data = buf.getvalue().encode("utf-8")
    out.write(data)
    return len(data)


def export_clusters_csv(snapshot: SessionSnapshot, out) -> int:
    """Write per-cluster indicators as CSV bytes; returns the byte count."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CLUSTER_COLUMNS)
    try:
        indicators = {ind.cluster_id: ind for ind in compute_indicators(
            snapshot.partition, snapshot.corpus, snapshot.config.pair_dedup)}
    except EmptyPartition:
        indicators = {}
    ordered = sorted(snapshot.partition,
                     key=lambda c: (c.rpy is None, c.rpy or 0, c.cluster_id))
    for c in ordered:
        ind = indicators[c.cluster_id]
        writer.writerow([
            c.cluster_id,
            c.canonical.raw,
            "" if c.rpy is None else c.rpy,
            ind.n_cr,
            _fmt6(ind.perc_yr),
            _fmt6(ind.perc_all),
            ind.n_top10,
            ind.n_top25,
            ind.n_top50,
        ])
    data = buf.getvalue().encode("utf-8")
    out.write(data)
    return len(data)


def _corpus_to_dict(corpus: Corpus) -> dict:
    return {
        "format": corpus.format.value,
        "publications": [
            {
                "id": p.id,
                "title": p.title,
                "authors": list(p.authors),
                "pub_year": p.pub_year,
                "source_title": p.source_title,
                "doi": p.doi,
                "raw_refs": [r.raw for r in p.raw_refs],
            }
            for p in corpus.publications
        ],
        "diagnostics": [[line, msg] for line, msg in corpus.diagnostics],
    }


def _corpus_from_dict(data: dict) -> Corpus:
    pubs = []
    for p in data["publications"]:
        refs = tuple(RawCitedRef(raw, p["id"], i)
                     for i, raw in enumerate(p["raw_refs"]))
        pubs.append(Publication(
            id=p["id"], title=p["title"], authors=tuple(p["authors"]),
            pub_year=p["pub_year"], source_title=p["source_title"],
            doi=p["doi"], raw_refs=refs))
    return Corpus(tuple(pubs), SourceFormat(data["format"]),
                  tuple((line, msg) for line, msg in data["diagnostics"]))


def _decision_to_dict(d: MergeDecision) -> dict:
    return {
        "kind": d.kind.value,
        "targets": list(d.targets),
        "split_members": [[cid, pos] for cid, pos in d.split_members],
        "timestamp": d.timestamp,
        "note": d.note,
    }


def _decision_from_dict(data: dict) -> MergeDecision:
    return MergeDecision(
        kind=DecisionKind(data["kind"]),
        targets=tuple(data["targets"]),
        split_members=tuple((cid, pos) for cid, pos in data["split_members"]),
        timestamp=data["timestamp"],
        note=data["note"],
    )


def save(snapshot: SessionSnapshot, path) -> None:
    """Persist a snapshot as a checksummed, format-versioned JSON document."""
    payload = {
        "session": {"version": snapshot.version,
                    "corpus_ref": snapshot.corpus_ref},
        "config": snapshot.config.to_dict(),
        "corpus": _corpus_to_dict(snapshot.corpus),
        "decisions": [_decision_to_dict(d) for d in snapshot.decisions],
        "partition_digest": partition_digest(snapshot.partition),
    }
    document = {
        "format_version": FORMAT_VERSION,
        "checksum": hashlib.sha256(_canonical(payload)).hexdigest(),
        "payload": payload,
    }
    path = os.fspath(path)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(document, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def load(path) -> SessionSnapshot:
    """Load a session file: verify checksums, re-cluster, replay decisions."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptSession(f"not a valid session document: {exc}") from exc
    if not isinstance(document, dict) or "format_version" not in document:
        raise CorruptSession("missing format_version")
    if document["format_version"] != FORMAT_VERSION:
        raise UnsupportedVersion(
            f"unsupported session format version {document['format_version']!r}")
    payload = document.get("payload")
    if payload is None or "checksum" not in document:
        raise CorruptSession("missing payload or checksum")
    digest = hashlib.sha256(_canonical(payload)).hexdigest()
    if digest != document["checksum"]:
        raise CorruptSession("checksum mismatch")

    try:
        corpus = _corpus_from_dict(payload["corpus"])
        config = Config.from_dict(payload["config"])
        decisions = tuple(_decision_from_dict(d) for d in payload["decisions"])
        stored_version = payload["session"]["version"]
        stored_corpus_ref = payload["session"]["corpus_ref"]
        stored_partition_digest = payload["partition_digest"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptSession(f"malformed payload: {exc}") from exc

    if corpus_digest(corpus) != stored_corpus_ref:
        raise CorruptSession("corpus digest mismatch")
    if stored_version != len(decisions) + 1:
        raise CorruptSession(
            f"version {stored_version} inconsistent with {len(decisions)} decisions")

    partition = cluster_refs(parse_corpus_refs(corpus), config.threshold)
    for decision in decisions:
        partition = apply_decision(partition, decision)
    if partition_digest(partition) != stored_partition_digest:
        raise CorruptSession("replayed partition does not match stored digest")

    return SessionSnapshot(
        version=stored_version,
        corpus_ref=stored_corpus_ref,
        corpus=corpus,
        partition=partition,
        decisions=decisions,
        config=config,
    )
