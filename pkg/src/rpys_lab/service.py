"""HTTP JSON API over analysis sessions.

Datasets live in memory; each one guards its snapshot with a lock so
concurrent decision POSTs apply in a total order, and writes through to a
session file when one is attached. Decision POSTs may pin an expected
version: a mismatch answers 409 instead of applying to a moved target.
"""

from __future__ import annotations

import io
import math
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .cluster import MergeDecision
from .config import Config
from .corpus import SourceFormat, detect_format, parse_scopus_csv, parse_wos_export
from .errors import RpysError
from .segments import Scale, select_k
from .session import (SessionSnapshot, advance, create_session,
                      export_clusters_csv, export_spectrum_csv, save,
                      session_series, session_spectrum)
from .spectrum import (attach_top_clusters, citing_year_profile, cluster_ncr,
                       compute_indicators, detect_peaks, top_clusters_for_year)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail=None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


@dataclass
class DatasetEntry:
    snapshot: SessionSnapshot
    lock: threading.Lock
    path: str | None


class DatasetStore:
    """In-memory dataset registry with optional write-through directory."""

    def __init__(self, data_dir: str | None = None):
        self._entries: dict[str, DatasetEntry] = {}
        self._registry_lock = threading.Lock()
        self.data_dir = data_dir

    def add(self, snapshot: SessionSnapshot, path: str | None = None,
            dataset_id: str | None = None) -> str:
        dataset_id = dataset_id or uuid.uuid4().hex[:12]
        with self._registry_lock:
            self._entries[dataset_id] = DatasetEntry(snapshot, threading.Lock(), path)
        return dataset_id

    def entry(self, dataset_id: str) -> DatasetEntry:
        with self._registry_lock:
            entry = self._entries.get(dataset_id)
        if entry is None:
            raise ApiError(404, "NotFound", f"unknown dataset {dataset_id!r}")
        return entry

    def ids(self) -> list[str]:
        with self._registry_lock:
            return list(self._entries)


class DatasetUpload(BaseModel):
    content: str
    format: str = "auto"


class DecisionBody(BaseModel):
    kind: str
    clusters: list[str] | None = None
    cluster: str | None = None
    members: list[tuple[str, int]] | None = None
    expected_version: int | None = None
    note: str | None = None


def _spectrum_json(points) -> list[dict]:
    return [{"rpy": p.rpy, "ncr": p.ncr, "deviation": p.deviation}
            for p in points]


def _build_decision(body: DecisionBody) -> MergeDecision:
    kind = body.kind.lower()
    if kind == "merge":
        if not body.clusters or len(body.clusters) < 1:
            raise ApiError(400, "BadRequest",
                           "merge requires a 'clusters' list of cluster ids")
        return MergeDecision.merge(body.clusters, note=body.note)
    if kind == "split":
        if not body.cluster or not body.members:
            raise ApiError(400, "BadRequest",
                           "split requires 'cluster' and a 'members' list")
        return MergeDecision.split(body.cluster, body.members, note=body.note)
    raise ApiError(400, "BadRequest", f"unknown decision kind {body.kind!r}")


def create_app(store: DatasetStore, config: Config | None = None,
               cors_origins: tuple[str, ...] = ("*",)) -> FastAPI:
    config = config or Config()
    app = FastAPI(title="rpys-lab", version="0.1.0")
    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def handle_api_error(request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={
            "code": exc.code, "message": exc.message, "detail": exc.detail})

    @app.exception_handler(RpysError)
    async def handle_data_error(request, exc: RpysError):
        return JSONResponse(status_code=400, content={
            "code": "BadRequest", "message": str(exc), "detail": None})

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={
            "code": "BadRequest", "message": "invalid request body or parameters",
            "detail": exc.errors()})

    @app.exception_handler(Exception)
    async def handle_internal(request, exc: Exception):
        return JSONResponse(status_code=500, content={
            "code": "Internal", "message": str(exc), "detail": None})

    @app.post("/datasets")
    def post_dataset(body: DatasetUpload):
        data = body.content.encode("utf-8")
        fmt = body.format.lower()
        if fmt == "auto":
            detected = detect_format(data)
            if detected is SourceFormat.UNKNOWN:
                raise ApiError(400, "BadRequest",
                               "could not detect the export format")
            fmt = detected.value
        if fmt == SourceFormat.WOS_TAGGED.value:
            corpus = parse_wos_export(data)
        elif fmt == SourceFormat.SCOPUS_CSV.value:
            corpus = parse_scopus_csv(data)
        else:
            raise ApiError(400, "BadRequest", f"unknown format {body.format!r}")
        snapshot = create_session(corpus, config)
        dataset_id = store.add(snapshot)
        if store.data_dir:
            path = str(Path(store.data_dir) / f"{dataset_id}.session.json")
            store.entry(dataset_id).path = path
            save(snapshot, path)
        return {
            "dataset_id": dataset_id,
            "version": snapshot.version,
            "n_publications": len(corpus.publications),
            "n_refs": corpus.n_refs,
        }

    @app.get("/datasets/{dataset_id}/spectrum")
    def get_spectrum(dataset_id: str, min_rpy: int | None = None,
                     max_rpy: int | None = None):
        snapshot = store.entry(dataset_id).snapshot
        points = session_spectrum(snapshot)
        if min_rpy is not None:
            points = [p for p in points if p.rpy >= min_rpy]
        if max_rpy is not None:
            points = [p for p in points if p.rpy <= max_rpy]
        return {"version": snapshot.version, "spectrum": _spectrum_json(points)}

    @app.get("/datasets/{dataset_id}/peaks")
    def get_peaks(dataset_id: str, min_deviation: float | None = None,
                  max_rpy: int | None = None):
        snapshot = store.entry(dataset_id).snapshot
        if min_deviation is None:
            min_deviation = snapshot.config.min_deviation
        peaks = detect_peaks(session_spectrum(snapshot), min_deviation, max_rpy)
        peaks = attach_top_clusters(peaks, snapshot.partition,
                                    pair_dedup=snapshot.config.pair_dedup)
        canonical = {c.cluster_id: c.canonical.raw for c in snapshot.partition}
        return {"version": snapshot.version, "peaks": [
            {"rpy": p.rpy, "deviation": p.deviation, "ncr": p.ncr,
             "top_clusters": [
                 {"cluster_id": cid, "n_cr": n, "canonical": canonical[cid]}
                 for cid, n in p.top_clusters]}
            for p in peaks]}

    @app.get("/datasets/{dataset_id}/years/{rpy}/clusters")
    def get_year_clusters(dataset_id: str, rpy: int, top: int = 10):
        if top < 1:
            raise ApiError(400, "BadRequest", "top must be >= 1")
        snapshot = store.entry(dataset_id).snapshot
        ranked = top_clusters_for_year(rpy, top, snapshot.partition,
                                       snapshot.config.pair_dedup)
        indicators = {}
        if snapshot.partition:
            indicators = {ind.cluster_id: ind for ind in compute_indicators(
                snapshot.partition, snapshot.corpus, snapshot.config.pair_dedup)}
        by_id = {c.cluster_id: c for c in snapshot.partition}
        rows = []
        for cid, n_cr in ranked:
            ind = indicators[cid]
            rows.append({
                "cluster_id": cid,
                "canonical": by_id[cid].canonical.raw,
                "rpy": by_id[cid].rpy,
                "n_cr": n_cr,
                "n_members": len(by_id[cid].members),
                "perc_yr": ind.perc_yr,
                "perc_all": ind.perc_all,
                "n_top10": ind.n_top10,
                "n_top25": ind.n_top25,
                "n_top50": ind.n_top50,
            })
        return {"version": snapshot.version, "rpy": rpy, "clusters": rows}

    @app.get("/datasets/{dataset_id}/clusters/{cluster_id}")
    def get_cluster(dataset_id: str, cluster_id: str):
        snapshot = store.entry(dataset_id).snapshot
        by_id = {c.cluster_id: c for c in snapshot.partition}
        cluster = by_id.get(cluster_id)
        if cluster is None:
            raise ApiError(404, "NotFound", f"unknown cluster {cluster_id!r}")
        year_of = {p.id: p.pub_year for p in snapshot.corpus.publications}
        profile = citing_year_profile(cluster, year_of,
                                      snapshot.config.pair_dedup)
        return {"version": snapshot.version, "cluster": {
            "cluster_id": cluster.cluster_id,
            "canonical": cluster.canonical.raw,
            "rpy": cluster.rpy,
            "n_cr": cluster_ncr(cluster, snapshot.config.pair_dedup),
            "members": [
                {"citing_id": m.raw_id[0], "position": m.raw_id[1],
                 "raw": m.raw, "first_author": m.first_author, "rpy": m.rpy,
                 "source": m.source, "volume": m.volume, "page": m.page,
                 "doi": m.doi}
                for m in cluster.members],
            "citing_year_profile": {str(y): n for y, n in profile},
        }}

    @app.post("/datasets/{dataset_id}/decisions")
    def post_decision(dataset_id: str, body: DecisionBody):
        entry = store.entry(dataset_id)
        decision = _build_decision(body)
        with entry.lock:
            if (body.expected_version is not None
                    and body.expected_version != entry.snapshot.version):
                raise ApiError(
                    409, "Conflict",
                    f"expected version {body.expected_version}, "
                    f"current is {entry.snapshot.version}",
                    detail={"current_version": entry.snapshot.version})
            snapshot = advance(entry.snapshot, decision)
            entry.snapshot = snapshot
            if entry.path:
                save(snapshot, entry.path)
        return {"version": snapshot.version}

    @app.get("/datasets/{dataset_id}/segments")
    def get_segments(dataset_id: str, k_max: int = 8,
                     min_len: int | None = None, scale: str | None = None):
        snapshot = store.entry(dataset_id).snapshot
        if min_len is None:
            min_len = snapshot.config.min_len
        try:
            fit_scale = Scale(scale) if scale else snapshot.config.scale
        except ValueError:
            raise ApiError(400, "BadRequest", f"unknown scale {scale!r}")
        fit = select_k(session_series(snapshot), k_max, min_len=min_len,
                       scale=fit_scale)
        bic = fit.bic if math.isfinite(fit.bic) else None
        return {"version": snapshot.version, "fit": {
            "k": fit.k,
            "total_sse": fit.total_sse,
            "bic": bic,
            "scale": fit.scale.value,
            "segments": [
                {"start_rpy": s.start_rpy, "end_rpy": s.end_rpy,
                 "slope": s.slope, "intercept": s.intercept, "sse": s.sse}
                for s in fit.segments],
        }}

    @app.get("/datasets/{dataset_id}/export/spectrum.csv")
    def export_spectrum(dataset_id: str):
        snapshot = store.entry(dataset_id).snapshot
        buf = io.BytesIO()
        export_spectrum_csv(snapshot, buf)
        return Response(content=buf.getvalue(),
                        media_type="text/csv; charset=utf-8",
                        headers={"X-Snapshot-Version": str(snapshot.version)})

    @app.get("/datasets/{dataset_id}/export/clusters.csv")
    def export_clusters(dataset_id: str):
        snapshot = store.entry(dataset_id).snapshot
        buf = io.BytesIO()
        export_clusters_csv(snapshot, buf)
        return Response(content=buf.getvalue(),
                        media_type="text/csv; charset=utf-8",
                        headers={"X-Snapshot-Version": str(snapshot.version)})

    @app.get("/datasets/{dataset_id}/versions")
    def get_versions(dataset_id: str):
        snapshot = store.entry(dataset_id).snapshot
        history = []
        for i, d in enumerate(snapshot.decisions):
            history.append({
                "version": i + 2,
                "kind": d.kind.value,
                "targets": list(d.targets),
                "split_members": [[cid, pos] for cid, pos in d.split_members],
                "timestamp": d.timestamp,
                "note": d.note,
            })
        return {"version": snapshot.version, "history": history}

    return app


def serve(store: DatasetStore, port: int, host: str = "127.0.0.1",
          config: Config | None = None,
          cors_origins: tuple[str, ...] = ("*",)) -> None:
    """Run the API with uvicorn (blocking)."""
    import uvicorn

    app = create_app(store, config=config, cors_origins=cors_origins)
    uvicorn.run(app, host=host, port=port, log_level="info")
