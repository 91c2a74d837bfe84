"""HTTP façade: read-only JSON API over an immutable serving snapshot.

Writes happen offline through the CLI (ingest, build-index); the service
only loads snapshots and answers queries, so handlers share state
through a single attribute swap and never lock. A failed reload keeps
the old snapshot serving.
"""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import analytics
from ._kernels import BACKEND
from .corpus import CorpusError
from .index import StaleIndexError
from .recommend import (
    RecommendError,
    Recommender,
    RecOptions,
    UnknownFacetError,
    UnknownSeedError,
    artist_share,
)
from .search import EmptyQueryError, Filters, SearchEngine, SearchError
from .snapshot import Snapshot, SnapshotError, load_snapshot

K_MAX = 100

access_log = logging.getLogger("lyricsearch.access")


class ServiceError(Exception):
    pass


@dataclass
class ServiceConfig:
    snapshot_dir: str
    host: str = "127.0.0.1"
    port: int = 8080
    k_default: int = 10
    alpha_default: float = 0.5
    lambda_default: float = 0.7
    artist_cap_default: int = 2
    cors_origins: list[str] = field(default_factory=list)

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        cfg = cls(snapshot_dir=data["snapshot_dir"])
        for key in (
            "host",
            "port",
            "k_default",
            "alpha_default",
            "lambda_default",
            "artist_cap_default",
            "cors_origins",
        ):
            if key in data:
                setattr(cfg, key, data[key])
        cfg.apply_env()
        return cfg

    def apply_env(self) -> None:
        self.snapshot_dir = os.environ.get(
            "LYRICSEARCH_SNAPSHOT_DIR", self.snapshot_dir
        )
        self.host = os.environ.get("LYRICSEARCH_HOST", self.host)
        self.port = int(os.environ.get("LYRICSEARCH_PORT", self.port))


class ServingState:
    """Holds the active snapshot; ``reload`` swaps it atomically."""

    def __init__(self, snap: Snapshot, config: ServiceConfig):
        self.config = config
        self._active: tuple[Snapshot, SearchEngine, Recommender] = self._wire(snap)
        self._stats_cache: tuple[int, dict] | None = None

    @staticmethod
    def _wire(snap: Snapshot):
        return (snap, SearchEngine(snap), Recommender(snap))

    @property
    def snapshot(self) -> Snapshot:
        return self._active[0]

    @property
    def engine(self) -> SearchEngine:
        return self._active[1]

    @property
    def recommender(self) -> Recommender:
        return self._active[2]

    def active(self) -> tuple[Snapshot, SearchEngine, Recommender]:
        """One consistent view; handlers read this exactly once so a
        concurrent reload can never mix two snapshots in one request."""
        return self._active

    def reload(self, dir: str | Path | None = None) -> dict:
        """Validate new artifacts, then swap; failure keeps the old state."""
        target = Path(dir) if dir else Path(self.config.snapshot_dir)
        snap = load_snapshot(target)  # raises before any state changes
        self._active = self._wire(snap)
        self._stats_cache = None
        self.config.snapshot_dir = str(target)
        return snap.fingerprints

    def stats_payload(self) -> dict:
        snap = self.snapshot
        key = id(snap)
        if self._stats_cache and self._stats_cache[0] == key:
            return self._stats_cache[1]
        stats = analytics.compute_stats(snap.corpus, snap.config)
        payload = stats.to_dict()
        payload["balance"] = analytics.balance_report(stats)
        self._stats_cache = (key, payload)
        return payload


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


def _song_dict(record, with_lyrics: bool = False) -> dict:
    data = {
        "id": str(record.id),
        "title": record.title,
        "artist": record.artist,
        "year": record.year,
        "genre": record.genre.display(),
        "emotion": record.emotion.display(),
    }
    if with_lyrics:
        data["lyrics"] = record.lyrics
        data["source"] = record.source
    return data


def _clamp_k(k: int, warnings: list[str]) -> int:
    if k > K_MAX:
        warnings.append(f"k clamped to {K_MAX}")
        return K_MAX
    if k < 1:
        warnings.append("k clamped to 1")
        return 1
    return k


def _clamp_unit(value: float, name: str, warnings: list[str]) -> float:
    if value < 0.0:
        warnings.append(f"{name} clamped to 0.0")
        return 0.0
    if value > 1.0:
        warnings.append(f"{name} clamped to 1.0")
        return 1.0
    return value


def create_app(
    config: ServiceConfig | None = None,
    snapshot_dir: str | Path | None = None,
) -> FastAPI:
    if config is None:
        if snapshot_dir is None:
            raise ServiceError("create_app needs a config or a snapshot dir")
        config = ServiceConfig(snapshot_dir=str(snapshot_dir))
    snap = load_snapshot(config.snapshot_dir)  # stale artifacts refuse to serve
    state = ServingState(snap, config)

    app = FastAPI(title="lyricsearch", docs_url=None, redoc_url=None)
    app.state.serving = state

    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_origins,
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    @app.middleware("http")
    async def _log_requests(request: Request, call_next):
        started = time.perf_counter()
        response = await call_next(request)
        access_log.info(
            json.dumps(
                {
                    "path": request.url.path,
                    "params": dict(request.query_params),
                    "status": response.status_code,
                    "elapsed_ms": round((time.perf_counter() - started) * 1000, 3),
                },
                sort_keys=True,
            )
        )
        return response

    @app.exception_handler(RequestValidationError)
    async def _bad_params(request: Request, exc: RequestValidationError):
        return _error(400, "bad_parameter", str(exc.errors()[:1]))

    @app.exception_handler(Exception)
    async def _internal(request: Request, exc: Exception):
        return _error(500, "internal", f"{type(exc).__name__}: {exc}")

    @app.get("/api/health")
    async def health():
        snap = state.snapshot
        return {
            "status": "ok",
            "fingerprints": snap.fingerprints,
            "documents": len(snap.corpus.records),
            "kernel_backend": BACKEND,
        }

    @app.get("/api/search")
    async def search(
        q: str = "",
        k: int | None = None,
        alpha: float | None = None,
        genre: str | None = None,
        emotion: str | None = None,
        year_from: int | None = None,
        year_to: int | None = None,
    ):
        warnings: list[str] = []
        k_eff = _clamp_k(k if k is not None else config.k_default, warnings)
        alpha_eff = _clamp_unit(
            alpha if alpha is not None else config.alpha_default, "alpha", warnings
        )
        filters = Filters(
            genre=genre, emotion=emotion, year_from=year_from, year_to=year_to
        )
        snap, engine, _ = state.active()
        try:
            page = engine.search(q, k=k_eff, alpha=alpha_eff, filters=filters)
        except EmptyQueryError as exc:
            return _error(400, "empty_query", str(exc))
        except SearchError as exc:
            return _error(400, "bad_parameter", str(exc))
        payload = page.to_dict(snap.records)
        if warnings:
            payload["warnings"] = warnings
        return payload

    @app.get("/api/songs/{song_id}")
    async def song(song_id: int):
        snap, _, _ = state.active()
        record = snap.records.get(song_id)
        if record is None:
            return _error(404, "not_found", f"no song with id {song_id}")
        return _song_dict(record, with_lyrics=True)

    @app.get("/api/recommend")
    async def recommend(
        seed: int,
        k: int | None = None,
        lam: float | None = Query(None, alias="lambda"),
        artist_cap: int | None = None,
        genre: str | None = None,
        emotion: str | None = None,
    ):
        warnings: list[str] = []
        opts = RecOptions(
            k=_clamp_k(k if k is not None else config.k_default, warnings),
            lambda_=_clamp_unit(
                lam if lam is not None else config.lambda_default, "lambda", warnings
            ),
            artist_cap=(
                artist_cap if artist_cap is not None else config.artist_cap_default
            ),
            genre=genre,
            emotion=emotion,
        )
        snap, _, recommender = state.active()
        try:
            results = recommender.recommend_similar(seed, opts)
        except UnknownSeedError as exc:
            return _error(404, "not_found", str(exc))
        except RecommendError as exc:
            return _error(400, "bad_parameter", str(exc))
        records = snap.records
        payload = {
            "seed": str(seed),
            "items": [
                {
                    "doc_id": str(doc_id),
                    "score": score,
                    "song": _song_dict(records[doc_id]),
                }
                for doc_id, score in results
            ],
            "artist_share": artist_share(results, records),
        }
        if warnings:
            payload["warnings"] = warnings
        return payload

    @app.get("/api/recommend/facet")
    async def recommend_facet(
        genre: str | None = None,
        emotion: str | None = None,
        k: int | None = None,
        artist_cap: int | None = None,
    ):
        if (genre is None) == (emotion is None):
            return _error(
                400, "bad_parameter", "pass exactly one of genre= or emotion="
            )
        kind, value = ("genre", genre) if genre is not None else ("emotion", emotion)
        warnings: list[str] = []
        k_eff = _clamp_k(k if k is not None else config.k_default, warnings)
        snap, _, recommender = state.active()
        try:
            results = recommender.recommend_by_facet(
                kind,
                value,
                k=k_eff,
                artist_cap=(
                    artist_cap
                    if artist_cap is not None
                    else config.artist_cap_default
                ),
            )
        except UnknownFacetError as exc:
            return _error(404, "not_found", str(exc))
        except RecommendError as exc:
            return _error(400, "bad_parameter", str(exc))
        records = snap.records
        payload = {
            "facet": {kind: value},
            "items": [
                {
                    "doc_id": str(doc_id),
                    "score": score,
                    "song": _song_dict(records[doc_id]),
                }
                for doc_id, score in results
            ],
            "artist_share": artist_share(results, records),
        }
        if warnings:
            payload["warnings"] = warnings
        return payload

    @app.get("/api/stats")
    async def stats():
        return state.stats_payload()

    @app.post("/api/admin/reload")
    async def reload(body: dict | None = None):
        target = (body or {}).get("dir")
        try:
            fingerprints = state.reload(target)
        except (StaleIndexError, SnapshotError, CorpusError) as exc:
            return _error(409, "stale_index", str(exc))
        return {"status": "reloaded", "fingerprints": fingerprints}

    return app


def serve(config: ServiceConfig) -> None:
    """Run the API under uvicorn (blocking)."""
    import uvicorn

    if not access_log.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(message)s"))
        access_log.addHandler(handler)
        access_log.setLevel(logging.INFO)
        access_log.propagate = False

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
