"""Query answering: preprocess, retrieve, fuse, and snippet.

Candidates are the union of lexical postings for the query terms, so
every hit provably contains a query term somewhere; the semantic score
then refines the order. Lexical and semantic scores are min-max
normalized over the candidate pool and combined linearly with weight
``alpha`` (1.0 = pure BM25, 0.0 = pure cosine).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .corpus import Emotion, Genre, SongRecord
from .snapshot import Snapshot
from .textprep.pipeline import (
    STAGE_LEMMATIZE,
    STAGE_LOWERCASE,
    STAGE_NORMALIZE,
    STAGE_STEM,
    STAGE_STOPWORDS,
    STAGE_TOKENIZE,
    PipelineConfig,
    run_pipeline,
)

DEFAULT_K = 10
DEFAULT_ALPHA = 0.5
MAX_SNIPPET_LINES = 3


class SearchError(Exception):
    pass


class EmptyQueryError(SearchError):
    """Query text is empty or entirely stopwords."""


@dataclass(frozen=True)
class Filters:
    genre: str | None = None
    emotion: str | None = None
    year_from: int | None = None
    year_to: int | None = None

    def active(self) -> bool:
        return any(
            v is not None
            for v in (self.genre, self.emotion, self.year_from, self.year_to)
        )

    def matches(self, record: SongRecord) -> bool:
        if self.genre is not None and record.genre != Genre.parse(self.genre):
            return False
        if self.emotion is not None and record.emotion != Emotion.parse(self.emotion):
            return False
        if self.year_from is not None and (
            record.year is None or record.year < self.year_from
        ):
            return False
        if self.year_to is not None and (
            record.year is None or record.year > self.year_to
        ):
            return False
        return True


@dataclass(frozen=True)
class Query:
    raw: str
    terms: tuple[str, ...]
    k: int = DEFAULT_K
    alpha: float = DEFAULT_ALPHA
    filters: Filters = field(default_factory=Filters)


@dataclass(frozen=True)
class MatchedLine:
    line_text: str
    line_span: tuple[int, int]
    term_spans: tuple[tuple[int, int], ...]

    def to_dict(self) -> dict:
        return {
            "line_text": self.line_text,
            "line_span": list(self.line_span),
            "term_spans": [list(s) for s in self.term_spans],
        }


@dataclass(frozen=True)
class ScoredHit:
    doc_id: int
    lexical: float
    semantic: float
    fused: float
    matched_fields: tuple[str, ...]
    snippets: tuple[MatchedLine, ...]

    def to_dict(self, record: SongRecord | None = None) -> dict:
        data = {
            "doc_id": str(self.doc_id),
            "lexical": self.lexical,
            "semantic": self.semantic,
            "fused": self.fused,
            "matched_fields": list(self.matched_fields),
            "snippets": [s.to_dict() for s in self.snippets],
        }
        if record is not None:
            data["song"] = {
                "title": record.title,
                "artist": record.artist,
                "year": record.year,
                "genre": record.genre.display(),
                "emotion": record.emotion.display(),
            }
        return data


@dataclass(frozen=True)
class ResultPage:
    hits: tuple[ScoredHit, ...]
    total_candidates: int
    query_echo: Query
    timing_ms: float

    def to_dict(self, records: dict[int, SongRecord] | None = None) -> dict:
        return {
            "hits": [
                h.to_dict(records.get(h.doc_id) if records else None)
                for h in self.hits
            ],
            "total_candidates": self.total_candidates,
            "query": {
                "raw": self.query_echo.raw,
                "terms": list(self.query_echo.terms),
                "k": self.query_echo.k,
                "alpha": self.query_echo.alpha,
            },
            "timing_ms": self.timing_ms,
        }


def _minmax(values: np.ndarray) -> np.ndarray:
    # all-equal pools map to 0.5 so fusion stays symmetric
    lo = values.min()
    hi = values.max()
    if hi == lo:
        return np.full_like(values, 0.5)
    return (values - lo) / (hi - lo)


class SearchEngine:
    """Read-only query interface over an immutable snapshot."""

    def __init__(self, snap: Snapshot):
        self.snap = snap
        self._token_config = _token_level_config(snap.config)

    # -- the prediction flow, stage by stage ----------------------------

    def parse_query(
        self,
        raw: str,
        k: int = DEFAULT_K,
        alpha: float = DEFAULT_ALPHA,
        filters: Filters | None = None,
    ) -> Query:
        if k < 1:
            raise SearchError("k must be >= 1")
        if not 0.0 <= alpha <= 1.0:
            raise SearchError("alpha must lie in [0, 1]")
        terms = tuple(run_pipeline(raw, self.snap.config).surfaces())
        if not terms:
            raise EmptyQueryError(
                "query is empty after preprocessing (blank or all stopwords)"
            )
        return Query(raw=raw, terms=terms, k=k, alpha=alpha, filters=filters or Filters())

    def retrieve_candidates(self, query: Query) -> np.ndarray:
        """Ordinals of docs holding any query term, filtered."""
        ords = self.snap.index.candidate_ords(list(query.terms))
        if query.filters.active() and len(ords):
            keep = [
                o
                for o in ords
                if query.filters.matches(
                    self.snap.corpus.records[int(o)]
                )
            ]
            ords = np.array(keep, dtype=ords.dtype)
        return ords

    def rank(self, query: Query, cand_ords: np.ndarray) -> ResultPage:
        started = time.perf_counter()
        index = self.snap.index
        if len(cand_ords) == 0:
            return ResultPage((), 0, query, _elapsed_ms(started))
        terms = list(query.terms)
        ranking = self.snap.ranking
        lex = index.score_all(
            terms,
            k1=ranking.k1,
            b=ranking.b,
            field_weights=ranking.weights_map(),
        )[cand_ords]
        qvec = self.snap.encoder.encode_query(terms)
        sem = self.snap.vectors.scores_for(qvec)[cand_ords]
        fused = query.alpha * _minmax(lex) + (1.0 - query.alpha) * _minmax(sem)
        ids = index.doc_ids[cand_ords]
        order = np.lexsort((ids, -fused))[: query.k]
        hits = []
        for i in order:
            ord_ = int(cand_ords[i])
            doc_id = int(ids[i])
            record = self.snap.corpus.records[ord_]
            hits.append(
                ScoredHit(
                    doc_id=doc_id,
                    lexical=float(lex[i]),
                    semantic=float(sem[i]),
                    fused=float(fused[i]),
                    matched_fields=tuple(index.matched_fields(terms, ord_)),
                    snippets=tuple(
                        self.extract_snippets(record, terms, MAX_SNIPPET_LINES)
                    ),
                )
            )
        return ResultPage(
            hits=tuple(hits),
            total_candidates=len(cand_ords),
            query_echo=query,
            timing_ms=_elapsed_ms(started),
        )

    def extract_snippets(
        self, record: SongRecord, terms: list[str], max_lines: int
    ) -> list[MatchedLine]:
        """Lyric lines containing matched terms, with exact offsets.

        Every term span is verified by re-slicing the raw lyrics and
        re-processing the slice; spans whose slice does not reproduce the
        matched term (possible when noise removal deleted characters
        inside the original span) are not highlighted.
        """
        term_set = set(terms)
        stream = run_pipeline(record.lyrics, self.snap.config)
        spans = sorted(
            {
                (t.start, t.end, t.surface)
                for t in stream.tokens
                if t.surface in term_set
            }
        )
        verified = [
            (lo, hi)
            for lo, hi, term in spans
            if self._slice_reproduces(record.lyrics[lo:hi], term)
        ]
        if not verified:
            return []
        lines = _line_spans(record.lyrics)
        out: list[MatchedLine] = []
        at = 0
        for line_lo, line_hi in lines:
            line_spans = []
            while at < len(verified) and verified[at][0] < line_hi:
                if verified[at][0] >= line_lo and verified[at][1] <= line_hi:
                    line_spans.append(verified[at])
                at += 1
            if line_spans:
                out.append(
                    MatchedLine(
                        line_text=record.lyrics[line_lo:line_hi],
                        line_span=(line_lo, line_hi),
                        term_spans=tuple(line_spans),
                    )
                )
                if len(out) >= max_lines:
                    break
        return out

    def _slice_reproduces(self, slice_text: str, term: str) -> bool:
        return run_pipeline(slice_text, self._token_config).surfaces() == [term]

    def search(
        self,
        raw: str,
        k: int = DEFAULT_K,
        alpha: float = DEFAULT_ALPHA,
        filters: Filters | None = None,
    ) -> ResultPage:
        query = self.parse_query(raw, k=k, alpha=alpha, filters=filters)
        return self.rank(query, self.retrieve_candidates(query))


def _elapsed_ms(started: float) -> float:
    return (time.perf_counter() - started) * 1000.0


def _line_spans(text: str) -> list[tuple[int, int]]:
    """Raw line spans, newline excluded; a trailing CR is trimmed too."""
    spans = []
    lo = 0
    while lo <= len(text):
        hi = text.find("\n", lo)
        if hi == -1:
            spans.append((lo, len(text)))
            break
        end = hi
        if end > lo and text[end - 1] == "\r":
            end -= 1
        spans.append((lo, end))
        lo = hi + 1
    return spans


def _token_level_config(config: PipelineConfig) -> PipelineConfig:
    """Normalize + tokenize + the token-level stages of ``config``.

    Used to verify that a raw slice reproduces its matched term; noise
    removal is deliberately absent so slices spanning deleted characters
    fail verification instead of highlighting garbage.
    """
    token_stages = tuple(
        s
        for s in config.stages
        if s in (STAGE_LOWERCASE, STAGE_STOPWORDS, STAGE_STEM, STAGE_LEMMATIZE)
    )
    return PipelineConfig(
        stages=(STAGE_NORMALIZE, STAGE_TOKENIZE) + token_stages,
        stopwords=config.stopwords,
        lemmas=config.lemmas,
        noise_patterns=config.noise_patterns,
    )
