"""Field-aware inverted index with BM25 scoring.

Every song contributes one token stream per field (title, artist,
lyrics). Postings keep token positions; documents are addressed
internally by corpus ordinal and externally by their 64-bit id. Builds
are deterministic: same corpus + same pipeline config means byte
identical files on disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _binio, _kernels
from .corpus import Corpus
from .textprep import PipelineConfig, run_pipeline

FIELDS = ("title", "artist", "lyrics")
FIELD_ID = {name: i for i, name in enumerate(FIELDS)}

K1_DEFAULT = 1.2
B_DEFAULT = 0.75
FIELD_WEIGHTS_DEFAULT = {"title": 2.0, "artist": 1.5, "lyrics": 1.0}

INDEX_FILE = "index.bin"
_MAGIC = b"LSIX"


@dataclass(frozen=True)
class RankingParams:
    k1: float = K1_DEFAULT
    b: float = B_DEFAULT
    field_weights: tuple[float, float, float] = (2.0, 1.5, 1.0)

    def weights_map(self) -> dict[str, float]:
        return dict(zip(FIELDS, self.field_weights))

    def to_dict(self) -> dict:
        return {
            "k1": self.k1,
            "b": self.b,
            "field_weights": dict(zip(FIELDS, self.field_weights)),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RankingParams":
        weights = data.get("field_weights", FIELD_WEIGHTS_DEFAULT)
        return cls(
            k1=data.get("k1", K1_DEFAULT),
            b=data.get("b", B_DEFAULT),
            field_weights=tuple(weights[f] for f in FIELDS),
        )


class IndexError_(Exception):
    """Base class for index failures (build, lookup, or storage)."""


class BuildError(IndexError_):
    pass


class UnknownDocError(IndexError_):
    pass


class StaleIndexError(IndexError_):
    """On-disk index was built under a different pipeline config."""


@dataclass(frozen=True, slots=True)
class Posting:
    doc_id: int
    field: str
    term_frequency: int
    positions: tuple[int, ...]


class _PostingList:
    """Per (term, field) arrays, ordered by ascending doc id."""

    __slots__ = ("ords", "tfs", "pos_flat", "pos_splits")

    def __init__(self, ords, tfs, pos_flat, pos_splits):
        self.ords = ords  # int32, corpus ordinals
        self.tfs = tfs  # int32
        self.pos_flat = pos_flat  # int32, concatenated positions
        self.pos_splits = pos_splits  # int64, prefix offsets, len = len(ords)+1

    def positions_of(self, i: int) -> tuple[int, ...]:
        lo, hi = self.pos_splits[i], self.pos_splits[i + 1]
        return tuple(int(p) for p in self.pos_flat[lo:hi])


class InvertedIndex:
    def __init__(
        self,
        terms: list[str],
        doc_ids: np.ndarray,
        doc_lens: np.ndarray,
        postings: dict[tuple[int, int], _PostingList],
        config_fingerprint: str,
        corpus_checksum: str,
    ):
        self.terms = terms
        self.term_ids = {t: i for i, t in enumerate(terms)}
        self.doc_ids = doc_ids  # uint64, corpus order
        self.doc_ord = {int(d): i for i, d in enumerate(doc_ids)}
        self.doc_lens = doc_lens  # int32 [N, 3]
        self.postings = postings
        self.config_fingerprint = config_fingerprint
        self.corpus_checksum = corpus_checksum
        self._field_lens = [
            np.ascontiguousarray(doc_lens[:, f]) for f in range(len(FIELDS))
        ]
        self._df_cache: dict[str, int] = {}
        totals = doc_lens.sum(axis=0, dtype=np.int64)
        n = max(len(doc_ids), 1)
        self.avg_field_len = [totals[f] / n for f in range(len(FIELDS))]

    # -- stats ---------------------------------------------------------

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    def document_frequency(self, term: str) -> int:
        cached = self._df_cache.get(term)
        if cached is not None:
            return cached
        tid = self.term_ids.get(term)
        if tid is None:
            return 0
        parts = [
            self.postings[(tid, fid)].ords
            for fid in range(len(FIELDS))
            if (tid, fid) in self.postings
        ]
        df = int(len(np.unique(np.concatenate(parts)))) if parts else 0
        self._df_cache[term] = df
        return df

    def idf(self, term: str) -> float:
        df = self.document_frequency(term)
        n = self.n_docs
        return math.log(1.0 + (n - df + 0.5) / (df + 0.5))

    # -- queries -------------------------------------------------------

    def lookup(self, term: str) -> list[Posting]:
        """All postings for a preprocessed term, (doc_id, field) order."""
        tid = self.term_ids.get(term)
        if tid is None:
            return []
        out: list[Posting] = []
        for fid, fname in enumerate(FIELDS):
            plist = self.postings.get((tid, fid))
            if plist is None:
                continue
            for i, o in enumerate(plist.ords):
                out.append(
                    Posting(
                        doc_id=int(self.doc_ids[o]),
                        field=fname,
                        term_frequency=int(plist.tfs[i]),
                        positions=plist.positions_of(i),
                    )
                )
        out.sort(key=lambda p: (p.doc_id, FIELD_ID[p.field]))
        return out

    def candidate_ords(self, terms: list[str]) -> np.ndarray:
        """Ordinals of documents containing any query term in any field."""
        parts = []
        for term in terms:
            tid = self.term_ids.get(term)
            if tid is None:
                continue
            for fid in range(len(FIELDS)):
                plist = self.postings.get((tid, fid))
                if plist is not None:
                    parts.append(plist.ords)
        if not parts:
            return np.empty(0, dtype=np.int32)
        return np.unique(np.concatenate(parts))

    def score_all(
        self,
        terms: list[str],
        k1: float = K1_DEFAULT,
        b: float = B_DEFAULT,
        field_weights: dict[str, float] | None = None,
    ) -> np.ndarray:
        """BM25 scores for every document (zeros where nothing matched)."""
        weights = field_weights or FIELD_WEIGHTS_DEFAULT
        out = np.zeros(self.n_docs, dtype=np.float64)
        for term in terms:
            tid = self.term_ids.get(term)
            if tid is None:
                continue
            idf = self.idf(term)
            for fid, fname in enumerate(FIELDS):
                plist = self.postings.get((tid, fid))
                if plist is None or len(plist.ords) == 0:
                    continue
                _kernels.bm25_accumulate(
                    out,
                    plist.ords,
                    plist.tfs,
                    self._field_lens[fid],
                    idf,
                    k1,
                    b,
                    self.avg_field_len[fid],
                    weights[fname],
                )
        return out

    def bm25_score(
        self,
        terms: list[str],
        doc_id: int,
        k1: float = K1_DEFAULT,
        b: float = B_DEFAULT,
        field_weights: dict[str, float] | None = None,
    ) -> float:
        if doc_id not in self.doc_ord:
            raise UnknownDocError(f"document {doc_id} is not indexed")
        if not terms:
            return 0.0
        scores = self.score_all(terms, k1=k1, b=b, field_weights=field_weights)
        return float(scores[self.doc_ord[doc_id]])

    def matched_fields(self, terms: list[str], ord_: int) -> list[str]:
        found = []
        for fid, fname in enumerate(FIELDS):
            for term in terms:
                tid = self.term_ids.get(term)
                if tid is None:
                    continue
                plist = self.postings.get((tid, fid))
                if plist is not None and _contains_ord(plist, ord_, self.doc_ids):
                    found.append(fname)
                    break
        return found

    # -- equality (round-trip tests) ------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InvertedIndex):
            return NotImplemented
        if (
            self.terms != other.terms
            or self.config_fingerprint != other.config_fingerprint
            or self.corpus_checksum != other.corpus_checksum
            or not np.array_equal(self.doc_ids, other.doc_ids)
            or not np.array_equal(self.doc_lens, other.doc_lens)
            or set(self.postings) != set(other.postings)
        ):
            return False
        for key, mine in self.postings.items():
            theirs = other.postings[key]
            if not (
                np.array_equal(mine.ords, theirs.ords)
                and np.array_equal(mine.tfs, theirs.tfs)
                and np.array_equal(mine.pos_flat, theirs.pos_flat)
                and np.array_equal(mine.pos_splits, theirs.pos_splits)
            ):
                return False
        return True


def _contains_ord(plist: _PostingList, ord_: int, doc_ids: np.ndarray) -> bool:
    # postings are sorted by doc id value, so search on the id
    target = doc_ids[ord_]
    keys = doc_ids[plist.ords]
    at = int(np.searchsorted(keys, target))
    return at < len(keys) and keys[at] == target


def field_streams(record, config: PipelineConfig):
    """The three per-field token streams of one record."""
    return {
        "title": run_pipeline(record.title, config),
        "artist": run_pipeline(record.artist, config),
        "lyrics": run_pipeline(record.lyrics, config),
    }


def build_index(
    corpus: Corpus, config: PipelineConfig, observer=None
) -> InvertedIndex:
    """Index every record of ``corpus`` under ``config``. Deterministic.

    ``observer(ord, record, tfs_by_field)`` is called once per record so
    the snapshot builder can reuse the same preprocessing pass.
    """
    if len(corpus.records) == 0:
        raise BuildError("cannot build an index over an empty corpus")
    config.validate()

    n = len(corpus.records)
    doc_ids = np.array([r.id for r in corpus.records], dtype=np.uint64)
    doc_lens = np.zeros((n, len(FIELDS)), dtype=np.int32)
    # term -> field -> list of (ord, positions tuple)
    acc: dict[str, list[list[tuple[int, tuple[int, ...]]]]] = {}

    for ord_, record in enumerate(corpus.records):
        streams = field_streams(record, config)
        tfs_by_field: dict[str, dict[str, int]] = {}
        for fid, fname in enumerate(FIELDS):
            stream = streams[fname]
            doc_lens[ord_, fid] = len(stream.tokens)
            per_term: dict[str, list[int]] = {}
            for tok in stream.tokens:
                per_term.setdefault(tok.surface, []).append(tok.position)
            if observer is not None:
                tfs_by_field[fname] = {t: len(p) for t, p in per_term.items()}
            for term, positions in per_term.items():
                slot = acc.get(term)
                if slot is None:
                    slot = [[], [], []]
                    acc[term] = slot
                slot[fid].append((ord_, tuple(positions)))
        if observer is not None:
            observer(ord_, record, tfs_by_field)

    terms = sorted(acc)
    by_id_order = np.argsort(doc_ids, kind="stable")
    id_rank = np.empty(n, dtype=np.int64)
    id_rank[by_id_order] = np.arange(n)

    postings: dict[tuple[int, int], _PostingList] = {}
    for tid, term in enumerate(terms):
        for fid in range(len(FIELDS)):
            entries = acc[term][fid]
            if not entries:
                continue
            entries.sort(key=lambda e: id_rank[e[0]])
            ords = np.array([e[0] for e in entries], dtype=np.int32)
            tfs = np.array([len(e[1]) for e in entries], dtype=np.int32)
            pos_flat = np.array(
                [p for e in entries for p in e[1]], dtype=np.int32
            )
            pos_splits = np.zeros(len(entries) + 1, dtype=np.int64)
            np.cumsum(tfs, out=pos_splits[1:])
            postings[(tid, fid)] = _PostingList(ords, tfs, pos_flat, pos_splits)

    return InvertedIndex(
        terms=terms,
        doc_ids=doc_ids,
        doc_lens=doc_lens,
        postings=postings,
        config_fingerprint=config.fingerprint(),
        corpus_checksum=corpus.manifest.checksum,
    )


def persist_index(index: InvertedIndex, dir: str | Path) -> None:
    dir = Path(dir)
    dir.mkdir(parents=True, exist_ok=True)
    writer = _binio.Writer(
        _MAGIC,
        {
            "config_fingerprint": index.config_fingerprint,
            "corpus_checksum": index.corpus_checksum,
            "n_docs": index.n_docs,
            "n_terms": len(index.terms),
            "fields": list(FIELDS),
        },
    )
    writer.array(index.doc_ids)
    writer.array(index.doc_lens.astype("<i4"))
    for term in index.terms:
        writer.string(term)
    for tid in range(len(index.terms)):
        for fid in range(len(FIELDS)):
            plist = index.postings.get((tid, fid))
            if plist is None:
                writer.u32(0)
                continue
            writer.u32(len(plist.ords))
            writer.array(plist.ords.astype("<i4"))
            writer.array(plist.tfs.astype("<i4"))
            writer.array(plist.pos_flat.astype("<i4"))
    writer.save(dir / INDEX_FILE)


def load_index(
    dir: str | Path, serving_config: PipelineConfig | None = None
) -> InvertedIndex:
    dir = Path(dir)
    path = dir / INDEX_FILE
    if not path.exists():
        raise IndexError_(f"no index file at {path}")
    reader = _binio.Reader(path, _MAGIC)
    head = reader.header
    if serving_config is not None:
        expect = serving_config.fingerprint()
        if head["config_fingerprint"] != expect:
            raise StaleIndexError(
                "index was built under a different pipeline config "
                f"({head['config_fingerprint'][:12]}… on disk, {expect[:12]}… "
                "serving); rebuild it with build-index"
            )
    n = head["n_docs"]
    n_terms = head["n_terms"]
    doc_ids = reader.array("<u8", n).copy()
    doc_lens = reader.array("<i4", n * len(FIELDS)).reshape(n, len(FIELDS)).copy()
    terms = [reader.string() for _ in range(n_terms)]
    postings: dict[tuple[int, int], _PostingList] = {}
    for tid in range(n_terms):
        for fid in range(len(FIELDS)):
            count = reader.u32()
            if count == 0:
                continue
            ords = reader.array("<i4", count).copy()
            tfs = reader.array("<i4", count).copy()
            total_pos = int(tfs.sum())
            pos_flat = reader.array("<i4", total_pos).copy()
            pos_splits = np.zeros(count + 1, dtype=np.int64)
            np.cumsum(tfs, out=pos_splits[1:])
            postings[(tid, fid)] = _PostingList(ords, tfs, pos_flat, pos_splits)
    return InvertedIndex(
        terms=terms,
        doc_ids=doc_ids,
        doc_lens=doc_lens,
        postings=postings,
        config_fingerprint=head["config_fingerprint"],
        corpus_checksum=head["corpus_checksum"],
    )
