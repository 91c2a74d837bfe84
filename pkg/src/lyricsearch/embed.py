"""Vector half of retrieval: encoders, document vectors, cosine top-k.

The default encoder is a deterministic TF-IDF space over title+lyrics
tokens (artist names are identity, not meaning, and stay out of the
semantic space). Any object satisfying the Encoder duck type can replace
it, including file-loaded external embeddings; downstream code only
relies on encode_doc/encode_query/fingerprint.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from . import _binio, _kernels
from .textprep import TokenStream

VECTORS_FILE = "vectors.bin"
_MAGIC = b"LSEV"


class EmbedError(Exception):
    pass


class SpaceMismatchError(EmbedError):
    """Vectors from different encoder states cannot be compared."""


@dataclass(frozen=True)
class DocVector:
    """Sparse L2-normalized vector; ``norm`` keeps the raw magnitude."""

    doc_id: int
    term_ids: np.ndarray  # int32, strictly increasing
    weights: np.ndarray  # float64, unit L2 norm unless empty
    norm: float
    fingerprint: str

    def is_empty(self) -> bool:
        return len(self.term_ids) == 0


class Encoder(Protocol):
    @property
    def fingerprint(self) -> str: ...

    def encode_doc(self, stream: TokenStream, doc_id: int = 0) -> DocVector: ...

    def encode_query(self, terms: Sequence[str]) -> DocVector: ...


def _vector_from_weights(
    doc_id: int, tids: np.ndarray, raw: np.ndarray, fingerprint: str
) -> DocVector:
    keep = raw != 0.0
    tids = tids[keep]
    raw = raw[keep]
    norm = float(np.sqrt(np.dot(raw, raw)))
    if norm == 0.0:
        return DocVector(
            doc_id,
            np.empty(0, dtype=np.int32),
            np.empty(0, dtype=np.float64),
            0.0,
            fingerprint,
        )
    order = np.argsort(tids)
    return DocVector(
        doc_id,
        tids[order].astype(np.int32),
        (raw / norm)[order],
        norm,
        fingerprint,
    )


class TfidfEncoder:
    """idf = ln(N/df); document frequency counted over lyrics+title."""

    def __init__(
        self,
        terms: list[str],
        df: np.ndarray,
        n_docs: int,
        config_fingerprint: str = "",
    ):
        self.terms = terms
        self.term_ids = {t: i for i, t in enumerate(terms)}
        self.df = df.astype(np.int64)
        self.n_docs = n_docs
        self.config_fingerprint = config_fingerprint
        self.idf = np.log(float(n_docs) / self.df.astype(np.float64))
        payload = json.dumps(
            {
                "terms": terms,
                "df": [int(x) for x in self.df],
                "n_docs": n_docs,
                "config_fingerprint": config_fingerprint,
            },
            sort_keys=True,
            separators=(",", ":"),
        )
        self.fingerprint = hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def _encode_counts(self, counts: dict[int, int], doc_id: int) -> DocVector:
        if not counts:
            return _vector_from_weights(
                doc_id,
                np.empty(0, dtype=np.int32),
                np.empty(0, dtype=np.float64),
                self.fingerprint,
            )
        tids = np.fromiter(counts.keys(), dtype=np.int32, count=len(counts))
        tfs = np.fromiter(counts.values(), dtype=np.float64, count=len(counts))
        order = np.argsort(tids)
        tids = tids[order]
        tfs = tfs[order]
        raw = tfs * self.idf[tids]
        return _vector_from_weights(doc_id, tids, raw, self.fingerprint)

    def _count_terms(self, surfaces: Iterable[str]) -> dict[int, int]:
        counts: dict[int, int] = {}
        get = self.term_ids.get
        for surface in surfaces:
            tid = get(surface)
            if tid is not None:
                counts[tid] = counts.get(tid, 0) + 1
        return counts

    def encode_doc(self, stream: TokenStream, doc_id: int = 0) -> DocVector:
        return self._encode_counts(self._count_terms(stream.surfaces()), doc_id)

    def encode_query(self, terms: Sequence[str]) -> DocVector:
        return self._encode_counts(self._count_terms(terms), 0)


def fit_tfidf(
    doc_streams: Sequence[Sequence[TokenStream]],
    config_fingerprint: str = "",
) -> TfidfEncoder:
    """Fit the TF-IDF space over per-document (title, lyrics) streams."""
    if not doc_streams:
        raise EmbedError("cannot fit an encoder on an empty corpus")
    df: dict[str, int] = {}
    for streams in doc_streams:
        seen: set[str] = set()
        for stream in streams:
            seen.update(stream.surfaces())
        for term in seen:
            df[term] = df.get(term, 0) + 1
    terms = sorted(df)
    df_arr = np.array([df[t] for t in terms], dtype=np.int64)
    return TfidfEncoder(terms, df_arr, len(doc_streams), config_fingerprint)


def cosine(a: DocVector, b: DocVector) -> float:
    """Dot product of the normalized entries; empty vectors score 0."""
    if a.fingerprint != b.fingerprint:
        raise SpaceMismatchError(
            "vectors come from different encoder states "
            f"({a.fingerprint[:12]}… vs {b.fingerprint[:12]}…)"
        )
    if a.is_empty() or b.is_empty():
        return 0.0
    common, ia, ib = np.intersect1d(
        a.term_ids, b.term_ids, assume_unique=True, return_indices=True
    )
    if len(common) == 0:
        return 0.0
    return float(np.dot(a.weights[ia], b.weights[ib]))


class VectorStore:
    """All corpus document vectors in CSR form, plus per-term columns."""

    def __init__(
        self,
        doc_ids: np.ndarray,
        indptr: np.ndarray,
        tids: np.ndarray,
        data: np.ndarray,
        norms: np.ndarray,
        n_terms: int,
        fingerprint: str,
    ):
        self.doc_ids = doc_ids
        self.indptr = indptr
        self.tids = tids
        self.data = data
        self.norms = norms
        self.n_terms = n_terms
        self.fingerprint = fingerprint
        self.doc_ord = {int(d): i for i, d in enumerate(doc_ids)}
        # column-major view for query-side scoring
        rows = np.repeat(
            np.arange(len(doc_ids), dtype=np.int32), np.diff(indptr).astype(np.int64)
        )
        order = np.argsort(tids, kind="stable")
        self._col_rows = np.ascontiguousarray(rows[order])
        self._col_data = np.ascontiguousarray(data[order])
        counts = np.bincount(tids, minlength=n_terms)
        self._col_indptr = np.zeros(n_terms + 1, dtype=np.int64)
        np.cumsum(counts, out=self._col_indptr[1:])

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    def vector_of(self, doc_id: int) -> DocVector:
        ord_ = self.doc_ord.get(doc_id)
        if ord_ is None:
            raise EmbedError(f"document {doc_id} has no vector")
        lo, hi = self.indptr[ord_], self.indptr[ord_ + 1]
        return DocVector(
            doc_id,
            self.tids[lo:hi],
            self.data[lo:hi],
            float(self.norms[ord_]),
            self.fingerprint,
        )

    def scores_for(self, query: DocVector) -> np.ndarray:
        """Cosine of ``query`` against every document, by ordinal."""
        if query.fingerprint != self.fingerprint:
            raise SpaceMismatchError("query vector is from a different space")
        out = np.zeros(self.n_docs, dtype=np.float64)
        for tid, qw in zip(query.term_ids, query.weights):
            lo, hi = self._col_indptr[tid], self._col_indptr[tid + 1]
            if lo == hi:
                continue
            _kernels.dot_accumulate(
                out, self._col_rows[lo:hi], self._col_data[lo:hi], float(qw)
            )
        return out


def topk_similar(
    store: VectorStore,
    query: DocVector,
    k: int,
    candidates: Iterable[int] | None = None,
) -> list[tuple[int, float]]:
    """Exact top-k by cosine: positive scores only, ties by doc id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = store.scores_for(query)
    if candidates is None:
        ords = np.arange(store.n_docs)
    else:
        ords = np.array(
            sorted(store.doc_ord[int(d)] for d in candidates), dtype=np.int64
        )
    if len(ords) == 0:
        return []
    cand_scores = scores[ords]
    positive = cand_scores > 0.0
    ords = ords[positive]
    cand_scores = cand_scores[positive]
    ids = store.doc_ids[ords]
    order = np.lexsort((ids, -cand_scores))[:k]
    return [(int(ids[i]), float(cand_scores[i])) for i in order]


def build_vector_store(
    doc_ids: Sequence[int],
    doc_counts: Sequence[dict[int, int]],
    encoder: TfidfEncoder,
) -> VectorStore:
    """Assemble the corpus matrix from per-doc term-count dicts."""
    indptr = np.zeros(len(doc_ids) + 1, dtype=np.int64)
    tid_parts: list[np.ndarray] = []
    data_parts: list[np.ndarray] = []
    norms = np.zeros(len(doc_ids), dtype=np.float64)
    for i, counts in enumerate(doc_counts):
        vec = encoder._encode_counts(counts, int(doc_ids[i]))
        indptr[i + 1] = indptr[i] + len(vec.term_ids)
        tid_parts.append(vec.term_ids)
        data_parts.append(vec.weights)
        norms[i] = vec.norm
    tids = (
        np.concatenate(tid_parts)
        if tid_parts
        else np.empty(0, dtype=np.int32)
    )
    data = (
        np.concatenate(data_parts)
        if data_parts
        else np.empty(0, dtype=np.float64)
    )
    return VectorStore(
        doc_ids=np.asarray(doc_ids, dtype=np.uint64),
        indptr=indptr,
        tids=tids.astype(np.int32),
        data=data,
        norms=norms,
        n_terms=len(encoder.terms),
        fingerprint=encoder.fingerprint,
    )


def vector_store_from_vectors(
    vectors: Sequence[DocVector], n_terms: int, fingerprint: str
) -> VectorStore:
    """Build a store from already-encoded vectors (any Encoder)."""
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, vec in enumerate(vectors):
        if vec.fingerprint != fingerprint:
            raise SpaceMismatchError("mixed encoder spaces in one store")
        indptr[i + 1] = indptr[i] + len(vec.term_ids)
    return VectorStore(
        doc_ids=np.array([v.doc_id for v in vectors], dtype=np.uint64),
        indptr=indptr,
        tids=(
            np.concatenate([v.term_ids for v in vectors])
            if vectors
            else np.empty(0, dtype=np.int32)
        ).astype(np.int32),
        data=(
            np.concatenate([v.weights for v in vectors])
            if vectors
            else np.empty(0, dtype=np.float64)
        ),
        norms=np.array([v.norm for v in vectors], dtype=np.float64),
        n_terms=n_terms,
        fingerprint=fingerprint,
    )


def persist_vectors(
    encoder: TfidfEncoder, store: VectorStore, dir: str | Path,
    corpus_checksum: str = "",
) -> None:
    dir = Path(dir)
    dir.mkdir(parents=True, exist_ok=True)
    writer = _binio.Writer(
        _MAGIC,
        {
            "fingerprint": encoder.fingerprint,
            "config_fingerprint": encoder.config_fingerprint,
            "corpus_checksum": corpus_checksum,
            "n_docs": store.n_docs,
            "n_terms": len(encoder.terms),
            "nnz": int(len(store.tids)),
        },
    )
    for term in encoder.terms:
        writer.string(term)
    writer.array(encoder.df.astype("<i8"))
    writer.array(store.doc_ids.astype("<u8"))
    writer.array(store.indptr.astype("<i8"))
    writer.array(store.tids.astype("<i4"))
    writer.array(store.data.astype("<f8"))
    writer.array(store.norms.astype("<f8"))
    writer.save(dir / VECTORS_FILE)


def load_vectors(
    dir: str | Path, config_fingerprint: str | None = None
) -> tuple[TfidfEncoder, VectorStore, str]:
    """Returns (encoder, store, corpus_checksum); verifies config binding."""
    path = Path(dir) / VECTORS_FILE
    if not path.exists():
        raise EmbedError(f"no vectors file at {path}")
    reader = _binio.Reader(path, _MAGIC)
    head = reader.header
    if (
        config_fingerprint is not None
        and head["config_fingerprint"] != config_fingerprint
    ):
        raise SpaceMismatchError(
            "encoder state was fitted under a different pipeline config; rebuild"
        )
    terms = [reader.string() for _ in range(head["n_terms"])]
    df = reader.array("<i8", head["n_terms"]).copy()
    encoder = TfidfEncoder(terms, df, head["n_docs"], head["config_fingerprint"])
    doc_ids = reader.array("<u8", head["n_docs"]).copy()
    indptr = reader.array("<i8", head["n_docs"] + 1).copy()
    tids = reader.array("<i4", head["nnz"]).copy()
    data = reader.array("<f8", head["nnz"]).copy()
    norms = reader.array("<f8", head["n_docs"]).copy()
    store = VectorStore(
        doc_ids=doc_ids,
        indptr=indptr,
        tids=tids,
        data=data,
        norms=norms,
        n_terms=head["n_terms"],
        fingerprint=encoder.fingerprint,
    )
    if encoder.fingerprint != head["fingerprint"]:
        raise EmbedError(f"{path}: fingerprint drift after load")
    return encoder, store, head["corpus_checksum"]


class ExternalEncoder:
    """Encoder over file-loaded word vectors.

    File format: first line is the dimension, then one line per term:
    ``term w1 w2 ... wd``. Documents encode as the L2-normalized sum of
    their tokens' vectors; dimensions play the role of term ids.
    """

    def __init__(self, vectors: dict[str, np.ndarray], dim: int, fingerprint: str):
        self.vectors = vectors
        self.dim = dim
        self.fingerprint = fingerprint

    @classmethod
    def from_file(cls, path: str | Path) -> "ExternalEncoder":
        path = Path(path)
        raw = path.read_bytes()
        lines = raw.decode("utf-8").splitlines()
        if not lines:
            raise EmbedError(f"{path}: empty embedding file")
        try:
            dim = int(lines[0].strip())
        except ValueError as exc:
            raise EmbedError(f"{path}: first line must declare the dimension") from exc
        vectors: dict[str, np.ndarray] = {}
        for line_no, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != dim + 1:
                raise EmbedError(
                    f"{path}:{line_no}: expected {dim} weights, got {len(parts) - 1}"
                )
            vectors[parts[0]] = np.array([float(x) for x in parts[1:]])
        fingerprint = hashlib.sha256(raw).hexdigest()
        return cls(vectors, dim, fingerprint)

    def _encode_surfaces(self, surfaces: Iterable[str], doc_id: int) -> DocVector:
        total = np.zeros(self.dim, dtype=np.float64)
        hit = False
        for surface in surfaces:
            vec = self.vectors.get(surface)
            if vec is not None:
                total += vec
                hit = True
        if not hit:
            total[:] = 0.0
        tids = np.arange(self.dim, dtype=np.int32)
        return _vector_from_weights(doc_id, tids, total, self.fingerprint)

    def encode_doc(self, stream: TokenStream, doc_id: int = 0) -> DocVector:
        return self._encode_surfaces(stream.surfaces(), doc_id)

    def encode_query(self, terms: Sequence[str]) -> DocVector:
        return self._encode_surfaces(terms, 0)
