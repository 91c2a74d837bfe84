"""Serving snapshot: the immutable (corpus, index, encoder) triple.

Builds run one preprocessing pass per record and feed both the inverted
index and the vector store, so building a snapshot costs one pipeline
traversal of the corpus. A snapshot directory is self-contained:

    <dir>/
      corpus/         embedded corpus store (records + manifest)
      index.bin       inverted index
      vectors.bin     encoder state + document vectors
      pipeline.json   the pipeline config everything was built under
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod
from . import embed, index as index_mod
from .corpus import Corpus, SongRecord
from .embed import Encoder, TfidfEncoder, VectorStore
from .index import InvertedIndex, RankingParams
from .textprep import PipelineConfig

PIPELINE_FILE = "pipeline.json"
RANKING_FILE = "ranking.json"
CORPUS_SUBDIR = "corpus"


class SnapshotError(Exception):
    pass


@dataclass
class Snapshot:
    corpus: Corpus
    records: dict[int, SongRecord]
    config: PipelineConfig
    index: InvertedIndex
    encoder: Encoder
    vectors: VectorStore
    ranking: RankingParams = RankingParams()

    @property
    def fingerprints(self) -> dict[str, str]:
        return {
            "pipeline": self.config.fingerprint(),
            "corpus": self.corpus.manifest.checksum,
            "index": self.index.config_fingerprint,
            "encoder": self.encoder.fingerprint,
        }


def build_snapshot(
    corpus: Corpus,
    config: PipelineConfig,
    ranking: RankingParams = RankingParams(),
) -> Snapshot:
    """Index + encode ``corpus`` in a single preprocessing pass."""
    sem_df: dict[str, int] = {}
    doc_counts: list[dict[str, int]] = []

    def observe(ord_: int, record: SongRecord, tfs_by_field: dict[str, dict[str, int]]):
        merged: dict[str, int] = dict(tfs_by_field["title"])
        for term, tf in tfs_by_field["lyrics"].items():
            merged[term] = merged.get(term, 0) + tf
        doc_counts.append(merged)
        for term in merged:
            sem_df[term] = sem_df.get(term, 0) + 1

    idx = index_mod.build_index(corpus, config, observer=observe)

    terms = sorted(sem_df)
    df_arr = np.array([sem_df[t] for t in terms], dtype=np.int64)
    encoder = TfidfEncoder(terms, df_arr, len(corpus.records), config.fingerprint())
    tid_counts = [
        {encoder.term_ids[t]: c for t, c in counts.items()} for counts in doc_counts
    ]
    vectors = embed.build_vector_store(
        [r.id for r in corpus.records], tid_counts, encoder
    )
    return Snapshot(
        corpus=corpus,
        records=corpus.by_id(),
        config=config,
        index=idx,
        encoder=encoder,
        vectors=vectors,
        ranking=ranking,
    )


def persist_snapshot(snap: Snapshot, dir: str | Path) -> None:
    dir = Path(dir)
    dir.mkdir(parents=True, exist_ok=True)
    corpus_mod.persist(snap.corpus, dir / CORPUS_SUBDIR)
    index_mod.persist_index(snap.index, dir)
    embed.persist_vectors(
        snap.encoder, snap.vectors, dir, corpus_checksum=snap.corpus.manifest.checksum
    )
    (dir / PIPELINE_FILE).write_text(
        json.dumps(snap.config.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    (dir / RANKING_FILE).write_text(
        json.dumps(snap.ranking.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def load_snapshot(dir: str | Path) -> Snapshot:
    """Load and cross-verify all snapshot artifacts."""
    dir = Path(dir)
    pipeline_path = dir / PIPELINE_FILE
    if not pipeline_path.exists():
        raise SnapshotError(f"no pipeline config at {pipeline_path}")
    config = PipelineConfig.from_dict(
        json.loads(pipeline_path.read_text(encoding="utf-8"))
    )
    config.validate()
    loaded = corpus_mod.load(dir / CORPUS_SUBDIR)
    idx = index_mod.load_index(dir, serving_config=config)
    if idx.corpus_checksum != loaded.manifest.checksum:
        raise index_mod.StaleIndexError(
            "index was built over a different corpus "
            f"({idx.corpus_checksum} vs {loaded.manifest.checksum}); rebuild"
        )
    encoder, vectors, vec_checksum = embed.load_vectors(
        dir, config_fingerprint=config.fingerprint()
    )
    if vec_checksum != loaded.manifest.checksum:
        raise index_mod.StaleIndexError(
            "vectors were built over a different corpus; rebuild"
        )
    ranking_path = dir / RANKING_FILE
    ranking = (
        RankingParams.from_dict(json.loads(ranking_path.read_text(encoding="utf-8")))
        if ranking_path.exists()
        else RankingParams()
    )
    return Snapshot(
        corpus=loaded,
        records=loaded.by_id(),
        config=config,
        index=idx,
        encoder=encoder,
        vectors=vectors,
        ranking=ranking,
    )
