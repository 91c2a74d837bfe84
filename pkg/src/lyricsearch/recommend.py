"""Recommendations with popularity-bias mitigation.

Two mechanisms keep any one artist from dominating the output: a hard
per-artist cap, and greedy maximal-marginal-relevance selection that
trades similarity to the seed against similarity to what was already
picked. ``artist_share`` quantifies the remaining concentration so
callers can display it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import Emotion, Genre, SongRecord
from .snapshot import Snapshot

LAMBDA_DEFAULT = 0.7
ARTIST_CAP_DEFAULT = 2


class RecommendError(Exception):
    pass


class UnknownSeedError(RecommendError):
    pass


class UnknownFacetError(RecommendError):
    pass


@dataclass(frozen=True)
class RecOptions:
    k: int = 10
    lambda_: float = LAMBDA_DEFAULT
    artist_cap: int = ARTIST_CAP_DEFAULT
    genre: str | None = None
    emotion: str | None = None

    def validate(self) -> None:
        if self.k < 1:
            raise RecommendError("k must be >= 1")
        if self.artist_cap < 1:
            raise RecommendError("artist_cap must be >= 1")
        if not 0.0 <= self.lambda_ <= 1.0:
            raise RecommendError("lambda must lie in [0, 1]")


class Recommender:
    def __init__(self, snap: Snapshot):
        self.snap = snap

    def _facet_mask(self, genre: str | None, emotion: str | None) -> np.ndarray:
        records = self.snap.corpus.records
        mask = np.ones(len(records), dtype=bool)
        if genre is not None:
            want = Genre.parse(genre)
            mask &= np.array([r.genre == want for r in records])
        if emotion is not None:
            want = Emotion.parse(emotion)
            mask &= np.array([r.emotion == want for r in records])
        return mask

    def recommend_similar(
        self, seed: int, opts: RecOptions = RecOptions()
    ) -> list[tuple[int, float]]:
        """Greedy MMR over cosine similarity to the seed song.

        Returns (doc_id, similarity-to-seed) pairs; the list order is the
        diversified rank, which for lambda=1 coincides with plain cosine
        order. Only positive-similarity candidates are considered.
        """
        opts.validate()
        snap = self.snap
        if seed not in snap.vectors.doc_ord:
            raise UnknownSeedError(f"song {seed} is not in the corpus")
        seed_ord = snap.vectors.doc_ord[seed]
        seed_vec = snap.vectors.vector_of(seed)
        rel = snap.vectors.scores_for(seed_vec)

        eligible = rel > 0.0
        eligible[seed_ord] = False
        eligible &= self._facet_mask(opts.genre, opts.emotion)
        cand_ords = np.flatnonzero(eligible)
        if len(cand_ords) == 0:
            return []
        # sort by doc id so argmax's first-wins rule breaks ties upward
        cand_ids = snap.vectors.doc_ids[cand_ords]
        id_order = np.argsort(cand_ids)
        cand_ords = cand_ords[id_order]
        cand_ids = cand_ids[id_order]
        cand_rel = rel[cand_ords]

        artists = [snap.corpus.records[int(o)].artist for o in cand_ords]
        artist_counts: dict[str, int] = {}
        alive = np.ones(len(cand_ords), dtype=bool)
        max_sim = np.zeros(len(cand_ords), dtype=np.float64)
        lam = opts.lambda_

        picked: list[tuple[int, float]] = []
        while len(picked) < opts.k and alive.any():
            objective = lam * cand_rel - (1.0 - lam) * max_sim
            objective[~alive] = -math.inf
            best = int(np.argmax(objective))
            alive[best] = False
            picked.append((int(cand_ids[best]), float(cand_rel[best])))
            artist = artists[best]
            artist_counts[artist] = artist_counts.get(artist, 0) + 1
            if artist_counts[artist] >= opts.artist_cap:
                for i, a in enumerate(artists):
                    if a == artist:
                        alive[i] = False
            if len(picked) >= opts.k or not alive.any():
                break
            if lam < 1.0:
                picked_vec = snap.vectors.vector_of(int(cand_ids[best]))
                sims = snap.vectors.scores_for(picked_vec)[cand_ords]
                np.maximum(max_sim, sims, out=max_sim)
        return picked

    def recommend_by_facet(
        self,
        kind: str,
        value: str,
        k: int = 10,
        artist_cap: int = ARTIST_CAP_DEFAULT,
    ) -> list[tuple[int, float]]:
        """Facet members ranked by cosine to the facet centroid."""
        if k < 1:
            raise RecommendError("k must be >= 1")
        if artist_cap < 1:
            raise RecommendError("artist_cap must be >= 1")
        snap = self.snap
        records = snap.corpus.records
        if kind == "genre":
            want = Genre.parse(value)
            members = [i for i, r in enumerate(records) if r.genre == want]
            named = not want.is_other
        elif kind == "emotion":
            want = Emotion.parse(value)
            members = [i for i, r in enumerate(records) if r.emotion == want]
            named = not want.is_other
        else:
            raise UnknownFacetError(f"facet kind must be genre or emotion, not {kind!r}")
        if not named and not members:
            raise UnknownFacetError(f"unknown {kind} facet: {value!r}")
        if not members:
            return []

        store = snap.vectors
        centroid = np.zeros(store.n_terms, dtype=np.float64)
        for ord_ in members:
            lo, hi = store.indptr[ord_], store.indptr[ord_ + 1]
            centroid[store.tids[lo:hi]] += store.data[lo:hi]
        centroid /= float(len(members))
        norm = math.sqrt(float(np.dot(centroid, centroid)))
        scores = np.zeros(len(members), dtype=np.float64)
        if norm > 0.0:
            unit = centroid / norm
            for at, ord_ in enumerate(members):
                lo, hi = store.indptr[ord_], store.indptr[ord_ + 1]
                scores[at] = float(np.dot(store.data[lo:hi], unit[store.tids[lo:hi]]))

        ids = store.doc_ids[np.array(members, dtype=np.int64)]
        order = np.lexsort((ids, -scores))
        out: list[tuple[int, float]] = []
        artist_counts: dict[str, int] = {}
        for i in order:
            if len(out) >= k:
                break
            artist = records[members[int(i)]].artist
            if artist_counts.get(artist, 0) >= artist_cap:
                continue
            artist_counts[artist] = artist_counts.get(artist, 0) + 1
            out.append((int(ids[i]), float(scores[i])))
        return out


def artist_share(
    results: list[tuple[int, float]], records: dict[int, SongRecord]
) -> dict[str, float]:
    """Fraction of the result list owned by each artist (sums to 1)."""
    if not results:
        return {}
    counts: dict[str, int] = {}
    for doc_id, _ in results:
        artist = records[doc_id].artist
        counts[artist] = counts.get(artist, 0) + 1
    total = len(results)
    return {artist: counts[artist] / total for artist in sorted(counts)}
