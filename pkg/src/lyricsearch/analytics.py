"""Corpus statistics for the dashboard: facet distributions, balance
metrics, and per-facet top terms."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import EMOTIONS, GENRES, Corpus
from .textprep import PipelineConfig, default_config, run_pipeline

TOP_TERMS_PER_FACET = 20
UNKNOWN_YEAR = "unknown"


class AnalyticsError(Exception):
    pass


@dataclass
class CorpusStats:
    total: int
    by_year: dict[str, int]  # year as string, "unknown" bucket included
    by_genre: dict[str, int]
    by_emotion: dict[str, int]
    top_terms: dict[str, object]

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "by_year": [
                {"year": year, "count": count} for year, count in self.by_year.items()
            ],
            "by_genre": [
                {"genre": g, "count": count} for g, count in self.by_genre.items()
            ],
            "by_emotion": [
                {"emotion": e, "count": count} for e, count in self.by_emotion.items()
            ],
            "top_terms": self.top_terms,
        }


def _sorted_year_map(counts: dict[int | None, int]) -> dict[str, int]:
    known = sorted(y for y in counts if y is not None)
    out = {str(y): counts[y] for y in known}
    if None in counts:
        out[UNKNOWN_YEAR] = counts[None]
    return out


def _sorted_facet_map(counts: dict[str, int], taxonomy: tuple[str, ...]) -> dict[str, int]:
    out = {name: counts[name] for name in taxonomy if name in counts}
    for name in sorted(counts):
        if name not in out:
            out[name] = counts[name]
    return out


def _top(counter: dict[str, int], n: int) -> list[list]:
    ordered = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:n]
    return [[term, count] for term, count in ordered]


def compute_stats(corpus: Corpus, config: PipelineConfig | None = None) -> CorpusStats:
    """Exact facet tallies plus post-pipeline top terms. Order-independent."""
    config = config or default_config()
    years: dict[int | None, int] = {}
    genres: dict[str, int] = {}
    emotions: dict[str, int] = {}
    overall_terms: dict[str, int] = {}
    genre_terms: dict[str, dict[str, int]] = {}
    emotion_terms: dict[str, dict[str, int]] = {}

    for record in corpus.records:
        years[record.year] = years.get(record.year, 0) + 1
        g = record.genre.display()
        e = record.emotion.display()
        genres[g] = genres.get(g, 0) + 1
        emotions[e] = emotions.get(e, 0) + 1
        stream = run_pipeline(record.lyrics, config)
        g_counter = genre_terms.setdefault(g, {})
        e_counter = emotion_terms.setdefault(e, {})
        for tok in stream.tokens:
            term = tok.surface
            overall_terms[term] = overall_terms.get(term, 0) + 1
            g_counter[term] = g_counter.get(term, 0) + 1
            e_counter[term] = e_counter.get(term, 0) + 1

    top_terms = {
        "overall": _top(overall_terms, TOP_TERMS_PER_FACET),
        "by_genre": {
            g: _top(genre_terms[g], TOP_TERMS_PER_FACET) for g in sorted(genre_terms)
        },
        "by_emotion": {
            e: _top(emotion_terms[e], TOP_TERMS_PER_FACET)
            for e in sorted(emotion_terms)
        },
    }
    return CorpusStats(
        total=len(corpus.records),
        by_year=_sorted_year_map(years),
        by_genre=_sorted_facet_map(genres, GENRES),
        by_emotion=_sorted_facet_map(emotions, EMOTIONS),
        top_terms=top_terms,
    )


def balance_report(stats: CorpusStats) -> dict[str, dict[str, float]]:
    """Normalized entropy and max share per facet dimension."""
    if stats.total == 0:
        raise AnalyticsError("balance metrics need a non-empty corpus")
    report = {}
    for facet, counts in (
        ("year", stats.by_year),
        ("genre", stats.by_genre),
        ("emotion", stats.by_emotion),
    ):
        present = [c for c in counts.values() if c > 0]
        total = sum(present)
        shares = [c / total for c in present]
        if len(present) <= 1:
            ratio = 0.0
        else:
            entropy = -sum(p * math.log(p) for p in shares)
            ratio = entropy / math.log(len(present))
        report[facet] = {
            "entropy_ratio": ratio,
            "max_share": max(shares),
            "categories": len(present),
        }
    return report
