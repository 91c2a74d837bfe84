"""Loaders for the versioned text resources shipped with the package."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources


def _read(name: str) -> str:
    return resources.files("lyricsearch.textprep").joinpath(
        "resources", name
    ).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    words = set()
    for line in _read("stopwords.txt").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


@lru_cache(maxsize=None)
def default_lemmas() -> dict[str, str]:
    table: dict[str, str] = {}
    for line in _read("lemmas.tsv").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        surface, lemma = line.split("\t")
        table[surface] = lemma
    return dict(table)


def porter_reference_pairs() -> list[tuple[str, str]]:
    pairs = []
    for line in _read("porter_reference.tsv").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        word, stemmed = line.split("\t")
        pairs.append((word, stemmed))
    return pairs
