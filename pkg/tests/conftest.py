from __future__ import annotations

import random

import pytest

from lyricsearch.fixtures import fixture_corpus
from lyricsearch.search import SearchEngine
from lyricsearch.snapshot import build_snapshot, persist_snapshot
from lyricsearch.textprep import default_config


@pytest.fixture(scope="session")
def corpus30():
    return fixture_corpus()


@pytest.fixture(scope="session")
def config():
    return default_config()


@pytest.fixture(scope="session")
def snap30(corpus30, config):
    return build_snapshot(corpus30, config)


@pytest.fixture(scope="session")
def engine30(snap30):
    return SearchEngine(snap30)


@pytest.fixture(scope="session")
def snap30_dir(snap30, tmp_path_factory):
    dir = tmp_path_factory.mktemp("snap30")
    persist_snapshot(snap30, dir)
    return dir


@pytest.fixture()
def rng():
    return random.Random(0xC0FFEE)


def make_random_corpus_rows(rng: random.Random, n_docs: int, vocab: list[str]):
    """Raw rows for randomized corpora (shared by several test modules)."""
    rows = []
    genres = ["pop", "country", "blues", "rock", "jazz", "reggae", "hip-hop"]
    emotions = [
        "sadness", "violence", "world/life", "obscene",
        "music", "night/time", "romantic", "feelings",
    ]
    for i in range(n_docs):
        title = " ".join(rng.choices(vocab, k=rng.randint(1, 3))) + f" t{i}"
        lines = [
            " ".join(rng.choices(vocab, k=rng.randint(3, 7)))
            for _ in range(rng.randint(1, 5))
        ]
        rows.append(
            {
                "title": title,
                "artist": f"artist {rng.randint(1, max(2, n_docs // 3))}",
                "year": rng.randint(1950, 2019),
                "genre": rng.choice(genres),
                "emotion": rng.choice(emotions),
                "lyrics": "\n".join(lines),
            }
        )
    return rows


def corpus_from_rows(rows, tmp_path, name="corpus.jsonl"):
    import json

    from lyricsearch.corpus import ingest

    path = tmp_path / name
    path.write_text(
        "\n".join(json.dumps(r, ensure_ascii=False) for r in rows) + "\n",
        encoding="utf-8",
    )
    return ingest(path, format="jsonl")
