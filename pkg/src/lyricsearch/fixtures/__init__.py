"""Test corpus and synthetic corpus generation.

``fixture_corpus()`` loads the 30-song hand-written corpus checked in at
``src/lyricsearch/fixtures/data/fixture_corpus.jsonl``. The generator
produces corpora of arbitrary size with controlled facet distributions
for benchmarks (the real dataset behind the reference figures is not
redistributable, so benchmarks run on synthetic data of the same scale).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..corpus import Corpus, ingest

FIXTURE_PATH = "src/lyricsearch/fixtures/data/fixture_corpus.jsonl"


class GeneratorError(Exception):
    pass


def fixture_corpus() -> Corpus:
    """The 30-song fixture: all genres, all emotions, zero rejections."""
    ref = resources.files("lyricsearch.fixtures").joinpath(
        "data", "fixture_corpus.jsonl"
    )
    with resources.as_file(ref) as path:
        return ingest(path, format="jsonl")


_WORDS = {
    "pop": """sugar neon glitter heart radio dance shine baby summer light
        crush diamond mirror midnight kiss sparkle echo paradise fever gold""",
    "country": """gravel road dust train porch whiskey boots river field barn
        harvest fence mama truck sunset creek pine county dirt home""",
    "blues": """sorrow midnight coal dust river bottle smoke rain delta
        trouble lonesome railroad moan shuffle candle whistle debt preacher""",
    "rock": """riot thunder wire static steel hammer engine fire glass siren
        smoke leather highway storm voltage chrome anthem fuse""",
    "jazz": """velvet trumpet smoke serenade moonlight brass snare satin
        cellar quartet ember bourbon swing lounge clarinet muted""",
    "reggae": """island sun riddim roots drum tide palm lion zion yard
        bassline heartbeat morning fire chalice rockers dub""",
    "hip-hop": """concrete corner cipher chalk hustle pavement sermon chrome
        block antenna gospel static skyline ledger crown flow""",
}

_EMOTION_WORDS = {
    "sadness": "tears goodbye lonesome empty fading sorrow ache",
    "violence": "fists broken sirens blood thunder riot scars",
    "world/life": "world people streets living history horizon roots",
    "obscene": "dirty filthy gutter slick crooked shameless",
    "music": "melody chorus rhythm singing harmony tune verse",
    "night/time": "midnight moonlight stars evening shadows dawn clock",
    "romantic": "darling kisses tender embrace devotion valentine",
    "feelings": "feeling heartbeat shiver wonder glowing tender",
}

PAPER_SCALE_TOTAL = 28372

_GENRE_SHAPE = {
    "pop": 0.25,
    "country": 0.19,
    "blues": 0.16,
    "rock": 0.15,
    "jazz": 0.10,
    "reggae": 0.08,
    "hip-hop": 0.07,
}

_EMOTION_SHAPE = {
    "sadness": 0.21,
    "violence": 0.13,
    "world/life": 0.15,
    "obscene": 0.08,
    "music": 0.11,
    "night/time": 0.10,
    "romantic": 0.12,
    "feelings": 0.10,
}


@dataclass
class GeneratorSpec:
    seed: int = 1
    total: int = 1000
    genre_weights: dict[str, float] = field(
        default_factory=lambda: dict(_GENRE_SHAPE)
    )
    emotion_weights: dict[str, float] = field(
        default_factory=lambda: dict(_EMOTION_SHAPE)
    )
    year_range: tuple[int, int] = (1950, 2019)
    n_artists: int = 400
    lines_range: tuple[int, int] = (6, 14)
    words_per_line: tuple[int, int] = (4, 8)

    def validate(self) -> None:
        if self.total < 1:
            raise GeneratorError("total must be >= 1")
        for name, weights in (
            ("genre_weights", self.genre_weights),
            ("emotion_weights", self.emotion_weights),
        ):
            if abs(sum(weights.values()) - 1.0) > 1e-9:
                raise GeneratorError(f"{name} must sum to 1")
            if any(w < 0 for w in weights.values()):
                raise GeneratorError(f"{name} must be non-negative")
        if self.year_range[0] > self.year_range[1]:
            raise GeneratorError("empty year_range")

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorSpec":
        spec = cls()
        for key in (
            "seed",
            "total",
            "genre_weights",
            "emotion_weights",
            "n_artists",
        ):
            if key in data:
                setattr(spec, key, data[key])
        if "year_range" in data:
            spec.year_range = tuple(data["year_range"])
        return spec


def _quota_counts(weights: dict[str, float], total: int) -> dict[str, int]:
    """Largest-remainder allocation: exact totals, deterministic."""
    names = sorted(weights)
    floors = {n: int(weights[n] * total) for n in names}
    remainder = total - sum(floors.values())
    by_frac = sorted(
        names, key=lambda n: (-(weights[n] * total - floors[n]), n)
    )
    for n in by_frac[:remainder]:
        floors[n] += 1
    return floors


def generate(spec: GeneratorSpec) -> str:
    """Synthesize a corpus as JSONL text; identical specs give identical
    bytes."""
    spec.validate()
    rng = random.Random(spec.seed)
    genre_pool = [
        g for g, n in _quota_counts(spec.genre_weights, spec.total).items()
        for _ in range(n)
    ]
    emotion_pool = [
        e for e, n in _quota_counts(spec.emotion_weights, spec.total).items()
        for _ in range(n)
    ]
    rng.shuffle(genre_pool)
    rng.shuffle(emotion_pool)
    artists = [f"Artist {i:04d}" for i in range(1, spec.n_artists + 1)]

    lines_out = []
    for i in range(spec.total):
        genre = genre_pool[i]
        emotion = emotion_pool[i]
        vocab = _WORDS[genre].split() + _EMOTION_WORDS[emotion].split()
        title_words = rng.sample(vocab, k=min(3, len(vocab)))
        title = " ".join(w.capitalize() for w in title_words) + f" No. {i}"
        n_lines = rng.randint(*spec.lines_range)
        lines = []
        for _ in range(n_lines):
            n_words = rng.randint(*spec.words_per_line)
            lines.append(" ".join(rng.choices(vocab, k=n_words)))
        row = {
            "title": title,
            "artist": rng.choice(artists),
            "year": rng.randint(*spec.year_range),
            "genre": genre,
            "emotion": emotion,
            "lyrics": "\n".join(lines),
        }
        lines_out.append(json.dumps(row, ensure_ascii=False))
    return "\n".join(lines_out) + "\n"


def generate_to_file(spec: GeneratorSpec, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(generate(spec), encoding="utf-8")
    return path
