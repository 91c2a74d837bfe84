import pytest

from lyricsearch.corpus import EMOTIONS, GENRES
from lyricsearch.fixtures import (
    GeneratorError,
    GeneratorSpec,
    fixture_corpus,
    generate,
)


class TestFixtureCorpus:
    def test_thirty_records(self, corpus30):
        assert len(corpus30) == 30

    def test_exactly_one_good_life(self, corpus30):
        matches = [r for r in corpus30.records if r.title == "Good Life"]
        assert len(matches) == 1
        song = matches[0]
        assert "Kehlani" in song.artist and "G-Eazy" in song.artist
        assert "good" in song.lyrics.lower()

    def test_all_genres_present(self, corpus30):
        present = {r.genre.value for r in corpus30.records}
        assert present == set(GENRES)

    def test_all_emotions_present(self, corpus30):
        present = {r.emotion.value for r in corpus30.records}
        assert present == set(EMOTIONS)

    def test_no_rejections(self, corpus30):
        assert corpus30.rejections == []


class TestGenerator:
    def test_deterministic_bytes(self):
        spec = GeneratorSpec(seed=9, total=200)
        assert generate(spec) == generate(spec)

    def test_different_seeds_differ(self):
        assert generate(GeneratorSpec(seed=1, total=50)) != generate(
            GeneratorSpec(seed=2, total=50)
        )

    def test_total_one(self):
        text = generate(GeneratorSpec(seed=3, total=1))
        assert len(text.strip().splitlines()) == 1

    def test_facet_counts_within_two_percent(self, tmp_path):
        import json

        spec = GeneratorSpec(seed=4, total=10_000)
        rows = [json.loads(l) for l in generate(spec).splitlines()]
        by_genre = {}
        for row in rows:
            by_genre[row["genre"]] = by_genre.get(row["genre"], 0) + 1
        for genre, weight in spec.genre_weights.items():
            expected = weight * spec.total
            assert abs(by_genre.get(genre, 0) - expected) <= 0.02 * spec.total

    def test_exact_record_count_at_paper_scale(self):
        spec = GeneratorSpec(seed=5, total=28_372)
        text = generate(spec)
        assert len(text.strip().splitlines()) == 28_372

    def test_invalid_weights_error(self):
        spec = GeneratorSpec(seed=1, total=10, genre_weights={"pop": 0.5})
        with pytest.raises(GeneratorError):
            generate(spec)

    def test_invalid_total_error(self):
        with pytest.raises(GeneratorError):
            generate(GeneratorSpec(seed=1, total=0))

    def test_generated_rows_ingest_cleanly(self, tmp_path):
        from lyricsearch.corpus import ingest
        from lyricsearch.fixtures import generate_to_file

        path = generate_to_file(GeneratorSpec(seed=6, total=500), tmp_path / "g.jsonl")
        corpus = ingest(path)
        assert len(corpus) == 500
        assert corpus.rejections == []
