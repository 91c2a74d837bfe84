import json
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lyricsearch import corpus as cm


def write_jsonl(path, rows):
    path.write_text(
        "\n".join(json.dumps(r, ensure_ascii=False) for r in rows) + "\n",
        encoding="utf-8",
    )
    return path


GOOD_ROW = {
    "title": "Good Life",
    "artist": "Kehlani, G-Eazy",
    "year": 2017,
    "genre": "hip-hop",
    "emotion": "feelings",
    "lyrics": "good life\ngood times",
}


class TestTaxonomy:
    def test_named_genres(self):
        for name in cm.GENRES:
            assert cm.Genre.parse(name) == cm.Genre(name)

    def test_genre_aliases(self):
        assert cm.Genre.parse("Hip Hop") == cm.Genre("hip-hop")
        assert cm.Genre.parse("HIPHOP") == cm.Genre("hip-hop")

    def test_unknown_genre_preserves_label(self):
        g = cm.Genre.parse("K-Pop")
        assert g.is_other and g.label == "K-Pop"
        assert g.display() == "other(K-Pop)"

    def test_named_emotions(self):
        for name in cm.EMOTIONS:
            assert cm.Emotion.parse(name) == cm.Emotion(name)

    def test_emotion_aliases(self):
        assert cm.Emotion.parse("World Life") == cm.Emotion("world/life")
        assert cm.Emotion.parse("night-time") == cm.Emotion("night/time")

    @given(st.text(max_size=30))
    @settings(max_examples=200, deadline=None)
    def test_parsing_is_total(self, text):
        g = cm.Genre.parse(text)
        e = cm.Emotion.parse(text)
        assert g.value in cm.GENRES or g.value == "other"
        assert e.value in cm.EMOTIONS or e.value == "other"


class TestIds:
    def test_content_derived_and_stable(self):
        a = cm.record_id("Good Life", "Kehlani", "la la")
        b = cm.record_id("Good Life", "Kehlani", "la la")
        assert a == b

    def test_nfc_normalization_applies(self):
        composed = cm.record_id("café", "x", "y")
        decomposed = cm.record_id("café", "x", "y")
        assert composed == decomposed

    def test_distinct_content_distinct_id(self):
        assert cm.record_id("a", "b", "c") != cm.record_id("a", "b", "d")


class TestIngest:
    def test_fixture_thirty_rows(self, tmp_path, corpus30):
        assert len(corpus30) == 30
        assert corpus30.rejections == []
        assert corpus30.manifest.count == 30

    def test_empty_file_fatal(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(cm.IngestError):
            cm.ingest(path, format="jsonl")

    def test_empty_lyrics_rejected_with_reason(self, tmp_path):
        rows = [GOOD_ROW, {**GOOD_ROW, "title": "Silent", "lyrics": "  "}]
        path = write_jsonl(tmp_path / "c.jsonl", rows)
        corpus = cm.ingest(path)
        assert len(corpus) == 1
        assert corpus.rejections == [cm.Rejection(2, "empty lyrics")]

    def test_missing_file_fatal(self, tmp_path):
        with pytest.raises(cm.IngestError):
            cm.ingest(tmp_path / "nope.jsonl")

    def test_not_utf8_fatal(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_bytes(b"\xff\xfe\x00bad")
        with pytest.raises(cm.IngestError):
            cm.ingest(path)

    def test_majority_rejected_fatal(self, tmp_path):
        rows = [GOOD_ROW] + [
            {**GOOD_ROW, "title": f"t{i}", "lyrics": ""} for i in range(3)
        ]
        path = write_jsonl(tmp_path / "c.jsonl", rows)
        with pytest.raises(cm.IngestError, match="corpus quality"):
            cm.ingest(path)

    def test_bad_year_rejected(self, tmp_path):
        rows = [GOOD_ROW, {**GOOD_ROW, "title": "Old", "year": 1520}]
        corpus = cm.ingest(write_jsonl(tmp_path / "c.jsonl", rows))
        assert [r.reason for r in corpus.rejections] == ["year out of range: 1520"]

    def test_unknown_year_allowed(self, tmp_path):
        rows = [{**GOOD_ROW, "year": None}]
        corpus = cm.ingest(write_jsonl(tmp_path / "c.jsonl", rows))
        assert corpus.records[0].year is None

    def test_invalid_json_line_rejected(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text(
            json.dumps(GOOD_ROW) + "\n{not json}\n", encoding="utf-8"
        )
        corpus = cm.ingest(path)
        assert len(corpus) == 1
        assert corpus.rejections[0].line == 2
        assert "invalid json" in corpus.rejections[0].reason

    def test_duplicate_content_rejected_not_fatal(self, tmp_path):
        corpus = cm.ingest(write_jsonl(tmp_path / "c.jsonl", [GOOD_ROW, GOOD_ROW]))
        assert len(corpus) == 1
        assert "duplicate of line 1" in corpus.rejections[0].reason

    def test_determinism(self, tmp_path):
        rows = [GOOD_ROW, {**GOOD_ROW, "title": "Other"}]
        path = write_jsonl(tmp_path / "c.jsonl", rows)
        a = cm.ingest(path)
        b = cm.ingest(path)
        assert [r.id for r in a.records] == [r.id for r in b.records]
        assert a.manifest.checksum == b.manifest.checksum

    def test_csv_roundtrip(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text(
            'title,artist,year,genre,emotion,lyrics\n'
            '"Good Life","Kehlani, G-Eazy",2017,hip-hop,feelings,"good life\ngood times"\n',
            encoding="utf-8",
        )
        corpus = cm.ingest(path)
        assert corpus.records[0].title == "Good Life"
        assert corpus.records[0].artist == "Kehlani, G-Eazy"
        assert corpus.records[0].lyrics == "good life\ngood times"

    def test_csv_bad_header_fatal(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text("name,words\nx,y\n", encoding="utf-8")
        with pytest.raises(cm.IngestError, match="header"):
            cm.ingest(path)


class TestPersistence:
    def test_roundtrip_equality(self, tmp_path, corpus30):
        cm.persist(corpus30, tmp_path / "store")
        loaded = cm.load(tmp_path / "store")
        assert loaded == corpus30
        assert loaded.records == corpus30.records

    def test_checksum_stable_across_persists(self, tmp_path, corpus30):
        c1 = cm.persist(corpus30, tmp_path / "one")
        c2 = cm.persist(corpus30, tmp_path / "two")
        assert c1 == c2 == corpus30.manifest.checksum

    def test_readonly_dir_persist_error(self, tmp_path, corpus30):
        if os.geteuid() == 0:
            pytest.skip("root ignores directory permissions")
        target = tmp_path / "ro"
        target.mkdir()
        os.chmod(target, 0o500)
        try:
            with pytest.raises(cm.PersistError):
                cm.persist(corpus30, target)
        finally:
            os.chmod(target, 0o700)

    def test_write_failure_maps_to_persist_error(self, tmp_path, corpus30, monkeypatch):
        from pathlib import Path

        def boom(self, *args, **kwargs):
            raise OSError(30, "Read-only file system")

        monkeypatch.setattr(Path, "write_text", boom)
        with pytest.raises(cm.PersistError, match="Read-only"):
            cm.persist(corpus30, tmp_path / "store")

    def test_tampered_records_corruption(self, tmp_path, corpus30):
        cm.persist(corpus30, tmp_path / "store")
        records = tmp_path / "store" / cm.RECORDS_NAME
        text = records.read_text(encoding="utf-8").replace("Good Life", "Bad Life")
        records.write_text(text, encoding="utf-8")
        with pytest.raises(cm.CorruptionError):
            cm.load(tmp_path / "store")

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(cm.StoreNotFoundError):
            cm.load(tmp_path)

    def test_rejections_written(self, tmp_path):
        rows = [GOOD_ROW, {**GOOD_ROW, "title": "Silent", "lyrics": ""}]
        corpus = cm.ingest(write_jsonl(tmp_path / "c.jsonl", rows))
        cm.persist(corpus, tmp_path / "store")
        report = (tmp_path / "store" / "rejections.jsonl").read_text()
        assert json.loads(report) == {"line": 2, "reason": "empty lyrics"}


@given(
    st.lists(
        st.tuples(
            st.text(min_size=1, max_size=12).filter(str.strip),
            st.text(max_size=8),
            st.text(min_size=1, max_size=30).filter(str.strip),
        ),
        min_size=1,
        max_size=8,
        unique_by=lambda t: (t[0], t[1], t[2]),
    )
)
@settings(max_examples=60, deadline=None)
def test_roundtrip_property(tmp_path_factory, entries):
    tmp = tmp_path_factory.mktemp("prop")
    rows = [
        {
            "title": title,
            "artist": artist,
            "year": 1980,
            "genre": "pop",
            "emotion": "sadness",
            "lyrics": lyrics,
        }
        for title, artist, lyrics in entries
    ]
    path = write_jsonl(tmp / "c.jsonl", rows)
    try:
        corpus = cm.ingest(path)
    except cm.IngestError:
        return  # duplicate-content rows under NFC are legitimately fatal-free rejections
    cm.persist(corpus, tmp / "store")
    assert cm.load(tmp / "store") == corpus
