import random

import pytest

from lyricsearch import index as ix
from lyricsearch.textprep import PipelineConfig, default_config, run_pipeline

from conftest import corpus_from_rows, make_random_corpus_rows
from oracles import naive_bm25

VOCAB = "good life love night train rain gold dust road fire river home".split()


def field_tokens(record, config):
    """Independent re-derivation of per-field token lists."""
    return {
        "title": run_pipeline(record.title, config).surfaces(),
        "artist": run_pipeline(record.artist, config).surfaces(),
        "lyrics": run_pipeline(record.lyrics, config).surfaces(),
    }


class TestBuild:
    def test_fixture_doc_count_and_df(self, corpus30, snap30, config):
        index = snap30.index
        assert index.n_docs == 30
        # brute-force df: scan every record through the pipeline
        expected_df = sum(
            1
            for r in corpus30.records
            if any("good" in field_tokens(r, config)[f] for f in ix.FIELDS)
        )
        assert expected_df == 3
        assert index.document_frequency("good") == expected_df

    def test_single_doc_positions(self, tmp_path):
        rows = [
            {
                "title": "x",
                "artist": "y",
                "year": 2000,
                "genre": "pop",
                "emotion": "sadness",
                "lyrics": "good good",
            }
        ]
        corpus = corpus_from_rows(rows, tmp_path)
        index = ix.build_index(corpus, default_config())
        postings = index.lookup("good")
        lyr = [p for p in postings if p.field == "lyrics"]
        assert len(lyr) == 1
        assert lyr[0].term_frequency == 2
        assert lyr[0].positions == (0, 1)

    def test_empty_corpus_build_error(self, corpus30):
        empty = type(corpus30)(
            records=[], manifest=corpus30.manifest, rejections=[]
        )
        with pytest.raises(ix.BuildError):
            ix.build_index(empty, default_config())

    def test_posting_invariants(self, snap30):
        index = snap30.index
        for term in ("good", "life", "midnight"):
            for posting in index.lookup(term):
                assert posting.term_frequency == len(posting.positions)
                assert list(posting.positions) == sorted(posting.positions)

    def test_df_bounds(self, snap30):
        index = snap30.index
        for term in index.terms:
            df = index.document_frequency(term)
            assert 0 < df <= index.n_docs


class TestLookup:
    def test_sorted_by_doc_id_then_field(self, snap30):
        postings = snap30.index.lookup("good")
        keys = [(p.doc_id, ix.FIELD_ID[p.field]) for p in postings]
        assert keys == sorted(keys)

    def test_unknown_term_empty(self, snap30):
        assert snap30.index.lookup("zzzqqq") == []

    def test_uppercase_term_misses(self, snap30):
        # callers run the pipeline first; raw-cased lookups find nothing
        assert snap30.index.lookup("GOOD") == []


class TestBM25:
    def test_empty_query_zero(self, snap30):
        doc_id = snap30.corpus.records[0].id
        assert snap30.index.bm25_score([], doc_id) == 0.0

    def test_unknown_doc_error(self, snap30):
        with pytest.raises(ix.UnknownDocError):
            snap30.index.bm25_score(["good"], 999999999)

    def test_three_doc_hand_corpus_matches_oracle(self, tmp_path):
        rows = [
            {"title": "good life", "artist": "a", "year": 2000, "genre": "pop",
             "emotion": "sadness", "lyrics": "good morning good night"},
            {"title": "blue rain", "artist": "b", "year": 2001, "genre": "blues",
             "emotion": "sadness", "lyrics": "rain rain good rain"},
            {"title": "dust road", "artist": "c", "year": 2002, "genre": "country",
             "emotion": "sadness", "lyrics": "long road home"},
        ]
        cfg = PipelineConfig(stages=("tokenize", "lowercase"), stopwords=frozenset())
        corpus = corpus_from_rows(rows, tmp_path)
        index = ix.build_index(corpus, cfg)
        docs = [field_tokens(r, cfg) for r in corpus.records]
        for terms in (["good"], ["rain"], ["good", "road"]):
            for i, record in enumerate(corpus.records):
                expected = naive_bm25(docs, terms, i)
                got = index.bm25_score(terms, record.id)
                assert got == pytest.approx(expected, abs=1e-9)

    def test_title_match_beats_lyrics_match(self, tmp_path):
        rows = [
            {"title": "good day", "artist": "a", "year": 2000, "genre": "pop",
             "emotion": "sadness", "lyrics": "sun in the sky"},
            {"title": "sun day", "artist": "a", "year": 2000, "genre": "pop",
             "emotion": "sadness", "lyrics": "good in the sky"},
        ]
        corpus = corpus_from_rows(rows, tmp_path)
        index = ix.build_index(
            corpus,
            PipelineConfig(stages=("tokenize", "lowercase"), stopwords=frozenset()),
        )
        title_doc, lyrics_doc = corpus.records
        assert index.bm25_score(["good"], title_doc.id) > index.bm25_score(
            ["good"], lyrics_doc.id
        )

    def test_oracle_equivalence_randomized(self, tmp_path):
        cfg = PipelineConfig(stages=("tokenize", "lowercase"), stopwords=frozenset())
        rng = random.Random(11)
        for trial in range(20):
            rows = make_random_corpus_rows(rng, rng.randint(2, 20), VOCAB)
            corpus = corpus_from_rows(rows, tmp_path, name=f"c{trial}.jsonl")
            index = ix.build_index(corpus, cfg)
            docs = [field_tokens(r, cfg) for r in corpus.records]
            terms = rng.choices(VOCAB, k=rng.randint(1, 4))
            for i, record in enumerate(corpus.records):
                assert index.bm25_score(terms, record.id) == pytest.approx(
                    naive_bm25(docs, terms, i), abs=1e-9
                )

    def test_monotonicity_extra_occurrence(self, tmp_path):
        cfg = PipelineConfig(stages=("tokenize", "lowercase"), stopwords=frozenset())
        rng = random.Random(23)
        for trial in range(10):
            rows = make_random_corpus_rows(rng, rng.randint(2, 10), VOCAB)
            term = rng.choice(VOCAB)
            target = rng.randrange(len(rows))
            corpus_a = corpus_from_rows(rows, tmp_path, name=f"a{trial}.jsonl")
            rows_b = [dict(r) for r in rows]
            rows_b[target]["lyrics"] += f"\n{term}"
            corpus_b = corpus_from_rows(rows_b, tmp_path, name=f"b{trial}.jsonl")
            index_a = ix.build_index(corpus_a, cfg)
            index_b = ix.build_index(corpus_b, cfg)
            before = index_a.bm25_score([term], corpus_a.records[target].id)
            after = index_b.bm25_score([term], corpus_b.records[target].id)
            assert after >= before - 1e-12


class TestPersistence:
    def test_roundtrip_equality(self, snap30, tmp_path, config):
        ix.persist_index(snap30.index, tmp_path)
        loaded = ix.load_index(tmp_path, serving_config=config)
        assert loaded == snap30.index

    def test_byte_identical_rebuilds(self, corpus30, config, tmp_path):
        a_dir = tmp_path / "a"
        b_dir = tmp_path / "b"
        ix.persist_index(ix.build_index(corpus30, config), a_dir)
        ix.persist_index(ix.build_index(corpus30, config), b_dir)
        assert (a_dir / ix.INDEX_FILE).read_bytes() == (
            b_dir / ix.INDEX_FILE
        ).read_bytes()

    def test_stale_fingerprint_rejected(self, snap30, tmp_path):
        ix.persist_index(snap30.index, tmp_path)
        other = PipelineConfig(
            stages=default_config().stages,
            stopwords=default_config().stopwords | {"zebra"},
        )
        with pytest.raises(ix.StaleIndexError, match="rebuild"):
            ix.load_index(tmp_path, serving_config=other)

    def test_missing_files(self, tmp_path):
        with pytest.raises(ix.IndexError_):
            ix.load_index(tmp_path / "nowhere")

    def test_scores_survive_roundtrip(self, snap30, tmp_path, config):
        ix.persist_index(snap30.index, tmp_path)
        loaded = ix.load_index(tmp_path, serving_config=config)
        for record in snap30.corpus.records[:5]:
            assert loaded.bm25_score(["good", "life"], record.id) == pytest.approx(
                snap30.index.bm25_score(["good", "life"], record.id), abs=1e-12
            )
