import json
from importlib import resources

import pytest
from click.testing import CliRunner

from lyricsearch.cli import main


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def fixture_file(tmp_path_factory):
    text = resources.files("lyricsearch.fixtures").joinpath(
        "data", "fixture_corpus.jsonl"
    ).read_text(encoding="utf-8")
    path = tmp_path_factory.mktemp("cli") / "songs.jsonl"
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture(scope="module")
def built(runner, fixture_file, tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_built")
    corpus_dir = root / "corpus"
    snap_dir = root / "snap"
    r1 = runner.invoke(
        main, ["ingest", "--input", str(fixture_file), "--out", str(corpus_dir)]
    )
    assert r1.exit_code == 0, r1.output
    r2 = runner.invoke(
        main,
        ["build-index", "--corpus", str(corpus_dir), "--out", str(snap_dir)],
    )
    assert r2.exit_code == 0, r2.output
    return corpus_dir, snap_dir


class TestIngestAndBuild:
    def test_ingest_reports_counts(self, runner, fixture_file, tmp_path):
        r = runner.invoke(
            main, ["ingest", "--input", str(fixture_file), "--out", str(tmp_path / "c")]
        )
        assert r.exit_code == 0
        assert "ingested 30 records" in r.output

    def test_ingest_missing_file_fails(self, runner, tmp_path):
        r = runner.invoke(
            main, ["ingest", "--input", str(tmp_path / "nope.jsonl"), "--out", "x"]
        )
        assert r.exit_code != 0

    def test_build_reports_terms(self, built):
        pass  # building happens in the fixture; failures surface there


class TestSearchCommand:
    def test_golden_query_text_output(self, runner, built):
        _, snap_dir = built
        r = runner.invoke(main, ["search", "--index", str(snap_dir), "--q", "good"])
        assert r.exit_code == 0, r.output
        first = r.output.splitlines()[0]
        assert "Good Life" in first and "Kehlani" in first

    def test_json_output_schema(self, runner, built):
        import jsonschema

        _, snap_dir = built
        r = runner.invoke(
            main, ["search", "--index", str(snap_dir), "--q", "good", "--json"]
        )
        assert r.exit_code == 0
        payload = json.loads(r.output)
        schema = json.loads(
            resources.files("lyricsearch").joinpath(
                "schemas", "search_response.schema.json"
            ).read_text(encoding="utf-8")
        )
        jsonschema.validate(payload, schema)
        assert payload["hits"][0]["song"]["title"] == "Good Life"

    def test_filters(self, runner, built):
        _, snap_dir = built
        r = runner.invoke(
            main,
            ["search", "--index", str(snap_dir), "--q", "good",
             "--genre", "pop", "--json"],
        )
        payload = json.loads(r.output)
        assert all(h["song"]["genre"] == "pop" for h in payload["hits"])

    def test_empty_query_fails_cleanly(self, runner, built):
        _, snap_dir = built
        r = runner.invoke(main, ["search", "--index", str(snap_dir), "--q", "the a"])
        assert r.exit_code != 0
        assert "empty_query" in r.output


class TestRecommendCommand:
    def test_recommend_json(self, runner, built, snap30):
        _, snap_dir = built
        seed = next(r.id for r in snap30.corpus.records if r.title == "Good Life")
        r = runner.invoke(
            main,
            ["recommend", "--index", str(snap_dir), "--seed", str(seed), "--json"],
        )
        assert r.exit_code == 0, r.output
        payload = json.loads(r.output)
        assert payload["seed"] == str(seed)
        assert payload["items"]
        assert abs(sum(payload["artist_share"].values()) - 1.0) < 1e-9

    def test_unknown_seed_fails(self, runner, built):
        _, snap_dir = built
        r = runner.invoke(
            main, ["recommend", "--index", str(snap_dir), "--seed", "777"]
        )
        assert r.exit_code != 0


class TestStatsCommand:
    def test_stats_json(self, runner, built):
        corpus_dir, _ = built
        r = runner.invoke(main, ["stats", "--corpus", str(corpus_dir), "--json"])
        assert r.exit_code == 0
        payload = json.loads(r.output)
        assert payload["total"] == 30
        assert "balance" in payload


class TestGenCorpus:
    def test_generate_and_count(self, runner, tmp_path):
        out = tmp_path / "gen.jsonl"
        r = runner.invoke(
            main, ["gen-corpus", "--out", str(out), "--total", "120", "--seed", "3"]
        )
        assert r.exit_code == 0
        assert len(out.read_text().strip().splitlines()) == 120

    def test_spec_file(self, runner, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps({"seed": 8, "total": 15}))
        out = tmp_path / "gen.jsonl"
        r = runner.invoke(
            main, ["gen-corpus", "--spec", str(spec_path), "--out", str(out)]
        )
        assert r.exit_code == 0
        assert len(out.read_text().strip().splitlines()) == 15


class TestBenchCommand:
    def test_bench_runs(self, runner, built):
        _, snap_dir = built
        r = runner.invoke(
            main,
            ["bench", "--index", str(snap_dir), "--queries", "50", "--json"],
        )
        assert r.exit_code == 0, r.output
        payload = json.loads(r.output)
        assert payload["queries"] == 50
        assert payload["p50_ms"] > 0
