import json
from importlib import resources

import jsonschema
import pytest
from fastapi.testclient import TestClient

from lyricsearch.service import ServiceConfig, create_app


def schema(name):
    text = resources.files("lyricsearch").joinpath(
        "schemas", f"{name}.schema.json"
    ).read_text(encoding="utf-8")
    return json.loads(text)


def check(payload, schema_name):
    jsonschema.validate(payload, schema(schema_name))


@pytest.fixture(scope="module")
def client(snap30_dir):
    config = ServiceConfig(
        snapshot_dir=str(snap30_dir), cors_origins=["http://localhost:5173"]
    )
    app = create_app(config)
    with TestClient(app, raise_server_exceptions=False) as c:
        yield c


@pytest.fixture(scope="module")
def good_life_id(snap30):
    return next(r.id for r in snap30.corpus.records if r.title == "Good Life")


class TestSearchEndpoint:
    def test_golden_query(self, client):
        r = client.get("/api/search", params={"q": "good"})
        assert r.status_code == 200
        body = r.json()
        check(body, "search_response")
        assert body["hits"][0]["song"]["title"] == "Good Life"
        assert {"title", "lyrics"} <= set(body["hits"][0]["matched_fields"])
        assert body["hits"][0]["snippets"]

    def test_empty_query_400(self, client):
        r = client.get("/api/search", params={"q": ""})
        assert r.status_code == 400
        check(r.json(), "error")
        assert r.json()["error"]["code"] == "empty_query"

    def test_stopword_query_400(self, client):
        r = client.get("/api/search", params={"q": "the a an"})
        assert r.status_code == 400
        assert r.json()["error"]["code"] == "empty_query"

    def test_filters(self, client):
        r = client.get("/api/search", params={"q": "good", "genre": "pop"})
        assert r.status_code == 200
        for hit in r.json()["hits"]:
            assert hit["song"]["genre"] == "pop"

    def test_k_clamped_with_warning(self, client):
        r = client.get("/api/search", params={"q": "good", "k": 5000})
        assert r.status_code == 200
        assert any("k clamped" in w for w in r.json()["warnings"])

    def test_alpha_clamped_with_warning(self, client):
        r = client.get("/api/search", params={"q": "good", "alpha": 7})
        assert r.status_code == 200
        body = r.json()
        assert body["query"]["alpha"] == 1.0
        assert any("alpha clamped" in w for w in body["warnings"])

    def test_non_numeric_param_bad_parameter(self, client):
        r = client.get("/api/search", params={"q": "good", "k": "many"})
        assert r.status_code == 400
        assert r.json()["error"]["code"] == "bad_parameter"

    def test_cors_allowlist_applied(self, client):
        r = client.get(
            "/api/search",
            params={"q": "good"},
            headers={"Origin": "http://localhost:5173"},
        )
        assert r.headers.get("access-control-allow-origin") == "http://localhost:5173"


class TestSongsEndpoint:
    def test_song_with_lyrics(self, client, good_life_id):
        r = client.get(f"/api/songs/{good_life_id}")
        assert r.status_code == 200
        body = r.json()
        check(body, "song")
        assert body["title"] == "Good Life"
        assert "good life" in body["lyrics"].lower()

    def test_missing_song_404(self, client):
        r = client.get("/api/songs/999999999")
        assert r.status_code == 404
        check(r.json(), "error")
        assert r.json()["error"]["code"] == "not_found"


class TestRecommendEndpoints:
    def test_recommend(self, client, good_life_id):
        r = client.get(
            "/api/recommend",
            params={"seed": good_life_id, "k": 5, "lambda": 0.7, "artist_cap": 2},
        )
        assert r.status_code == 200
        body = r.json()
        check(body, "recommend_response")
        assert body["seed"] == str(good_life_id)
        assert sum(body["artist_share"].values()) == pytest.approx(1.0, abs=1e-9)
        counts = {}
        for item in body["items"]:
            counts[item["song"]["artist"]] = counts.get(item["song"]["artist"], 0) + 1
        assert all(v <= 2 for v in counts.values())

    def test_unknown_seed_404(self, client):
        r = client.get("/api/recommend", params={"seed": 4242})
        assert r.status_code == 404
        assert r.json()["error"]["code"] == "not_found"

    def test_facet(self, client):
        r = client.get("/api/recommend/facet", params={"genre": "pop", "k": 5})
        assert r.status_code == 200
        body = r.json()
        check(body, "recommend_response")
        for item in body["items"]:
            assert item["song"]["genre"] == "pop"

    def test_facet_requires_exactly_one(self, client):
        r = client.get("/api/recommend/facet")
        assert r.status_code == 400
        both = client.get(
            "/api/recommend/facet", params={"genre": "pop", "emotion": "sadness"}
        )
        assert both.status_code == 400

    def test_unknown_facet_404(self, client):
        r = client.get("/api/recommend/facet", params={"genre": "vaporwave"})
        assert r.status_code == 404


class TestStatsAndHealth:
    def test_stats_payload(self, client):
        r = client.get("/api/stats")
        assert r.status_code == 200
        body = r.json()
        check(body, "stats_response")
        assert body["total"] == 30
        assert sum(row["count"] for row in body["by_genre"]) == 30
        assert {row["genre"] for row in body["by_genre"]} >= {
            "pop", "country", "blues", "rock", "jazz", "reggae", "hip-hop",
        }

    def test_health(self, client, snap30):
        r = client.get("/api/health")
        assert r.status_code == 200
        body = r.json()
        check(body, "health")
        assert body["fingerprints"] == snap30.fingerprints
        assert body["documents"] == 30


class TestReload:
    def test_reload_identical_noop(self, client, snap30):
        r = client.post("/api/admin/reload", json={})
        assert r.status_code == 200
        assert r.json()["fingerprints"] == snap30.fingerprints

    def test_reload_invalid_keeps_old(self, client, snap30, tmp_path_factory):
        bad_dir = tmp_path_factory.mktemp("bad_snapshot")
        r = client.post("/api/admin/reload", json={"dir": str(bad_dir)})
        assert r.status_code == 409
        assert r.json()["error"]["code"] == "stale_index"
        health = client.get("/api/health").json()
        assert health["fingerprints"] == snap30.fingerprints

    def test_reload_new_snapshot(self, client, tmp_path_factory):
        from lyricsearch.corpus import ingest
        from lyricsearch.snapshot import build_snapshot, persist_snapshot
        from lyricsearch.textprep import default_config

        new_dir = tmp_path_factory.mktemp("snap2")
        rows = [
            {"title": "only song", "artist": "solo", "year": 2001, "genre": "pop",
             "emotion": "sadness", "lyrics": "one lonely verse"},
        ]
        path = new_dir / "c.jsonl"
        path.write_text(json.dumps(rows[0]) + "\n", encoding="utf-8")
        snap = build_snapshot(ingest(path), default_config())
        persist_snapshot(snap, new_dir / "snap")
        r = client.post("/api/admin/reload", json={"dir": str(new_dir / "snap")})
        assert r.status_code == 200
        assert client.get("/api/health").json()["documents"] == 1
        # restore the module-scoped fixture state for later tests
        back = client.post("/api/admin/reload", json=None)


class TestStaleStartup:
    def test_refuses_to_start_on_mismatched_pipeline(self, snap30_dir, tmp_path):
        import shutil

        from lyricsearch.index import StaleIndexError

        clone = tmp_path / "clone"
        shutil.copytree(snap30_dir, clone)
        pipeline = json.loads((clone / "pipeline.json").read_text())
        pipeline["stopwords"].append("zzz-new-stopword")
        (clone / "pipeline.json").write_text(json.dumps(pipeline))
        with pytest.raises(StaleIndexError):
            create_app(ServiceConfig(snapshot_dir=str(clone)))
