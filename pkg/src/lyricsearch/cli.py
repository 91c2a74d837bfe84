"""Command line interface: ingest, build, query, serve, benchmark."""

from __future__ import annotations

import json
import statistics
import time
from pathlib import Path

import click

from . import analytics, corpus as corpus_mod
from ._kernels import BACKEND
from .fixtures import GeneratorSpec, generate_to_file
from .index import RankingParams
from .recommend import RecommendError, Recommender, RecOptions, artist_share
from .search import EmptyQueryError, Filters, SearchEngine
from .service import ServiceConfig
from .service import serve as run_service
from .snapshot import build_snapshot, load_snapshot, persist_snapshot
from .textprep import PipelineConfig, default_config


@click.group()
def main():
    """Lyrics search engine and recommender."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["jsonl", "csv"]), default=None,
              help="Defaults from the file extension.")
@click.option("--out", "out_dir", required=True, type=click.Path())
def ingest(input_path, fmt, out_dir):
    """Validate a lyrics file and persist it as a corpus store."""
    try:
        corpus = corpus_mod.ingest(input_path, format=fmt)
    except corpus_mod.CorpusError as exc:
        raise click.ClickException(str(exc))
    checksum = corpus_mod.persist(corpus, out_dir)
    click.echo(
        f"ingested {len(corpus)} records "
        f"({len(corpus.rejections)} rejected) -> {out_dir} [{checksum}]"
    )
    if corpus.rejections:
        click.echo(f"rejection report: {Path(out_dir) / 'rejections.jsonl'}")


def _load_pipeline(config_path: str | None) -> PipelineConfig:
    if config_path is None:
        return default_config()
    config = PipelineConfig.from_dict(
        json.loads(Path(config_path).read_text(encoding="utf-8"))
    )
    config.validate()
    return config


@main.command("build-index")
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--pipeline", "pipeline_path", type=click.Path(exists=True),
              help="Pipeline config JSON (defaults to the stock pipeline).")
@click.option("--k1", type=float, default=1.2, show_default=True)
@click.option("--b", type=float, default=0.75, show_default=True)
@click.option("--field-weights", default="2.0,1.5,1.0", show_default=True,
              help="BM25 weights for title,artist,lyrics.")
def build_index_cmd(corpus_dir, out_dir, pipeline_path, k1, b, field_weights):
    """Build a serving snapshot (index + vectors) from a corpus store."""
    try:
        weights = tuple(float(w) for w in field_weights.split(","))
        if len(weights) != 3:
            raise ValueError
    except ValueError:
        raise click.ClickException("--field-weights needs three comma-separated numbers")
    config = _load_pipeline(pipeline_path)
    loaded = corpus_mod.load(corpus_dir)
    started = time.perf_counter()
    snap = build_snapshot(
        loaded, config, ranking=RankingParams(k1=k1, b=b, field_weights=weights)
    )
    persist_snapshot(snap, out_dir)
    click.echo(
        f"indexed {len(loaded)} docs, {len(snap.index.terms)} terms "
        f"in {time.perf_counter() - started:.2f}s -> {out_dir}"
    )


def _echo_page(page, records):
    for rank, hit in enumerate(page.hits, start=1):
        record = records[hit.doc_id]
        year = record.year if record.year is not None else "????"
        click.echo(
            f"{rank:2d}. {record.title} — {record.artist} ({year}) "
            f"[{record.genre.display()}/{record.emotion.display()}] "
            f"fused={hit.fused:.4f} lex={hit.lexical:.3f} sem={hit.semantic:.3f}"
        )
        for snippet in hit.snippets:
            text = snippet.line_text
            marked = []
            at = snippet.line_span[0]
            for lo, hi in snippet.term_spans:
                marked.append(text[at - snippet.line_span[0] : lo - snippet.line_span[0]])
                marked.append(">>" + text[lo - snippet.line_span[0] : hi - snippet.line_span[0]] + "<<")
                at = hi
            marked.append(text[at - snippet.line_span[0] :])
            click.echo(f"      {''.join(marked)}")
    click.echo(f"({page.total_candidates} candidates, {page.timing_ms:.1f} ms)")


@main.command()
@click.option("--index", "index_dir", required=True, type=click.Path(exists=True))
@click.option("--q", "query_text", required=True)
@click.option("--k", type=int, default=10, show_default=True)
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--genre", default=None)
@click.option("--emotion", default=None)
@click.option("--year-from", type=int, default=None)
@click.option("--year-to", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
def search(index_dir, query_text, k, alpha, genre, emotion, year_from, year_to, as_json):
    """Query a snapshot and print ranked, highlighted results."""
    snap = load_snapshot(index_dir)
    engine = SearchEngine(snap)
    filters = Filters(genre=genre, emotion=emotion, year_from=year_from, year_to=year_to)
    try:
        page = engine.search(query_text, k=k, alpha=alpha, filters=filters)
    except EmptyQueryError as exc:
        raise click.ClickException(f"empty_query: {exc}")
    if as_json:
        click.echo(json.dumps(page.to_dict(snap.records), ensure_ascii=False))
    else:
        _echo_page(page, snap.records)


@main.command()
@click.option("--index", "index_dir", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, required=True)
@click.option("--k", type=int, default=10, show_default=True)
@click.option("--lambda", "lambda_", type=float, default=0.7, show_default=True)
@click.option("--artist-cap", type=int, default=2, show_default=True)
@click.option("--genre", default=None)
@click.option("--emotion", default=None)
@click.option("--json", "as_json", is_flag=True)
def recommend(index_dir, seed, k, lambda_, artist_cap, genre, emotion, as_json):
    """Recommend songs similar to a seed song, diversity-aware."""
    snap = load_snapshot(index_dir)
    rec = Recommender(snap)
    opts = RecOptions(
        k=k, lambda_=lambda_, artist_cap=artist_cap, genre=genre, emotion=emotion
    )
    try:
        results = rec.recommend_similar(seed, opts)
    except RecommendError as exc:
        raise click.ClickException(str(exc))
    share = artist_share(results, snap.records)
    if as_json:
        click.echo(
            json.dumps(
                {
                    "seed": str(seed),
                    "items": [
                        {"doc_id": str(d), "score": s, "title": snap.records[d].title,
                         "artist": snap.records[d].artist}
                        for d, s in results
                    ],
                    "artist_share": share,
                },
                ensure_ascii=False,
            )
        )
        return
    for rank, (doc_id, score) in enumerate(results, start=1):
        record = snap.records[doc_id]
        click.echo(f"{rank:2d}. {record.title} — {record.artist} sim={score:.4f}")
    click.echo(f"artist share: {share}")


@main.command()
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True)
def stats(corpus_dir, as_json):
    """Corpus distributions and balance metrics (chart-ready JSON)."""
    loaded = corpus_mod.load(corpus_dir)
    computed = analytics.compute_stats(loaded)
    payload = computed.to_dict()
    payload["balance"] = analytics.balance_report(computed)
    if as_json:
        click.echo(json.dumps(payload, ensure_ascii=False))
        return
    click.echo(f"total: {payload['total']}")
    for facet, key in (("by_genre", "genre"), ("by_emotion", "emotion"), ("by_year", "year")):
        parts = ", ".join(f"{row[key]}={row['count']}" for row in payload[facet])
        click.echo(f"{facet}: {parts}")


@main.command("gen-corpus")
@click.option("--spec", "spec_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--total", type=int, default=None, help="Override record count.")
@click.option("--seed", type=int, default=None, help="Override random seed.")
def gen_corpus(spec_path, out_path, total, seed):
    """Generate a synthetic corpus JSONL from a generator spec."""
    if spec_path:
        spec = GeneratorSpec.from_dict(
            json.loads(Path(spec_path).read_text(encoding="utf-8"))
        )
    else:
        spec = GeneratorSpec()
    if total is not None:
        spec.total = total
    if seed is not None:
        spec.seed = seed
    path = generate_to_file(spec, out_path)
    click.echo(f"wrote {spec.total} synthetic records -> {path}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--snapshot", "snapshot_dir", type=click.Path(exists=True), default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
def serve(config_path, snapshot_dir, host, port):
    """Serve the JSON API over a snapshot."""
    if config_path:
        config = ServiceConfig.from_file(config_path)
    elif snapshot_dir:
        config = ServiceConfig(snapshot_dir=snapshot_dir)
        config.apply_env()
    else:
        raise click.ClickException("pass --config or --snapshot")
    if host:
        config.host = host
    if port:
        config.port = port
    run_service(config)


@main.command()
@click.option("--index", "index_dir", required=True, type=click.Path(exists=True))
@click.option("--queries", "n_queries", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def bench(index_dir, n_queries, seed, as_json):
    """Mixed-query latency benchmark over a loaded snapshot."""
    import random

    snap = load_snapshot(index_dir)
    engine = SearchEngine(snap)
    vocab = snap.index.terms
    rng = random.Random(seed)
    latencies = []
    empty = 0
    for _ in range(n_queries):
        n_terms = rng.choice((1, 1, 1, 2, 2, 3))
        words = [vocab[rng.randrange(len(vocab))] for _ in range(n_terms)]
        started = time.perf_counter()
        try:
            page = engine.search(" ".join(words), k=10)
            if not page.hits:
                empty += 1
        except EmptyQueryError:
            empty += 1
        latencies.append((time.perf_counter() - started) * 1000.0)
    latencies.sort()
    result = {
        "backend": BACKEND,
        "queries": n_queries,
        "empty_results": empty,
        "p50_ms": statistics.median(latencies),
        "p90_ms": latencies[int(0.90 * (len(latencies) - 1))],
        "p99_ms": latencies[int(0.99 * (len(latencies) - 1))],
        "max_ms": latencies[-1],
    }
    if as_json:
        click.echo(json.dumps(result))
    else:
        click.echo(
            f"{n_queries} queries [{BACKEND}]: "
            f"p50={result['p50_ms']:.2f}ms p90={result['p90_ms']:.2f}ms "
            f"p99={result['p99_ms']:.2f}ms max={result['max_ms']:.2f}ms"
        )


if __name__ == "__main__":
    main(prog_name="lyricsearch")
