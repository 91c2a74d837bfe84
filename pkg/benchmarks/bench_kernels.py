#!/usr/bin/env python3
"""Compare the compiled scoring kernels against the numpy fallback.

Runs the raw kernels on synthetic posting arrays, then a full
end-to-end query benchmark over a generated corpus under each backend
(the backend is chosen at import, so the end-to-end half re-executes
this script in a subprocess with LYRICSEARCH_PURE=1).

Usage: python benchmarks/bench_kernels.py [--docs 28372] [--queries 300]
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np


def bench_raw_kernels(repeats: int = 200) -> dict[str, dict[str, float]]:
    from lyricsearch._kernels import _speed, pure

    rng = np.random.default_rng(1)
    n_docs, n_postings = 28_372, 4_000
    ords = rng.choice(n_docs, size=n_postings, replace=False).astype(np.int32)
    tfs = rng.integers(1, 9, size=n_postings).astype(np.int32)
    lens = rng.integers(5, 400, size=n_docs).astype(np.int32)
    weights = rng.random(n_postings)
    out = np.zeros(n_docs)

    results: dict[str, dict[str, float]] = {}
    for name, mod in (("compiled", _speed), ("pure", pure)):
        t0 = time.perf_counter()
        for _ in range(repeats):
            mod.bm25_accumulate(out, ords, tfs, lens, 1.7, 1.2, 0.75, 120.0, 1.0)
        bm25_us = (time.perf_counter() - t0) / repeats * 1e6
        t0 = time.perf_counter()
        for _ in range(repeats):
            mod.dot_accumulate(out, ords, weights, 0.33)
        dot_us = (time.perf_counter() - t0) / repeats * 1e6
        results[name] = {"bm25_accumulate_us": bm25_us, "dot_accumulate_us": dot_us}
    return results


def bench_end_to_end(docs: int, queries: int, pure_env: bool) -> dict:
    if pure_env:
        env = dict(os.environ, LYRICSEARCH_PURE="1")
        out = subprocess.run(
            [sys.executable, __file__, "--docs", str(docs), "--queries",
             str(queries), "--_e2e-only"],
            env=env, capture_output=True, text=True, check=True,
        )
        return json.loads(out.stdout.strip().splitlines()[-1])

    from lyricsearch._kernels import BACKEND
    from lyricsearch.corpus import ingest
    from lyricsearch.fixtures import GeneratorSpec, generate_to_file
    from lyricsearch.search import SearchEngine
    from lyricsearch.snapshot import build_snapshot
    from lyricsearch.textprep import default_config

    with tempfile.TemporaryDirectory() as tmp:
        jsonl = generate_to_file(
            GeneratorSpec(seed=77, total=docs), Path(tmp) / "corpus.jsonl"
        )
        corpus = ingest(jsonl)
        t0 = time.perf_counter()
        snap = build_snapshot(corpus, default_config())
        build_s = time.perf_counter() - t0
        engine = SearchEngine(snap)
        import random

        rng = random.Random(5)
        vocab = snap.index.terms
        latencies = []
        for _ in range(queries):
            words = [vocab[rng.randrange(len(vocab))] for _ in range(rng.choice((1, 2, 3)))]
            t0 = time.perf_counter()
            engine.search(" ".join(words), k=10)
            latencies.append((time.perf_counter() - t0) * 1000)
        latencies.sort()
        return {
            "backend": BACKEND,
            "docs": docs,
            "build_s": round(build_s, 2),
            "p50_ms": round(statistics.median(latencies), 3),
            "p99_ms": round(latencies[int(0.99 * (len(latencies) - 1))], 3),
        }


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--docs", type=int, default=28_372)
    parser.add_argument("--queries", type=int, default=300)
    parser.add_argument("--_e2e-only", action="store_true", dest="e2e_only")
    args = parser.parse_args()

    if args.e2e_only:
        print(json.dumps(bench_end_to_end(args.docs, args.queries, pure_env=False)))
        return

    print("== raw kernels (per call, synthetic postings) ==")
    raw = bench_raw_kernels()
    for name, row in raw.items():
        print(
            f"  {name:9s} bm25_accumulate {row['bm25_accumulate_us']:8.1f} us   "
            f"dot_accumulate {row['dot_accumulate_us']:8.1f} us"
        )
    speedup = raw["pure"]["bm25_accumulate_us"] / raw["compiled"]["bm25_accumulate_us"]
    print(f"  compiled/pure bm25 speedup: {speedup:.2f}x")

    print(f"\n== end to end ({args.docs} docs, {args.queries} queries) ==")
    for pure_env in (False, True):
        row = bench_end_to_end(args.docs, args.queries, pure_env)
        print(
            f"  {row['backend']:9s} build {row['build_s']:6.2f}s   "
            f"p50 {row['p50_ms']:7.3f}ms   p99 {row['p99_ms']:7.3f}ms"
        )


if __name__ == "__main__":
    main()
