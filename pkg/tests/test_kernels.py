"""The compiled and pure kernels must agree bit-for-bit."""

import numpy as np
import pytest

from lyricsearch._kernels import pure

speed = pytest.importorskip(
    "lyricsearch._kernels._speed", reason="compiled extension not built"
)


def random_case(rng, n_docs=200, n_postings=64):
    ords = rng.choice(n_docs, size=n_postings, replace=False).astype(np.int32)
    tfs = rng.integers(1, 9, size=n_postings).astype(np.int32)
    lens = rng.integers(1, 60, size=n_docs).astype(np.int32)
    return ords, tfs, lens


class TestBM25Accumulate:
    def test_bit_identical(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            ords, tfs, lens = random_case(rng)
            out_pure = np.zeros(200)
            out_fast = np.zeros(200)
            args = (ords, tfs, lens, 1.7342, 1.2, 0.75, 17.25, 2.0)
            pure.bm25_accumulate(out_pure, *args)
            speed.bm25_accumulate(out_fast, *args)
            assert np.array_equal(out_pure, out_fast)

    def test_accumulates_across_calls(self):
        rng = np.random.default_rng(7)
        ords, tfs, lens = random_case(rng)
        out_pure = np.zeros(200)
        out_fast = np.zeros(200)
        for idf, weight in ((0.5, 2.0), (1.25, 1.5), (2.5, 1.0)):
            pure.bm25_accumulate(out_pure, ords, tfs, lens, idf, 1.2, 0.75, 9.5, weight)
            speed.bm25_accumulate(out_fast, ords, tfs, lens, idf, 1.2, 0.75, 9.5, weight)
        assert np.array_equal(out_pure, out_fast)


class TestDotAccumulate:
    def test_bit_identical(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(1, 120))
            ords = rng.choice(300, size=n, replace=False).astype(np.int32)
            weights = rng.random(n)
            out_pure = np.zeros(300)
            out_fast = np.zeros(300)
            scale = float(rng.random())
            pure.dot_accumulate(out_pure, ords, weights, scale)
            speed.dot_accumulate(out_fast, ords, weights, scale)
            assert np.array_equal(out_pure, out_fast)


class TestBackendSelection:
    def test_env_forces_pure(self):
        import subprocess
        import sys

        out = subprocess.run(
            [sys.executable, "-c",
             "from lyricsearch._kernels import BACKEND; print(BACKEND)"],
            env={"LYRICSEARCH_PURE": "1", "PATH": "/usr/bin:/bin"},
            capture_output=True,
            text=True,
        )
        assert out.stdout.strip() == "pure"

    def test_default_prefers_compiled(self):
        import os

        from lyricsearch._kernels import BACKEND

        if os.environ.get("LYRICSEARCH_PURE"):
            assert BACKEND == "pure"
        else:
            assert BACKEND == "compiled"
