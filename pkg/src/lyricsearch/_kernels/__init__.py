"""Scoring kernels with a compiled fast path.

The Cython extension is selected at import when present; otherwise the
numpy fallback takes over transparently. Set LYRICSEARCH_PURE=1 to force
the fallback (used by the benchmark and the equivalence tests).
"""

import os

if os.environ.get("LYRICSEARCH_PURE"):
    from . import pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _speed as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import pure as _impl

        BACKEND = "pure"

bm25_accumulate = _impl.bm25_accumulate
dot_accumulate = _impl.dot_accumulate

__all__ = ["BACKEND", "bm25_accumulate", "dot_accumulate"]
