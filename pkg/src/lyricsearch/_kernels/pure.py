"""Numpy implementations of the scoring kernels.

This is the fallback used when the compiled extension is unavailable.
Both backends implement the same contracts and are kept operation-order
identical so scores agree bit-for-bit.

All accumulate kernels require the target ordinals within one call to be
unique (one posting per document per term per field), which the index
guarantees by construction.
"""

from __future__ import annotations

import numpy as np


def bm25_accumulate(out, doc_ords, tfs, field_lens, idf, k1, b, avg_len, weight):
    """out[o] += weight*idf * tf*(k1+1) / (tf + k1*(1-b+b*len[o]/avg_len))."""
    tf = tfs.astype(np.float64)
    dl = field_lens[doc_ords].astype(np.float64)
    denom = tf + k1 * (1.0 - b + b * (dl / avg_len))
    out[doc_ords] += weight * idf * (tf * (k1 + 1.0)) / denom


def dot_accumulate(out, doc_ords, weights, scale):
    """out[o] += scale * weights, used for sparse dot products by column."""
    out[doc_ords] += scale * weights
