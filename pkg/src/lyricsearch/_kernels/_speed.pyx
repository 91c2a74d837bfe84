# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scoring kernels: tight loops over posting arrays.

Mirrors pure.py operation-for-operation; floating point expressions are
written in the same association order so both backends produce
bit-identical scores.
"""


def bm25_accumulate(double[::1] out, const int[::1] doc_ords, const int[::1] tfs,
                    const int[::1] field_lens, double idf, double k1, double b,
                    double avg_len, double weight):
    cdef Py_ssize_t i, n = doc_ords.shape[0]
    cdef double k1p1 = k1 + 1.0
    cdef double scale = weight * idf
    cdef double tf, dl
    cdef int o
    for i in range(n):
        o = doc_ords[i]
        tf = tfs[i]
        dl = field_lens[o]
        out[o] += scale * (tf * k1p1) / (tf + k1 * (1.0 - b + b * (dl / avg_len)))


def dot_accumulate(double[::1] out, const int[::1] doc_ords,
                   const double[::1] weights, double scale):
    cdef Py_ssize_t i, n = doc_ords.shape[0]
    for i in range(n):
        out[doc_ords[i]] += scale * weights[i]
