# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel: exact token-LCS length, bit-parallel over uint64 words.

Contract-compatible with redline._kernels.pure.lcs_length; the package
selects one of the two at import time.
"""

import numpy as np

cdef extern from *:
    int __builtin_popcountll(unsigned long long x)

BACKEND = "native"


def lcs_length(a, b):
    """Exact LCS length of two int sequences (Crochemore bit-vector scan)."""
    a_arr = np.ascontiguousarray(np.asarray(a, dtype=np.int64))
    b_arr = np.ascontiguousarray(np.asarray(b, dtype=np.int64))
    cdef Py_ssize_t n = a_arr.shape[0]
    cdef Py_ssize_t m = b_arr.shape[0]
    if n == 0 or m == 0:
        return 0

    # map symbols to dense mask-row ids; b symbols absent from a get -1
    distinct = np.unique(a_arr)
    a_ids_arr = np.searchsorted(distinct, a_arr).astype(np.intp)
    b_pos = np.searchsorted(distinct, b_arr)
    b_pos[b_pos == distinct.shape[0]] = 0
    b_ids_arr = np.where(distinct[b_pos] == b_arr, b_pos, -1).astype(np.intp)

    cdef Py_ssize_t words = (n + 63) >> 6
    masks_arr = np.zeros((distinct.shape[0], words), dtype=np.uint64)
    cdef unsigned long long[:, ::1] masks = masks_arr
    cdef Py_ssize_t[::1] a_ids = a_ids_arr
    cdef Py_ssize_t[::1] b_ids = b_ids_arr

    cdef Py_ssize_t i, j, w, row
    for i in range(n):
        masks[a_ids[i], i >> 6] |= (<unsigned long long> 1) << (i & 63)

    v_arr = np.empty(words, dtype=np.uint64)
    cdef unsigned long long[::1] v = v_arr
    for w in range(words):
        v[w] = <unsigned long long> 0xFFFFFFFFFFFFFFFF
    cdef unsigned long long top_mask = <unsigned long long> 0xFFFFFFFFFFFFFFFF
    if n & 63:
        top_mask = ((<unsigned long long> 1) << (n & 63)) - 1
    v[words - 1] &= top_mask

    cdef unsigned long long u, s1, s2, carry, vw, mw
    for j in range(m):
        row = b_ids[j]
        if row < 0:
            continue
        carry = 0
        for w in range(words):
            vw = v[w]
            mw = masks[row, w]
            u = vw & mw
            s1 = vw + u
            s2 = s1 + carry
            carry = (s1 < vw) | (s2 < s1)
            v[w] = s2 | (vw & ~mw)
        v[words - 1] &= top_mask

    cdef Py_ssize_t zeros = 0
    for w in range(words):
        zeros += 64 - __builtin_popcountll(v[w])
    zeros -= 64 * words - n  # bits beyond n are masked to zero
    return zeros
