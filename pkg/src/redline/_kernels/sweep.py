"""All-pairs max-cosine sweep, chunked over rows to bound memory.

This kernel is shared by both backends: the BLAS matmul behind numpy beats
any hand-compiled loop here (measured in benchmarks/bench_kernels.py), so
compiling it would be a pessimization.  Chunking keeps peak memory at
O(chunk * n_base) instead of materializing the full cosine matrix.
"""

from __future__ import annotations

import numpy as np

ROW_CHUNK = 256


def argmax_cosine(new_vecs: np.ndarray, base_vecs: np.ndarray):
    """Maximum cosine over all (new row, base row) pairs.

    Returns (best_cosine, new_index, base_index).  Exact ties resolve to
    the first pair in row-major order.  Rows must be non-zero.
    """
    a = np.asarray(new_vecs, dtype=np.float64)
    b = np.asarray(base_vecs, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ValueError("inputs must be 2-D with matching column counts")
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ValueError("empty input matrix")
    norm_a = np.sqrt(np.einsum("ij,ij->i", a, a))
    norm_b = np.sqrt(np.einsum("ij,ij->i", b, b))
    if not norm_a.all() or not norm_b.all():
        raise ValueError("zero vector in input")

    best = -2.0
    best_i = best_j = 0
    m = b.shape[0]
    bt = b.T
    for start in range(0, a.shape[0], ROW_CHUNK):
        stop = min(start + ROW_CHUNK, a.shape[0])
        cos = (a[start:stop] @ bt) / np.outer(norm_a[start:stop], norm_b)
        flat = int(np.argmax(cos))
        i, j = divmod(flat, m)
        value = float(cos[i, j])
        if value > best:  # strict: earlier chunks win exact ties
            best = value
            best_i = start + i
            best_j = j
    return best, best_i, best_j
