"""Hot-kernel selection.

Two inner loops dominate a large run: the all-pairs cosine sweep behind the
redundancy score and the token-LCS length behind refactoring matching.

- lcs_length has a compiled bit-parallel Cython implementation and a
  big-int pure-Python fallback with an identical (exact integer) contract.
  The compiled module is preferred when importable; REDLINE_PURE_PYTHON=1
  forces the fallback.
- argmax_cosine is shared by both backends: it rides numpy's BLAS matmul,
  which benchmarks faster than any hand-compiled loop here (see
  benchmarks/bench_kernels.py), chunked to bound memory.
"""

import os

from . import pure
from .sweep import argmax_cosine

if os.environ.get("REDLINE_PURE_PYTHON"):
    _impl = pure
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND
lcs_length = _impl.lcs_length

__all__ = ["BACKEND", "argmax_cosine", "lcs_length"]
