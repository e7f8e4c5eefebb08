"""Fallback LCS kernel: bit-parallel scan on Python big ints."""

from __future__ import annotations

BACKEND = "pure"


def lcs_length(a, b) -> int:
    """Exact length of the longest common subsequence of two int sequences.

    Bit-parallel LCS (Crochemore-Iliopoulos-Pinzon-Reid) run on arbitrary
    precision Python ints: one big-int update per symbol of `b`.
    """
    a = list(a)
    b = list(b)
    n = len(a)
    if n == 0 or not b:
        return 0
    masks: dict[int, int] = {}
    for i, sym in enumerate(a):
        masks[sym] = masks.get(sym, 0) | (1 << i)
    full = (1 << n) - 1
    v = full
    for sym in b:
        m = masks.get(sym)
        if not m:
            continue
        u = v & m
        v = ((v + u) | (v - u)) & full
    return n - v.bit_count()
