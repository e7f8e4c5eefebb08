"""Move-Method / Rename-Method detection between two snapshots.

A refactoring shows up in a diff as one function disappearing and a
near-identical one appearing elsewhere (move) or under a new name
(rename).  Matching is greedy one-to-one over normalized-body token
similarity, so those pairs can be excluded from the set of genuinely new
functions before redundancy scoring.
"""

from __future__ import annotations

import io
import tokenize
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .parsing import FunctionUnit, _FORMATTING_TOKENS

DEFAULT_SIMILARITY_THRESHOLD = 0.95
DEFAULT_MIN_LOGICAL_LINES = 3


class RefactoringKind(str, Enum):
    MOVE_METHOD = "move_method"
    RENAME_METHOD = "rename_method"


@dataclass(frozen=True)
class RefactoringMatch:
    kind: RefactoringKind
    old: FunctionUnit
    new: FunctionUnit
    body_similarity: float


def candidate_new_functions(
    base_fns: list[FunctionUnit], head_fns: list[FunctionUnit]
) -> list[FunctionUnit]:
    """Head functions whose (file, qualified name) is absent from base.

    This is the raw-addition set, before refactoring exclusion.
    """
    base_keys = {u.key for u in base_fns}
    return [u for u in head_fns if u.key not in base_keys]


def body_tokens(unit: FunctionUnit) -> list[str]:
    """Content tokens of the normalized body (formatting tokens dropped)."""
    toks = []
    reader = io.StringIO(unit.normalized_body).readline
    for tok in tokenize.generate_tokens(reader):
        if tok.type not in _FORMATTING_TOKENS:
            toks.append(tok.string)
    return toks


def logical_line_count(unit: FunctionUnit) -> int:
    """Logical lines in the normalized body (the def line counts as one)."""
    count = 0
    reader = io.StringIO(unit.normalized_body).readline
    for tok in tokenize.generate_tokens(reader):
        if tok.type == tokenize.NEWLINE:
            count += 1
    return count


def token_similarity(a_tokens: list[str], b_tokens: list[str]) -> float:
    """LCS ratio of two token sequences: 2*LCS / (len(a)+len(b)), in [0,1]."""
    la, lb = len(a_tokens), len(b_tokens)
    if la + lb == 0:
        return 1.0
    vocab: dict[str, int] = {}
    a_ids = np.array([vocab.setdefault(t, len(vocab)) for t in a_tokens], dtype=np.int64)
    b_ids = np.array([vocab.setdefault(t, len(vocab)) for t in b_tokens], dtype=np.int64)
    lcs = _kernels.lcs_length(a_ids, b_ids)
    return 2.0 * lcs / (la + lb)


def detect_refactorings(
    base_fns: list[FunctionUnit],
    head_fns: list[FunctionUnit],
    similarity_threshold: float = DEFAULT_SIMILARITY_THRESHOLD,
    min_logical_lines: int = DEFAULT_MIN_LOGICAL_LINES,
) -> list[RefactoringMatch]:
    """Match disappeared base functions to appeared head functions.

    Only functions whose key vanished (base side) or appeared (head side)
    participate: a copy of a function that still exists at head is
    duplication, not a move.  Functions shorter than `min_logical_lines`
    are exempt (too generic to match reliably).  Matching is greedy by
    descending similarity with a deterministic tie order, one-to-one on
    both sides.
    """
    head_keys = {u.key for u in head_fns}
    base_keys = {u.key for u in base_fns}
    disappeared = [u for u in base_fns if u.key not in head_keys]
    appeared = [u for u in head_fns if u.key not in base_keys]

    old_pool = [u for u in disappeared if logical_line_count(u) >= min_logical_lines]
    new_pool = [u for u in appeared if logical_line_count(u) >= min_logical_lines]
    if not old_pool or not new_pool:
        return []

    old_tokens = {id(u): body_tokens(u) for u in old_pool}
    new_tokens = {id(u): body_tokens(u) for u in new_pool}

    scored: list[tuple[float, FunctionUnit, FunctionUnit]] = []
    for old in old_pool:
        ot = old_tokens[id(old)]
        for new in new_pool:
            nt = new_tokens[id(new)]
            # cheap bound: LCS <= min length, so the ratio can't reach the
            # threshold when lengths diverge too much
            if 2.0 * min(len(ot), len(nt)) < similarity_threshold * (len(ot) + len(nt)):
                continue
            similarity = token_similarity(ot, nt)
            if similarity >= similarity_threshold:
                scored.append((similarity, old, new))

    scored.sort(
        key=lambda t: (
            -t[0],
            t[1].file_path,
            t[1].start_line,
            t[2].file_path,
            t[2].start_line,
        )
    )
    matched_old: set[int] = set()
    matched_new: set[int] = set()
    matches: list[RefactoringMatch] = []
    for similarity, old, new in scored:
        if id(old) in matched_old or id(new) in matched_new:
            continue
        if old.file_path == new.file_path and old.scope == new.scope:
            kind = RefactoringKind.RENAME_METHOD
        else:
            kind = RefactoringKind.MOVE_METHOD
        matches.append(
            RefactoringMatch(kind=kind, old=old, new=new, body_similarity=similarity)
        )
        matched_old.add(id(old))
        matched_new.add(id(new))
    return matches


def filtered_new_functions(
    base_fns: list[FunctionUnit],
    head_fns: list[FunctionUnit],
    similarity_threshold: float = DEFAULT_SIMILARITY_THRESHOLD,
    min_logical_lines: int = DEFAULT_MIN_LOGICAL_LINES,
) -> list[FunctionUnit]:
    """Genuinely new head functions: raw additions minus move/rename targets."""
    candidates = candidate_new_functions(base_fns, head_fns)
    matches = detect_refactorings(
        base_fns,
        head_fns,
        similarity_threshold=similarity_threshold,
        min_logical_lines=min_logical_lines,
    )
    excluded = {id(m.new) for m in matches}
    return [u for u in candidates if id(u) not in excluded]
