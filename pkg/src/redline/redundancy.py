"""Per-PR Max Redundancy Score and per-cohort Average Max Redundancy.

The score of a PR is the single worst offender: the highest cosine between
any genuinely new function and any function that already existed in the
base snapshot.  PRs that add no functions (or whose base snapshot has none)
are unscored and excluded from cohort averages.
"""

from __future__ import annotations

import ast
import logging
from dataclasses import dataclass
from statistics import fmean

import numpy as np

from . import _kernels
from .ingestion import (
    DEFAULT_EXTENSIONS,
    Cohort,
    PullRequestRecord,
    list_files_at_commit,
    read_file_at_commit,
)
from .parsing import FunctionUnit, extract_functions

log = logging.getLogger(__name__)


class UnknownPrId(Exception):
    pass


@dataclass(frozen=True)
class RedundancyReport:
    """MRS for one PR; `mrs` is None when either function set is empty."""

    pr_id: str
    mrs: float | None
    argmax_pair: tuple[FunctionUnit, FunctionUnit] | None
    n_new: int
    n_base: int


@dataclass(frozen=True)
class CohortSummary:
    cohort: Cohort
    amr: float | None
    n_prs_scored: int
    mrs_values: tuple[float, ...]


def _looks_like_test_path(path: str) -> bool:
    name = path.rsplit("/", 1)[-1]
    return name.startswith("test_") or name.endswith("_test.py")


def base_snapshot_functions(
    pr: PullRequestRecord,
    extensions: tuple[str, ...] = DEFAULT_EXTENSIONS,
    include_tests: bool = True,
    include_nested: bool = True,
) -> list[FunctionUnit]:
    """All functions in all matching files at the PR's base commit.

    The full snapshot as written — functions the PR later deletes or
    refactors away are still part of it.  Unparseable or undecodable files
    are skipped with a warning.
    """
    units: list[FunctionUnit] = []
    for path in list_files_at_commit(pr.repo_path, pr.base_commit, extensions):
        if not include_tests and _looks_like_test_path(path):
            continue
        text = read_file_at_commit(pr.repo_path, pr.base_commit, path)
        if text is None:
            continue
        try:
            units.extend(extract_functions(text, path, include_nested=include_nested))
        except SyntaxError as exc:
            log.warning("skipping unparseable %s at %s: %s", path, pr.base_commit[:12], exc)
    return units


def strip_docstring(body_text: str) -> str:
    """Body text with a leading docstring removed (best effort)."""
    try:
        tree = ast.parse(body_text)
    except SyntaxError:
        return body_text
    for node in ast.walk(tree):
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            if (
                node.body
                and isinstance(node.body[0], ast.Expr)
                and isinstance(node.body[0].value, ast.Constant)
                and isinstance(node.body[0].value.value, str)
            ):
                node.body = node.body[1:] or [ast.Pass()]
    return ast.unparse(tree)


def _embedding_matrix(units: list[FunctionUnit], provider, strip_docstrings: bool) -> np.ndarray:
    texts = [strip_docstring(u.body_text) if strip_docstrings else u.body_text for u in units]
    vectors = provider.embed_batch(texts)
    return np.ascontiguousarray(np.stack([v.values for v in vectors]), dtype=np.float32)


def max_redundancy_score(
    new_functions: list[FunctionUnit],
    base_functions: list[FunctionUnit],
    provider,
    pr_id: str = "",
    strip_docstrings: bool = False,
) -> RedundancyReport:
    """Highest cosine between any new function and any base function.

    Ties on the maximum resolve to the smallest (new file, new line,
    base file, base line).  Empty inputs yield an unscored report rather
    than an error.
    """
    n_new, n_base = len(new_functions), len(base_functions)
    if n_new == 0 or n_base == 0:
        return RedundancyReport(pr_id=pr_id, mrs=None, argmax_pair=None, n_new=n_new, n_base=n_base)
    new_sorted = sorted(new_functions, key=lambda u: (u.file_path, u.start_line))
    base_sorted = sorted(base_functions, key=lambda u: (u.file_path, u.start_line))
    new_matrix = _embedding_matrix(new_sorted, provider, strip_docstrings)
    base_matrix = _embedding_matrix(base_sorted, provider, strip_docstrings)
    best, i, j = _kernels.argmax_cosine(new_matrix, base_matrix)
    return RedundancyReport(
        pr_id=pr_id,
        mrs=float(best),
        argmax_pair=(new_sorted[i], base_sorted[j]),
        n_new=n_new,
        n_base=n_base,
    )


def cohort_amr(
    reports: list[RedundancyReport], cohorts: dict[str, Cohort]
) -> tuple[CohortSummary, CohortSummary]:
    """(human summary, agent summary); unscored reports are excluded."""
    values: dict[Cohort, list[float]] = {Cohort.HUMAN: [], Cohort.AGENT: []}
    for report in reports:
        if report.pr_id not in cohorts:
            raise UnknownPrId(report.pr_id)
        if report.mrs is not None:
            values[cohorts[report.pr_id]].append(report.mrs)

    def summary(cohort: Cohort) -> CohortSummary:
        sample = values[cohort]
        return CohortSummary(
            cohort=cohort,
            amr=fmean(sample) if sample else None,
            n_prs_scored=len(sample),
            mrs_values=tuple(sample),
        )

    return summary(Cohort.HUMAN), summary(Cohort.AGENT)
