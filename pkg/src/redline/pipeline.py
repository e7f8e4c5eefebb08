"""Per-PR analysis orchestration: diff -> metrics -> refactoring filter ->
redundancy score (-> sentiment when a classifier is configured)."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .complexity import ComplexityDelta, complexity_delta
from .config import RunConfig
from .ingestion import FilePairDiff, PullRequestRecord, extract_file_pairs
from .parsing import FunctionUnit, LineCategoryCounts, count_line_categories, extract_functions
from .redundancy import RedundancyReport, base_snapshot_functions, max_redundancy_score
from .refactoring import RefactoringMatch, candidate_new_functions, detect_refactorings
from .sentiment import PrSentiment, per_pr_sentiment

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairMetrics:
    """Raw-metric and complexity view of one changed file."""

    path: str
    complexity: ComplexityDelta | None  # None when either side fails to parse
    pre_lines: LineCategoryCounts
    post_lines: LineCategoryCounts

    def line_delta(self, category: str) -> int:
        return getattr(self.post_lines, category) - getattr(self.pre_lines, category)


@dataclass(frozen=True)
class PrAnalysis:
    record: PullRequestRecord
    pair_metrics: list[PairMetrics]
    skipped: list[tuple[str, str]]  # (path, reason)
    refactorings: list[RefactoringMatch]
    new_functions: list[FunctionUnit]
    redundancy: RedundancyReport
    sentiment: PrSentiment | None = None


def _pair_metrics(pair: FilePairDiff, skipped: list[tuple[str, str]]) -> PairMetrics:
    try:
        delta = complexity_delta(pair)
    except SyntaxError as exc:
        log.warning("complexity skipped for %s: %s", pair.path, exc)
        skipped.append((pair.path, "syntax_error"))
        delta = None
    return PairMetrics(
        path=pair.path,
        complexity=delta,
        pre_lines=count_line_categories(pair.pre_text or ""),
        post_lines=count_line_categories(pair.post_text or ""),
    )


def _side_functions(text: str | None, path: str, include_nested: bool, side: str):
    if text is None:
        return []
    try:
        return extract_functions(text, path, include_nested=include_nested)
    except SyntaxError as exc:
        log.warning("skipping %s side of %s: %s", side, path, exc)
        return []


def analyze_pr(
    record: PullRequestRecord,
    provider,
    config: RunConfig,
    classifier=None,
    token_counter=None,
) -> PrAnalysis:
    pairs = extract_file_pairs(record, extensions=config.extensions)
    skipped: list[tuple[str, str]] = []
    metrics = [_pair_metrics(pair, skipped) for pair in pairs]

    pre_fns: list[FunctionUnit] = []
    post_fns: list[FunctionUnit] = []
    for pair in pairs:
        pre_fns.extend(_side_functions(pair.pre_text, pair.path, config.include_nested, "pre"))
        post_fns.extend(_side_functions(pair.post_text, pair.path, config.include_nested, "post"))

    matches = detect_refactorings(
        pre_fns,
        post_fns,
        similarity_threshold=config.refactor_similarity,
        min_logical_lines=config.min_fn_lines,
    )
    excluded = {id(m.new) for m in matches}
    new_functions = [
        u for u in candidate_new_functions(pre_fns, post_fns) if id(u) not in excluded
    ]

    base_functions = base_snapshot_functions(
        record,
        extensions=config.extensions,
        include_tests=config.include_tests,
        include_nested=config.include_nested,
    )
    redundancy = max_redundancy_score(
        new_functions,
        base_functions,
        provider,
        pr_id=record.pr_id,
        strip_docstrings=config.strip_docstrings,
    )

    sentiment = None
    if classifier is not None and token_counter is not None:
        sentiment = per_pr_sentiment(record, classifier, token_counter)

    return PrAnalysis(
        record=record,
        pair_metrics=metrics,
        skipped=skipped,
        refactorings=matches,
        new_functions=new_functions,
        redundancy=redundancy,
        sentiment=sentiment,
    )


def analyze_corpus(
    records: list[PullRequestRecord],
    provider,
    config: RunConfig,
    classifier=None,
    token_counter=None,
) -> list[PrAnalysis]:
    """Analyze every PR, in manifest order, with bounded parallelism."""
    if config.parallelism == 1:
        return [analyze_pr(r, provider, config, classifier, token_counter) for r in records]
    with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
        futures = [
            pool.submit(analyze_pr, r, provider, config, classifier, token_counter)
            for r in records
        ]
        return [f.result() for f in futures]
