"""Command-line entry points.

    redline analyze-pr --manifest M --pr ID [--provider baseline|remote --provider-url U]
    redline compare-cohorts --manifest M --out DIR [--classifier-url U]
    redline emit-distribution --metric mrs --out DIR

REDLINE_CACHE_DIR overrides the embedding-cache location.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import RunConfig, build_provider
from .embedding import ProviderUnavailable
from .ingestion import (
    Cohort,
    CommitNotFound,
    NotAGitRepository,
    UnreadableFile,
    load_manifest,
)
from .pipeline import analyze_corpus, analyze_pr
from .redundancy import UnknownPrId
from .reporting import (
    EmptyCohortError,
    NoScoredValues,
    analysis_to_dict,
    build_metric_rows,
    emit_distribution,
    render_text_table,
    write_cc_distribution,
    write_cohort_table,
    write_pr_json,
    write_reports_jsonl,
)
from .sentiment import ClassifierUnavailable, EmptyCohort, HttpEmotionClassifier

log = logging.getLogger(__name__)


def _add_common(parser):
    parser.add_argument("--manifest", required=True, help="JSONL manifest of PRs")
    parser.add_argument("--out", default="redline-out", help="output directory")
    parser.add_argument(
        "--provider",
        choices=("baseline", "remote"),
        default="baseline",
        help="embedding provider (remote needs --provider-url)",
    )
    parser.add_argument("--provider-url", default=None)
    parser.add_argument(
        "--ext",
        action="append",
        default=None,
        metavar=".py",
        help="language extension filter (repeatable; default .py)",
    )
    parser.add_argument("--refactor-similarity", type=float, default=0.95)
    parser.add_argument("--min-fn-lines", type=int, default=3)
    parser.add_argument("--exclude-tests", action="store_true")
    parser.add_argument("--exclude-nested", action="store_true")
    parser.add_argument("--strip-docstrings", action="store_true")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="redline", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze-pr", help="analyze one PR from the manifest")
    _add_common(analyze)
    analyze.add_argument("--pr", required=True, help="pr_id to analyze")
    analyze.set_defaults(func=cmd_analyze_pr)

    compare = sub.add_parser("compare-cohorts", help="cohort comparison over the whole manifest")
    _add_common(compare)
    compare.add_argument("--classifier-url", default=None, help="emotion classifier base URL")
    compare.add_argument("--parallelism", type=int, default=1)
    compare.set_defaults(func=cmd_compare_cohorts)

    emit = sub.add_parser("emit-distribution", help="histogram data from a completed run")
    emit.add_argument("--metric", required=True, help="mrs | cc_delta | emotion_<name>")
    emit.add_argument("--out", required=True, help="directory of a compare-cohorts run")
    emit.set_defaults(func=cmd_emit_distribution)
    return parser


def _config_from_args(args, classifier_url=None, parallelism=1) -> RunConfig:
    return RunConfig(
        manifest_path=Path(args.manifest),
        output_dir=Path(args.out),
        provider=args.provider,
        provider_url=args.provider_url,
        classifier_url=classifier_url,
        extensions=tuple(args.ext) if args.ext else (".py",),
        refactor_similarity=args.refactor_similarity,
        min_fn_lines=args.min_fn_lines,
        parallelism=parallelism,
        include_tests=not args.exclude_tests,
        include_nested=not args.exclude_nested,
        strip_docstrings=args.strip_docstrings,
    )


def _load_records(config: RunConfig):
    records, errors = load_manifest(config.manifest_path)
    for error in errors:
        log.warning("manifest line %d rejected (%s): %s", error.line_no, error.kind, error.detail)
    return records


def cmd_analyze_pr(args) -> int:
    config = _config_from_args(args)
    records = _load_records(config)
    matching = [r for r in records if r.pr_id == args.pr]
    if not matching:
        raise UnknownPrId(args.pr)
    provider = build_provider(config)
    analysis = analyze_pr(matching[0], provider, config)
    path = write_pr_json(analysis, config.output_dir)
    print(json.dumps(analysis_to_dict(analysis), sort_keys=True, indent=2))
    log.info("report written to %s", path)
    return 0


def cmd_compare_cohorts(args) -> int:
    config = _config_from_args(
        args, classifier_url=args.classifier_url, parallelism=args.parallelism
    )
    records = _load_records(config)
    for cohort in (Cohort.HUMAN, Cohort.AGENT):
        if not any(r.cohort is cohort for r in records):
            raise EmptyCohortError(cohort.value)
    provider = build_provider(config)
    classifier = token_counter = None
    if config.classifier_url:
        classifier = HttpEmotionClassifier(config.classifier_url)
        token_counter = classifier
    analyses = analyze_corpus(records, provider, config, classifier, token_counter)
    write_reports_jsonl(analyses, config.output_dir)
    rows = build_metric_rows(analyses)
    write_cohort_table(rows, config.output_dir)
    write_cc_distribution(analyses, config.output_dir)
    print(render_text_table(rows))
    return 0


def cmd_emit_distribution(args) -> int:
    path = emit_distribution(Path(args.out), args.metric)
    print(f"distribution written to {path}")
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnknownPrId as exc:
        print(f"error: unknown pr_id {exc}", file=sys.stderr)
        return 2
    except (ProviderUnavailable, ClassifierUnavailable) as exc:
        print(f"error: provider failure: {exc}", file=sys.stderr)
        return 3
    except (EmptyCohortError, EmptyCohort) as exc:
        print(f"error: cohort {exc} has no PRs", file=sys.stderr)
        return 4
    except NoScoredValues as exc:
        print(f"error: no scored PRs for metric {exc}", file=sys.stderr)
        return 5
    except (UnreadableFile, NotAGitRepository, CommitNotFound, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
