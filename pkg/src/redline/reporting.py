"""Machine-readable report emission: per-PR JSON, cohort tables, and
plot-ready distribution files.

Everything here is deterministic: fixed row and column orders, sorted JSON
keys, and repr-based float formatting, so re-running a command on unchanged
inputs produces byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
import re
from pathlib import Path
from statistics import fmean

from .complexity import Risk
from .ingestion import Cohort
from .pipeline import PrAnalysis
from .redundancy import cohort_amr
from .sentiment import EMOTIONS
from .stats import MannWhitneyResult, annotate_table, mann_whitney_u

MIN_SAMPLE_FOR_TEST = 2
LINE_CATEGORIES = ("loc", "multiline_string_lines", "blank_lines", "comment_lines")
TABLE_LINE_CATEGORIES = ("loc", "multiline_string_lines", "blank_lines")
MRS_BIN_WIDTH = 0.05

COHORT_ORDER = (Cohort.HUMAN, Cohort.AGENT)
RISK_ORDER = (
    Risk.NO_RISK,
    Risk.LOW_RISK_ADDITION,
    Risk.LOW_RISK_REMOVAL,
    Risk.HIGH_RISK_ADDITION,
    Risk.HIGH_RISK_REMOVAL,
)


class EmptyCohortError(Exception):
    pass


class NoScoredValues(Exception):
    pass


def _unit_ref(unit) -> dict:
    return {
        "file_path": unit.file_path,
        "qualified_name": unit.qualified_name,
        "start_line": unit.start_line,
        "end_line": unit.end_line,
    }


def _line_counts_dict(counts) -> dict:
    return {name: getattr(counts, name) for name in LINE_CATEGORIES}


def analysis_to_dict(analysis: PrAnalysis) -> dict:
    record = analysis.record
    redundancy = analysis.redundancy
    out: dict = {
        "pr_id": record.pr_id,
        "cohort": record.cohort.value,
        "redundancy": {
            "mrs": redundancy.mrs,
            "n_new": redundancy.n_new,
            "n_base": redundancy.n_base,
            "argmax_pair": None
            if redundancy.argmax_pair is None
            else {
                "new": _unit_ref(redundancy.argmax_pair[0]),
                "base": _unit_ref(redundancy.argmax_pair[1]),
            },
        },
        "refactorings": [
            {
                "kind": m.kind.value,
                "old": _unit_ref(m.old),
                "new": _unit_ref(m.new),
                "body_similarity": m.body_similarity,
            }
            for m in analysis.refactorings
        ],
        "pairs": [
            {
                "path": pm.path,
                "complexity": None
                if pm.complexity is None
                else {
                    "pre_cc": pm.complexity.pre_cc,
                    "post_cc": pm.complexity.post_cc,
                    "delta": pm.complexity.delta,
                    "risk": pm.complexity.risk.value,
                },
                "lines": {
                    "pre": _line_counts_dict(pm.pre_lines),
                    "post": _line_counts_dict(pm.post_lines),
                    "delta": {
                        name: pm.line_delta(name) for name in LINE_CATEGORIES
                    },
                },
            }
            for pm in analysis.pair_metrics
        ],
        "skipped_pairs": [
            {"path": path, "reason": reason} for path, reason in analysis.skipped
        ],
        "sentiment": None
        if analysis.sentiment is None
        else {
            "mean_profile": {
                name: analysis.sentiment.mean_profile.score(name) for name in EMOTIONS
            },
            "n_comments_included": analysis.sentiment.n_comments_included,
            "n_comments_excluded": {
                reason.value: count
                for reason, count in analysis.sentiment.n_comments_excluded.items()
            },
        },
    }
    return out


def safe_filename(pr_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", pr_id)


def write_pr_json(analysis: PrAnalysis, output_dir: Path) -> Path:
    output_dir.mkdir(parents=True, exist_ok=True)
    path = output_dir / f"{safe_filename(analysis.record.pr_id)}.json"
    payload = json.dumps(analysis_to_dict(analysis), sort_keys=True, indent=2)
    path.write_text(payload + "\n", encoding="utf-8")
    return path


def write_reports_jsonl(analyses: list[PrAnalysis], output_dir: Path) -> Path:
    output_dir.mkdir(parents=True, exist_ok=True)
    path = output_dir / "reports.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for analysis in analyses:
            fh.write(json.dumps(analysis_to_dict(analysis), sort_keys=True) + "\n")
    return path


def _cohort_split(analyses: list[PrAnalysis]):
    return {
        cohort: [a for a in analyses if a.record.cohort is cohort]
        for cohort in COHORT_ORDER
    }


def build_metric_rows(analyses: list[PrAnalysis]) -> list[dict]:
    """Cohort-comparison rows: MRS, per-pair line additions/removals, and
    (when sentiment ran) per-emotion means, each with a Mann-Whitney p.

    Line metrics treat each changed file pair as one observation; MRS and
    emotions are per-PR observations.  The test is skipped (blank p) when
    either cohort has fewer than two observations for a row.
    """
    split = _cohort_split(analyses)
    samples: dict[str, dict[Cohort, list[float]]] = {}

    reports = [a.redundancy for a in analyses]
    cohorts = {a.record.pr_id: a.record.cohort for a in analyses}
    human_summary, agent_summary = cohort_amr(reports, cohorts)
    samples["mrs"] = {
        Cohort.HUMAN: list(human_summary.mrs_values),
        Cohort.AGENT: list(agent_summary.mrs_values),
    }

    for direction in ("addition", "removal"):
        for category in TABLE_LINE_CATEGORIES:
            metric = f"{direction}_{category}"
            per_cohort: dict[Cohort, list[float]] = {}
            for cohort in COHORT_ORDER:
                values = []
                for analysis in split[cohort]:
                    for pm in analysis.pair_metrics:
                        delta = pm.line_delta(category)
                        values.append(float(max(delta, 0) if direction == "addition" else max(-delta, 0)))
                per_cohort[cohort] = values
            samples[metric] = per_cohort

    if any(a.sentiment is not None for a in analyses):
        for emotion in EMOTIONS:
            per_cohort = {}
            for cohort in COHORT_ORDER:
                per_cohort[cohort] = [
                    a.sentiment.mean_profile.score(emotion)
                    for a in split[cohort]
                    if a.sentiment is not None
                ]
            samples[f"emotion_{emotion}"] = per_cohort

    rows = []
    results: dict[str, MannWhitneyResult | None] = {}
    for metric, per_cohort in samples.items():
        human = per_cohort[Cohort.HUMAN]
        agent = per_cohort[Cohort.AGENT]
        human_mean = fmean(human) if human else None
        agent_mean = fmean(agent) if agent else None
        delta = (
            human_mean - agent_mean
            if human_mean is not None and agent_mean is not None
            else None
        )
        rows.append(
            {
                "metric": metric,
                "human_mean": human_mean,
                "agent_mean": agent_mean,
                "delta": delta,
            }
        )
        if len(human) >= MIN_SAMPLE_FOR_TEST and len(agent) >= MIN_SAMPLE_FOR_TEST:
            results[metric] = mann_whitney_u(human, agent)
        else:
            results[metric] = None
    return annotate_table(rows, results)


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_cohort_table(rows: list[dict], output_dir: Path) -> Path:
    output_dir.mkdir(parents=True, exist_ok=True)
    path = output_dir / "cohort_table.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["metric", "human_mean", "agent_mean", "delta", "p_value", "stars"])
        for row in rows:
            writer.writerow(
                [
                    row["metric"],
                    _format_cell(row["human_mean"]),
                    _format_cell(row["agent_mean"]),
                    _format_cell(row["delta"]),
                    _format_cell(row["p_value"]),
                    row["stars"],
                ]
            )
    return path


def write_cc_distribution(analyses: list[PrAnalysis], output_dir: Path) -> Path:
    """Counts of file pairs per risk bucket and cohort (zeros included)."""
    output_dir.mkdir(parents=True, exist_ok=True)
    counts = {(cohort, risk): 0 for cohort in COHORT_ORDER for risk in RISK_ORDER}
    for analysis in analyses:
        for pm in analysis.pair_metrics:
            if pm.complexity is not None:
                counts[(analysis.record.cohort, pm.complexity.risk)] += 1
    path = output_dir / "cc_distribution.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["cohort", "risk", "count"])
        for cohort in COHORT_ORDER:
            for risk in RISK_ORDER:
                writer.writerow([cohort.value, risk.value, counts[(cohort, risk)]])
    return path


def render_text_table(rows: list[dict]) -> str:
    headers = ["metric", "human_mean", "agent_mean", "delta", "p_value", "stars"]
    table = [headers]
    for row in rows:
        table.append(
            [
                row["metric"],
                _round_cell(row["human_mean"]),
                _round_cell(row["agent_mean"]),
                _round_cell(row["delta"]),
                _round_cell(row["p_value"]),
                row["stars"],
            ]
        )
    widths = [max(len(r[i]) for r in table) for i in range(len(headers))]
    lines = []
    for idx, row in enumerate(table):
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * widths[i] for i in range(len(headers))))
    return "\n".join(lines)


def _round_cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def _load_reports(output_dir: Path) -> list[dict]:
    path = output_dir / "reports.jsonl"
    if not path.exists():
        raise FileNotFoundError(f"no analysis run found at {path}; run compare-cohorts first")
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line]


def _metric_values(reports: list[dict], metric: str) -> dict[str, list[float]]:
    values: dict[str, list[float]] = {cohort.value: [] for cohort in COHORT_ORDER}
    for report in reports:
        cohort = report["cohort"]
        if metric == "mrs":
            mrs = report["redundancy"]["mrs"]
            if mrs is not None:
                values[cohort].append(float(mrs))
        elif metric == "cc_delta":
            for pair in report["pairs"]:
                if pair["complexity"] is not None:
                    values[cohort].append(float(pair["complexity"]["delta"]))
        elif metric.startswith("emotion_"):
            emotion = metric[len("emotion_") :]
            if emotion not in EMOTIONS:
                raise ValueError(f"unknown emotion {emotion!r}")
            sentiment = report.get("sentiment")
            if sentiment is not None:
                values[cohort].append(float(sentiment["mean_profile"][emotion]))
        else:
            raise ValueError(f"unknown metric {metric!r}")
    return values


def _bin_index(value: float, width: float) -> int:
    return int(math.floor(value / width + 1e-9))


def emit_distribution(output_dir: Path, metric: str) -> Path:
    """Histogram CSV (cohort, bin_lower, bin_upper, count) for one metric.

    MRS and emotion scores bin at fixed width 0.05; complexity deltas bin
    per integer.  Only non-empty bins are emitted.  Raises NoScoredValues
    when no PR produced a value for the metric.
    """
    reports = _load_reports(output_dir)
    values = _metric_values(reports, metric)
    if not any(values.values()):
        raise NoScoredValues(metric)
    path = output_dir / f"dist_{metric}.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["cohort", "bin_lower", "bin_upper", "count"])
        for cohort in COHORT_ORDER:
            sample = values[cohort.value]
            bins: dict[int, int] = {}
            for value in sample:
                if metric == "cc_delta":
                    idx = int(math.floor(value))
                else:
                    # clamp so an exact 1.0 lands in the top [0.95, 1.00] bin
                    idx = min(_bin_index(value, MRS_BIN_WIDTH), 19)
                bins[idx] = bins.get(idx, 0) + 1
            for idx in sorted(bins):
                if metric == "cc_delta":
                    lower, upper = str(idx), str(idx + 1)
                else:
                    lower = f"{idx * MRS_BIN_WIDTH:.2f}"
                    upper = f"{(idx + 1) * MRS_BIN_WIDTH:.2f}"
                writer.writerow([cohort.value, lower, upper, bins[idx]])
    return path
