"""Manifest loading and git snapshot-pair extraction.

PRs arrive as JSONL manifests pointing at local git clones; for each PR the
pre/post state of every changed source file is materialized by comparing
the base and head commits directly (renames surface as delete+add — the
refactoring filter owns rename unification).
"""

from __future__ import annotations

import json
import logging
import subprocess
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import NamedTuple

log = logging.getLogger(__name__)

DEFAULT_EXTENSIONS = (".py",)

_REQUIRED_FIELDS = ("pr_id", "repo_path", "base_commit", "head_commit", "cohort")
_COMMENT_FIELDS = ("author_login", "author_is_bot", "body", "source")


class Cohort(str, Enum):
    HUMAN = "Human"
    AGENT = "Agent"


class CommentSource(str, Enum):
    PR_COMMENT = "pr_comment"
    REVIEW_COMMENT = "review_comment"
    REVIEW = "review"


@dataclass(frozen=True)
class ReviewComment:
    author_login: str
    author_is_bot: bool
    body: str
    source: CommentSource


@dataclass(frozen=True)
class PullRequestRecord:
    pr_id: str
    repo_path: str
    base_commit: str
    head_commit: str
    cohort: Cohort
    comments: tuple[ReviewComment, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class FilePairDiff:
    """Pre/post text of one changed file; a missing side means added/deleted."""

    path: str
    pre_text: str | None
    post_text: str | None


class UnreadableFile(Exception):
    pass


class CommitNotFound(Exception):
    pass


class NotAGitRepository(Exception):
    pass


@dataclass(frozen=True)
class ManifestError:
    """One rejected manifest line; parsing continues past it."""

    line_no: int
    kind: str  # missing_field | unknown_cohort | malformed_line | invalid_field
    detail: str


class ManifestLoad(NamedTuple):
    records: list[PullRequestRecord]
    errors: list[ManifestError]


def load_manifest(path: str | Path) -> ManifestLoad:
    """Parse a JSONL manifest; malformed lines are reported, not fatal.

    Returns records in file order plus per-line errors for the lines that
    were rejected.  Raises UnreadableFile when the file itself can't be read.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UnreadableFile(str(exc)) from exc

    records: list[PullRequestRecord] = []
    errors: list[ManifestError] = []
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            errors.append(ManifestError(line_no, "malformed_line", str(exc)))
            continue
        if not isinstance(obj, dict):
            errors.append(ManifestError(line_no, "malformed_line", "not a JSON object"))
            continue
        try:
            records.append(_parse_record(obj, line_no, errors))
        except _LineRejected:
            continue
    return ManifestLoad(records, errors)


class _LineRejected(Exception):
    pass


def _reject(errors, line_no, kind, detail):
    errors.append(ManifestError(line_no, kind, detail))
    raise _LineRejected


def _parse_record(obj, line_no, errors) -> PullRequestRecord:
    for name in _REQUIRED_FIELDS:
        if name not in obj:
            _reject(errors, line_no, "missing_field", name)
    try:
        cohort = Cohort(obj["cohort"])
    except ValueError:
        _reject(errors, line_no, "unknown_cohort", repr(obj["cohort"]))
    if obj["base_commit"] == obj["head_commit"]:
        _reject(errors, line_no, "invalid_field", "base_commit equals head_commit")
    comments = []
    for i, raw in enumerate(obj.get("comments", [])):
        if not isinstance(raw, dict):
            _reject(errors, line_no, "invalid_field", f"comments[{i}] is not an object")
        for name in _COMMENT_FIELDS:
            if name not in raw:
                _reject(errors, line_no, "missing_field", f"comments[{i}].{name}")
        if raw["body"] is None:
            _reject(errors, line_no, "invalid_field", f"comments[{i}].body is null")
        try:
            source = CommentSource(raw["source"])
        except ValueError:
            _reject(errors, line_no, "invalid_field", f"comments[{i}].source {raw['source']!r}")
        comments.append(
            ReviewComment(
                author_login=str(raw["author_login"]),
                author_is_bot=bool(raw["author_is_bot"]),
                body=str(raw["body"]),
                source=source,
            )
        )
    return PullRequestRecord(
        pr_id=str(obj["pr_id"]),
        repo_path=str(obj["repo_path"]),
        base_commit=str(obj["base_commit"]),
        head_commit=str(obj["head_commit"]),
        cohort=cohort,
        comments=tuple(comments),
    )


def _git(repo_path: str, *args: str) -> bytes:
    proc = subprocess.run(
        ["git", "-C", repo_path, *args],
        capture_output=True,
        check=False,
    )
    if proc.returncode != 0:
        raise subprocess.CalledProcessError(
            proc.returncode, proc.args, output=proc.stdout, stderr=proc.stderr
        )
    return proc.stdout


def _ensure_repo_and_commits(pr: PullRequestRecord) -> None:
    try:
        _git(pr.repo_path, "rev-parse", "--git-dir")
    except (subprocess.CalledProcessError, FileNotFoundError, NotADirectoryError) as exc:
        raise NotAGitRepository(pr.repo_path) from exc
    for commit in (pr.base_commit, pr.head_commit):
        try:
            _git(pr.repo_path, "cat-file", "-e", f"{commit}^{{commit}}")
        except subprocess.CalledProcessError as exc:
            raise CommitNotFound(f"{commit} in {pr.repo_path}") from exc


def _read_blob(repo_path: str, commit: str, path: str) -> str | None:
    """Blob text at commit:path, or None when binary / undecodable / absent."""
    try:
        raw = _git(repo_path, "cat-file", "blob", f"{commit}:{path}")
    except subprocess.CalledProcessError:
        log.warning("cannot read %s at %s; skipping", path, commit[:12])
        return None
    if b"\x00" in raw:
        log.warning("binary file %s at %s; skipping", path, commit[:12])
        return None
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        log.warning("non-UTF-8 file %s at %s; skipping", path, commit[:12])
        return None


def extract_file_pairs(
    pr: PullRequestRecord, extensions: tuple[str, ...] = DEFAULT_EXTENSIONS
) -> list[FilePairDiff]:
    """One FilePairDiff per changed file matching the extension filter.

    Compares base and head commits directly; output is sorted by path.
    Binary and undecodable files are skipped with a warning.
    """
    _ensure_repo_and_commits(pr)
    out = _git(
        pr.repo_path,
        "diff",
        "--name-status",
        "--no-renames",
        "-z",
        pr.base_commit,
        pr.head_commit,
    )
    fields = out.decode("utf-8", errors="surrogateescape").split("\x00")
    pairs: list[FilePairDiff] = []
    i = 0
    while i + 1 < len(fields):
        status, path = fields[i][:1], fields[i + 1]
        i += 2
        if not status or not path:
            continue
        if not any(path.endswith(ext) for ext in extensions):
            continue
        pre_text = None if status == "A" else _read_blob(pr.repo_path, pr.base_commit, path)
        post_text = None if status == "D" else _read_blob(pr.repo_path, pr.head_commit, path)
        if pre_text is None and post_text is None:
            continue
        if pre_text == post_text:
            # mode-only change; content metrics have nothing to measure
            continue
        pairs.append(FilePairDiff(path=path, pre_text=pre_text, post_text=post_text))
    pairs.sort(key=lambda p: p.path)
    return pairs


def list_files_at_commit(
    repo_path: str, commit: str, extensions: tuple[str, ...] = DEFAULT_EXTENSIONS
) -> list[str]:
    """Paths of all extension-matching files in a commit's tree, sorted."""
    out = _git(repo_path, "ls-tree", "-r", "--name-only", "-z", commit)
    paths = [p for p in out.decode("utf-8", errors="surrogateescape").split("\x00") if p]
    return sorted(p for p in paths if any(p.endswith(ext) for ext in extensions))


def read_file_at_commit(repo_path: str, commit: str, path: str) -> str | None:
    """Text of one file at a commit (None for binary/undecodable)."""
    return _read_blob(repo_path, commit, path)
