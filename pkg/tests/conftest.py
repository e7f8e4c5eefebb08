from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import GitRepoBuilder, build_synthetic_corpus  # noqa: E402


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("REDLINE_CACHE_DIR", str(tmp_path / "embed-cache"))


@pytest.fixture
def git_repo(tmp_path):
    return GitRepoBuilder(tmp_path / "repo")


@pytest.fixture(scope="session")
def synthetic_corpus(tmp_path_factory):
    """40-PR two-cohort corpus with review comments; built once per session."""
    root = tmp_path_factory.mktemp("corpus")
    records, manifest = build_synthetic_corpus(root, prs_per_cohort=20, with_comments=True)
    return records, manifest
