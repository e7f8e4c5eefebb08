"""Shared test infrastructure: throwaway git repos, HTTP stubs for the
embedding/classifier services, and a deterministic synthetic PR corpus."""

from __future__ import annotations

import http.server
import json
import random
import subprocess
import threading
from pathlib import Path

from redline.ingestion import Cohort, PullRequestRecord, ReviewComment, CommentSource


class GitRepoBuilder:
    """Minimal fixture repo: write files, commit, collect shas."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._git("init", "-q", "-b", "main")
        self._git("config", "user.email", "fixtures@example.com")
        self._git("config", "user.name", "Fixtures")
        self._git("config", "commit.gpgsign", "false")

    def _git(self, *args: str) -> str:
        proc = subprocess.run(
            ["git", "-C", str(self.root), *args],
            capture_output=True,
            text=True,
            check=True,
        )
        return proc.stdout.strip()

    def write(self, files: dict[str, str | None]) -> None:
        """Write (or delete, for None values) the given repo-relative files."""
        for rel, content in files.items():
            path = self.root / rel
            if content is None:
                path.unlink()
            else:
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(content, encoding="utf-8")

    def commit(self, message: str = "snapshot") -> str:
        self._git("add", "-A")
        self._git("commit", "-q", "--allow-empty", "-m", message)
        return self._git("rev-parse", "HEAD")

    def checkout(self, commit: str) -> None:
        self._git("checkout", "-q", commit)

    def snapshot_pair(self, base_files: dict, head_files: dict) -> tuple[str, str]:
        """Commit base files, then apply head changes on top; returns both shas."""
        self.write(base_files)
        base = self.commit("base")
        self.write(head_files)
        head = self.commit("head")
        return base, head


def make_record(
    pr_id: str,
    repo: GitRepoBuilder,
    base: str,
    head: str,
    cohort: Cohort = Cohort.HUMAN,
    comments: tuple[ReviewComment, ...] = (),
) -> PullRequestRecord:
    return PullRequestRecord(
        pr_id=pr_id,
        repo_path=str(repo.root),
        base_commit=base,
        head_commit=head,
        cohort=cohort,
        comments=comments,
    )


def comment(
    body: str,
    author: str = "reviewer",
    is_bot: bool = False,
    source: CommentSource = CommentSource.PR_COMMENT,
) -> ReviewComment:
    return ReviewComment(author_login=author, author_is_bot=is_bot, body=body, source=source)


class _StubHandler(http.server.BaseHTTPRequestHandler):
    """Dispatches POST bodies to the server's `routes` callables."""

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length)) if length else {}
        route = self.server.routes.get(self.path)  # type: ignore[attr-defined]
        if route is None:
            self.send_error(404)
            return
        self.server.requests.append((self.path, payload))  # type: ignore[attr-defined]
        status, body = route(payload)
        data = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


class StubServer:
    """Tiny threaded HTTP server for provider/classifier contract tests.

    routes: {path: callable(payload) -> (status, json_body)}
    """

    def __init__(self, routes):
        self.httpd = http.server.ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
        self.httpd.routes = routes
        self.httpd.requests = []
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self.thread.start()

    @property
    def url(self) -> str:
        host, port = self.httpd.server_address
        return f"http://{host}:{port}"

    @property
    def requests(self):
        return self.httpd.requests

    def close(self):
        self.httpd.shutdown()
        self.httpd.server_close()


def hash_embed_route(dim: int = 8):
    """Deterministic stand-in embedding route (char-bucket counts)."""

    def route(payload):
        vectors = []
        for text in payload["texts"]:
            vec = [0.0] * dim
            for ch in text:
                vec[ord(ch) % dim] += 1.0
            vectors.append(vec)
        return 200, {"vectors": vectors, "model": "stub-embed"}

    return route


def stub_classifier_routes(profile_fn=None):
    """Routes for /classify and /count_tokens backed by `profile_fn`."""
    profile_fn = profile_fn or deterministic_profile

    def classify(payload):
        return 200, {"profiles": [profile_fn(t) for t in payload["texts"]]}

    def count_tokens(payload):
        return 200, {"counts": [len(t.split()) for t in payload["texts"]]}

    return {"/classify": classify, "/count_tokens": count_tokens}


_EMOTIONS = ("anger", "disgust", "fear", "joy", "sadness", "surprise", "neutral")


def deterministic_profile(text: str) -> dict[str, float]:
    """Pseudo-profile derived from the text content; sums to 1 exactly enough."""
    rng = random.Random(text)
    raw = [rng.random() + 0.05 for _ in _EMOTIONS]
    total = sum(raw)
    return {name: value / total for name, value in zip(_EMOTIONS, raw)}


class DictClassifier:
    """In-process classifier handle: recorded profiles with a generated fallback."""

    def __init__(self, recorded: dict[str, dict[str, float]] | None = None):
        self.recorded = recorded or {}

    def classify(self, texts):
        return [self.recorded.get(t) or deterministic_profile(t) for t in texts]


class FixedTokenCounter:
    """Token counter stub: whitespace count unless an override is recorded."""

    def __init__(self, overrides: dict[str, int] | None = None):
        self.overrides = overrides or {}

    def count(self, texts):
        return [self.overrides.get(t, len(t.split())) for t in texts]


def write_manifest(path: Path, records: list[PullRequestRecord]) -> Path:
    lines = []
    for record in records:
        lines.append(
            json.dumps(
                {
                    "pr_id": record.pr_id,
                    "repo_path": record.repo_path,
                    "base_commit": record.base_commit,
                    "head_commit": record.head_commit,
                    "cohort": record.cohort.value,
                    "comments": [
                        {
                            "author_login": c.author_login,
                            "author_is_bot": c.author_is_bot,
                            "body": c.body,
                            "source": c.source.value,
                        }
                        for c in record.comments
                    ],
                }
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


GOLDEN_BASE_UTIL = '''"""Shared helpers."""


def parse_pairs(raw):
    """Parse k=v lines into a dict."""
    out = {}
    for line in raw.splitlines():
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def clamp(value, low, high):
    if value < low:
        return low
    if value > high:
        return high
    return value
'''

GOLDEN_BASE_EXTRA = '''"""Math helpers."""


def running_total(values):
    total = 0
    for v in values:
        total += v
        yield total
'''

GOLDEN_DUP_FILE = '''"""New feature module."""


def parse_pairs(raw):
    """Parse k=v lines into a dict."""
    out = {}
    for line in raw.splitlines():
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out
'''


def golden_pr_setup(root: Path):
    """Fixed-content fixture behind the frozen analyze-pr golden file."""
    repo = GitRepoBuilder(root / "golden-repo")
    base, head = repo.snapshot_pair(
        {"lib/util.py": GOLDEN_BASE_UTIL, "lib/math_extra.py": GOLDEN_BASE_EXTRA},
        {"feature/dup.py": GOLDEN_DUP_FILE},
    )
    record = make_record("golden-pr", repo, base, head, Cohort.AGENT)
    manifest = write_manifest(root / "golden.jsonl", [record])
    return record, manifest


def mini_corpus(root: Path):
    """Four-PR corpus: one agent duplicate, one agent fresh, one human fresh,
    one human docs-only change."""
    repo = GitRepoBuilder(root / "mini-repo")
    repo.write({"lib/util.py": GOLDEN_BASE_UTIL, "README.md": "readme v1\n"})
    base = repo.commit("base")

    def pr(pr_id, files, cohort):
        repo.checkout(base)
        repo.write(files)
        head = repo.commit(pr_id)
        return make_record(
            pr_id,
            repo,
            base,
            head,
            cohort,
            comments=(comment(f"review note for {pr_id} with enough words"),),
        )

    records = [
        pr("agent-dup", {"feature/dup.py": GOLDEN_DUP_FILE}, Cohort.AGENT),
        pr(
            "agent-fresh",
            {
                "feature/fresh_a.py": "def windowed_max(xs, w):\n"
                '    """Max per window."""\n'
                "    best = []\n"
                "    for i in range(len(xs) - w + 1):\n"
                "        best.append(max(xs[i : i + w]))\n"
                "    return best\n"
            },
            Cohort.AGENT,
        ),
        pr(
            "human-fresh",
            {
                "feature/fresh_h.py": "def dedupe_keep_order(items):\n"
                "    seen = set()\n"
                "    kept = []\n"
                "    for item in items:\n"
                "        if item not in seen:\n"
                "            seen.add(item)\n"
                "            kept.append(item)\n"
                "    return kept\n"
            },
            Cohort.HUMAN,
        ),
        pr("human-docs", {"README.md": "readme v2\n"}, Cohort.HUMAN),
    ]
    repo.checkout(base)
    manifest = write_manifest(root / "mini.jsonl", records)
    return records, manifest


# --- synthetic corpus ----------------------------------------------------

_BASE_FUNCTION_TEMPLATES = [
    (
        "parse_header_fields",
        '''def parse_header_fields(raw_text, separator):
    """Split raw header text into a field mapping."""
    fields = {{}}
    for chunk in raw_text.split(separator):
        if ":" not in chunk:
            continue
        label, value = chunk.split(":", 1)
        fields[label.strip()] = value.strip()
    return fields
''',
    ),
    (
        "rolling_window_sum",
        '''def rolling_window_sum(series, width):
    """Sums over a sliding window of the given width."""
    sums = []
    for start in range(len(series) - width + 1):
        total = 0
        for offset in range(width):
            total += series[start + offset]
        sums.append(total)
    return sums
''',
    ),
    (
        "merge_sorted_unique",
        '''def merge_sorted_unique(left, right):
    """Merge two sorted lists, dropping duplicates."""
    merged = []
    li = ri = 0
    while li < len(left) and ri < len(right):
        if left[li] <= right[ri]:
            candidate = left[li]
            li += 1
        else:
            candidate = right[ri]
            ri += 1
        if not merged or merged[-1] != candidate:
            merged.append(candidate)
    merged.extend(x for x in left[li:] if not merged or merged[-1] != x)
    merged.extend(x for x in right[ri:] if not merged or merged[-1] != x)
    return merged
''',
    ),
    (
        "format_duration",
        '''def format_duration(seconds):
    """Render a second count as h/m/s text."""
    hours, remainder = divmod(int(seconds), 3600)
    minutes, secs = divmod(remainder, 60)
    parts = []
    if hours:
        parts.append(f"{{hours}}h")
    if minutes:
        parts.append(f"{{minutes}}m")
    parts.append(f"{{secs}}s")
    return " ".join(parts)
''',
    ),
]


def _renamed_variant(source: str, rng: random.Random) -> str:
    """A near-duplicate: same structure, fresh identifier spellings."""
    import keyword
    import re as _re

    suffix = rng.randrange(10, 99)
    skip = {"range", "len", "int", "divmod"}
    renames = {}
    for name in _re.findall(r"\b[a-z_][a-z0-9_]*\b", source):
        if keyword.iskeyword(name) or name in skip or len(name) < 2:
            continue
        renames.setdefault(name, f"{name[:4]}{suffix}")
    out = source
    for old, new in sorted(renames.items(), key=lambda kv: -len(kv[0])):
        # lookahead keeps string prefixes like f"..." intact
        out = _re.sub(rf"\b{old}\b(?![\"'])", new, out)
    return out


def _fresh_function(index: int, rng: random.Random) -> str:
    ops = ["+", "-", "*"]
    op = ops[rng.randrange(len(ops))]
    threshold = rng.randrange(3, 40)
    return (
        f"def compute_metric_{index}(records_{index}, limit_{index}):\n"
        f'    """Aggregate records with rule {index}."""\n'
        f"    bucket_{index} = []\n"
        f"    for item_{index} in records_{index}:\n"
        f"        score_{index} = item_{index} {op} {threshold}\n"
        f"        if score_{index} > limit_{index}:\n"
        f"            bucket_{index}.append(score_{index})\n"
        f"    return bucket_{index}\n"
    )


def build_synthetic_corpus(
    root: Path,
    prs_per_cohort: int = 20,
    with_comments: bool = False,
) -> tuple[list[PullRequestRecord], Path]:
    """A single fixture repo plus `2 * prs_per_cohort` PRs branching off it.

    Agent PRs add near-duplicates of base-snapshot functions; human PRs add
    freshly synthesized ones, so the agent cohort's redundancy dominates by
    construction.  Returns (records, manifest_path).
    """
    rng = random.Random(20240601)
    repo = GitRepoBuilder(root / "repo")
    base_files = {}
    for i, (name, body) in enumerate(_BASE_FUNCTION_TEMPLATES):
        base_files[f"pkg/mod_{i}.py"] = f'"""Utilities ({name})."""\n\n\n' + body.format()
    repo.write(base_files)
    base_sha = repo.commit("base snapshot")

    records = []
    for cohort in (Cohort.HUMAN, Cohort.AGENT):
        for k in range(prs_per_cohort):
            repo.checkout(base_sha)
            pr_id = f"{cohort.value.lower()}-{k:03d}"
            if cohort is Cohort.AGENT:
                _, template = _BASE_FUNCTION_TEMPLATES[k % len(_BASE_FUNCTION_TEMPLATES)]
                new_fn = _renamed_variant(template.format(), rng)
            else:
                new_fn = _fresh_function(k, rng)
            repo.write({f"pkg/added_{pr_id}.py": f'"""Change {pr_id}."""\n\n\n' + new_fn})
            head_sha = repo.commit(f"pr {pr_id}")
            comments = ()
            if with_comments:
                comments = (
                    comment(f"Review pass {k}: looks reasonable for {pr_id}."),
                    comment(f"Please double-check the loop bounds in {pr_id}."),
                )
            records.append(make_record(pr_id, repo, base_sha, head_sha, cohort, comments))
    repo.checkout(base_sha)
    manifest_path = write_manifest(root / "manifest.jsonl", records)
    return records, manifest_path
