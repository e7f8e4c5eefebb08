"""Reviewer emotion aggregation.

Review comments are filtered (bots, over-limit, empty), scored by a 7-way
emotion classifier reached over HTTP (or any handle with the same shape),
and averaged per PR.  The classifier itself lives out of process; this
module only enforces its contract.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import requests

from .ingestion import Cohort, PullRequestRecord, ReviewComment

EMOTIONS = ("anger", "disgust", "fear", "joy", "sadness", "surprise", "neutral")
TOKEN_LIMIT = 512
_SUM_REJECT_TOLERANCE = 1e-2


class ClassifierUnavailable(Exception):
    pass


class MalformedScores(Exception):
    pass


class EmptyCohort(Exception):
    pass


class ExclusionReason(str, Enum):
    BOT = "bot"
    OVER_TOKEN_LIMIT = "over_token_limit"
    EMPTY = "empty"


@dataclass(frozen=True)
class EmotionProfile:
    """Point on the 7-emotion simplex (softmax output contract)."""

    anger: float
    disgust: float
    fear: float
    joy: float
    sadness: float
    surprise: float
    neutral: float

    def as_tuple(self) -> tuple[float, ...]:
        return (
            self.anger,
            self.disgust,
            self.fear,
            self.joy,
            self.sadness,
            self.surprise,
            self.neutral,
        )

    def score(self, emotion: str) -> float:
        return getattr(self, emotion)


@dataclass(frozen=True)
class PrSentiment:
    pr_id: str
    mean_profile: EmotionProfile
    n_comments_included: int
    n_comments_excluded: dict[ExclusionReason, int]


def is_bot(comment: ReviewComment) -> bool:
    return comment.author_is_bot or comment.author_login.lower().endswith("[bot]")


def filter_comments(
    comments, token_counter
) -> tuple[list[ReviewComment], list[tuple[ReviewComment, ExclusionReason]]]:
    """Split comments into (included, excluded-with-reason).

    Exclusions: bot authors, empty/whitespace bodies, and bodies longer
    than the classifier's 512-token limit under `token_counter` (an object
    whose count(texts) returns one token count per text).
    """
    included: list[ReviewComment] = []
    excluded: list[tuple[ReviewComment, ExclusionReason]] = []
    need_count: list[ReviewComment] = []
    for comment in comments:
        if is_bot(comment):
            excluded.append((comment, ExclusionReason.BOT))
        elif not comment.body.strip():
            excluded.append((comment, ExclusionReason.EMPTY))
        else:
            need_count.append(comment)
    if need_count:
        counts = token_counter.count([c.body for c in need_count])
        for comment, count in zip(need_count, counts):
            if count > TOKEN_LIMIT:
                excluded.append((comment, ExclusionReason.OVER_TOKEN_LIMIT))
            else:
                included.append(comment)
    return included, excluded


def _validate_profile(raw: dict) -> EmotionProfile:
    try:
        scores = {name: float(raw[name]) for name in EMOTIONS}
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedScores(f"profile missing or non-numeric field: {exc}") from exc
    for name, value in scores.items():
        if not 0.0 <= value <= 1.0:
            raise MalformedScores(f"{name} score {value} outside [0, 1]")
    total = sum(scores.values())
    if abs(total - 1.0) > _SUM_REJECT_TOLERANCE:
        raise MalformedScores(f"scores sum to {total}, not 1")
    return EmotionProfile(**scores)


def classify(texts: list[str], classifier) -> list[EmotionProfile]:
    """Score texts through a classifier handle; order-preserving.

    The handle's classify(texts) must return one mapping of the seven
    emotion names per text; anything off the simplex is rejected.
    """
    if not texts:
        return []
    raw_profiles = classifier.classify(texts)
    if len(raw_profiles) != len(texts):
        raise MalformedScores(
            f"classifier returned {len(raw_profiles)} profiles for {len(texts)} texts"
        )
    return [_validate_profile(raw) for raw in raw_profiles]


def mean_profile(profiles: list[EmotionProfile]) -> EmotionProfile:
    n = len(profiles)
    sums = [0.0] * len(EMOTIONS)
    for profile in profiles:
        for i, value in enumerate(profile.as_tuple()):
            sums[i] += value
    return EmotionProfile(**{name: sums[i] / n for i, name in enumerate(EMOTIONS)})


def per_pr_sentiment(
    pr: PullRequestRecord, classifier, token_counter
) -> PrSentiment | None:
    """Componentwise mean profile over the PR's included comments.

    None when no comment survives filtering (callers count such PRs in
    run stats rather than scoring them).
    """
    included, excluded = filter_comments(pr.comments, token_counter)
    reasons = {reason: 0 for reason in ExclusionReason}
    for _, reason in excluded:
        reasons[reason] += 1
    if not included:
        return None
    profiles = classify([c.body for c in included], classifier)
    return PrSentiment(
        pr_id=pr.pr_id,
        mean_profile=mean_profile(profiles),
        n_comments_included=len(included),
        n_comments_excluded=reasons,
    )


def top_pr_per_emotion(
    sentiments: list[PrSentiment], cohorts: dict[str, Cohort]
) -> dict[tuple[Cohort, str], str]:
    """For each (cohort, emotion): the pr_id with the highest mean score.

    Ties break toward the lexicographically smallest pr_id.  Raises
    EmptyCohort when either cohort has no scored PRs.
    """
    by_cohort: dict[Cohort, list[PrSentiment]] = {Cohort.HUMAN: [], Cohort.AGENT: []}
    for sentiment in sentiments:
        by_cohort[cohorts[sentiment.pr_id]].append(sentiment)
    for cohort, members in by_cohort.items():
        if not members:
            raise EmptyCohort(cohort.value)
    winners: dict[tuple[Cohort, str], str] = {}
    for cohort, members in by_cohort.items():
        ordered = sorted(members, key=lambda s: s.pr_id)
        for emotion in EMOTIONS:
            # max() keeps the first maximal element, i.e. the smallest pr_id
            best = max(ordered, key=lambda s: s.mean_profile.score(emotion))
            winners[(cohort, emotion)] = best.pr_id
    return winners


class HttpEmotionClassifier:
    """Client for the /classify + /count_tokens HTTP contract."""

    def __init__(self, base_url: str, timeout_s: float = 60.0, session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout_s = timeout_s
        self._session = session or requests.Session()

    def _post(self, endpoint: str, texts: list[str]) -> dict:
        try:
            resp = self._session.post(
                f"{self.base_url}{endpoint}", json={"texts": texts}, timeout=self.timeout_s
            )
        except requests.RequestException as exc:
            raise ClassifierUnavailable(str(exc)) from exc
        if resp.status_code != 200:
            raise ClassifierUnavailable(f"{endpoint} returned {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()
        except ValueError as exc:
            raise ClassifierUnavailable(f"non-JSON response from {endpoint}") from exc

    def classify(self, texts: list[str]) -> list[dict]:
        return self._post("/classify", texts)["profiles"]

    def count(self, texts: list[str]) -> list[int]:
        return [int(c) for c in self._post("/count_tokens", texts)["counts"]]


class WhitespaceTokenCounter:
    """Fallback token counter (whitespace split); approximate by nature."""

    approximate = True

    def count(self, texts: list[str]) -> list[int]:
        return [len(text.split()) for text in texts]
