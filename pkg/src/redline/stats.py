"""Two-sided Mann-Whitney U comparison of two cohorts' samples.

U is computed by rank sum with midrank tie handling.  Small inputs
(combined n <= 20) get an exact p by enumerating every rank assignment;
larger inputs use the normal approximation with tie and continuity
corrections.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum

EXACT_ENUMERATION_LIMIT = 20


class EmptySample(Exception):
    pass


class MissingResult(Exception):
    pass


class Significance(str, Enum):
    NS = "ns"
    P_LT_0_05 = "p_lt_0_05"
    P_LT_0_001 = "p_lt_0_001"


@dataclass(frozen=True)
class MannWhitneyResult:
    u_statistic: float
    p_value: float
    n1: int
    n2: int
    alternative: str = "two_sided"

    @property
    def significance(self) -> Significance:
        if self.p_value < 0.001:
            return Significance.P_LT_0_001
        if self.p_value < 0.05:
            return Significance.P_LT_0_05
        return Significance.NS


def midranks(values: list[float]) -> list[float]:
    """Fractional ranks (1-based); tied values share the mean of their ranks."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def mann_whitney_u(sample_a: list[float], sample_b: list[float]) -> MannWhitneyResult:
    """Two-sided Mann-Whitney U test; u_statistic is sample_a's U."""
    n1, n2 = len(sample_a), len(sample_b)
    if n1 == 0 or n2 == 0:
        raise EmptySample("both samples must be non-empty")
    pooled = list(sample_a) + list(sample_b)
    ranks = midranks(pooled)
    r1 = sum(ranks[:n1])
    u1 = r1 - n1 * (n1 + 1) / 2
    if n1 + n2 <= EXACT_ENUMERATION_LIMIT:
        p = _exact_p(ranks, n1, u1)
    else:
        p = _normal_approx_p(pooled, ranks, n1, n2, u1)
    return MannWhitneyResult(u_statistic=u1, p_value=p, n1=n1, n2=n2)


def _exact_p(ranks: list[float], n1: int, u_observed: float) -> float:
    """Exact two-sided p over all assignments of n1 pooled ranks to sample A.

    The rank-sum distribution is built by convolution over items.  Ranks are
    doubled so every quantity stays an integer and comparisons are exact.
    """
    n = len(ranks)
    doubled = [int(round(2 * r)) for r in ranks]
    # ways[k][s] = number of k-subsets of the doubled ranks summing to s
    ways: list[defaultdict[int, int]] = [defaultdict(int) for _ in range(n1 + 1)]
    ways[0][0] = 1
    for d in doubled:
        for k in range(n1 - 1, -1, -1):
            if not ways[k]:
                continue
            target = ways[k + 1]
            for s, count in ways[k].items():
                target[s + d] += count
    mu2 = n1 * (n - n1)  # doubled mean of U
    offset2 = n1 * (n1 + 1)  # doubled rank-sum-to-U offset
    observed_distance = abs(int(round(2 * u_observed)) - mu2)
    at_least_as_extreme = 0
    total = 0
    for s, count in ways[n1].items():
        total += count
        if abs((s - offset2) - mu2) >= observed_distance:
            at_least_as_extreme += count
    return at_least_as_extreme / total


def _normal_approx_p(pooled, ranks, n1, n2, u1) -> float:
    n = n1 + n2
    tie_term = 0
    counts: dict[float, int] = {}
    for value in pooled:
        counts[value] = counts.get(value, 0) + 1
    for t in counts.values():
        tie_term += t**3 - t
    variance = n1 * n2 / 12 * ((n + 1) - tie_term / (n * (n - 1)))
    if variance <= 0:
        return 1.0  # every pooled value tied
    mu = n1 * n2 / 2
    shift = u1 - mu
    if shift > 0:
        shift -= 0.5
    elif shift < 0:
        shift += 0.5
    z = shift / math.sqrt(variance)
    p = math.erfc(abs(z) / math.sqrt(2))
    return min(1.0, p)


def significance_stars(p_value: float | None) -> str:
    """Table footnote convention: * for p<0.05, *** for p<0.001."""
    if p_value is None:
        return ""
    if p_value < 0.001:
        return "***"
    if p_value < 0.05:
        return "*"
    return ""


def annotate_table(
    metric_rows: list[dict], results: dict[str, MannWhitneyResult]
) -> list[dict]:
    """Append p_value and stars to each metric row.

    Every row must have a result under its 'metric' key; raises
    MissingResult otherwise.  Rows whose result is None (test skipped, e.g.
    sample too small) get blank annotations.
    """
    annotated = []
    for row in metric_rows:
        metric = row["metric"]
        if metric not in results:
            raise MissingResult(metric)
        result = results[metric]
        new_row = dict(row)
        if result is None:
            new_row["p_value"] = None
            new_row["stars"] = ""
        else:
            new_row["p_value"] = result.p_value
            new_row["stars"] = significance_stars(result.p_value)
        annotated.append(new_row)
    return annotated
