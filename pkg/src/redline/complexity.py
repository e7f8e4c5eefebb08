"""McCabe cyclomatic complexity and per-file-pair deltas.

Counting follows the radon conventions: complexity starts at 1 and each
decision point adds one — every `if`/`elif` (and ternary expression), each
boolean operator, `for`/`while` (plus their `else` clauses), each `except`
handler (plus a `try` `else` clause), each `assert`, and each comprehension
clause (plus its `if` filters).  Nested named functions are separate units
and do not contribute to their enclosing function's count; lambdas and
comprehensions do.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from enum import Enum

from .ingestion import FilePairDiff
from .parsing import FunctionUnit, parse_single_function

HIGH_RISK_THRESHOLD = 10


class Risk(str, Enum):
    NO_RISK = "no_risk"
    LOW_RISK_ADDITION = "low_risk_addition"
    LOW_RISK_REMOVAL = "low_risk_removal"
    HIGH_RISK_ADDITION = "high_risk_addition"
    HIGH_RISK_REMOVAL = "high_risk_removal"


@dataclass(frozen=True)
class ComplexityDelta:
    """File-pair complexity change; an absent side contributes 0."""

    pre_cc: int
    post_cc: int
    delta: int
    risk: Risk


def cyclomatic_complexity(fn: FunctionUnit) -> int:
    """Cyclomatic complexity of one extracted function (always >= 1)."""
    node = parse_single_function(fn.body_text)
    return _complexity_of(node)


def file_complexity(source: str) -> int:
    """Sum of the cyclomatic complexities of all functions in a file.

    Module-level statements outside any function contribute nothing.
    Raises SyntaxError on unparseable source.
    """
    tree = ast.parse(source)
    total = 0
    for node in ast.walk(tree):
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            total += _complexity_of(node)
    return total


def _complexity_of(func_node) -> int:
    complexity = 1
    stack = [child for child in ast.iter_child_nodes(func_node)]
    while stack:
        node = stack.pop()
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            continue  # separate unit
        if isinstance(node, (ast.If, ast.IfExp)):
            complexity += 1
        elif isinstance(node, ast.BoolOp):
            complexity += len(node.values) - 1
        elif isinstance(node, (ast.For, ast.AsyncFor, ast.While)):
            complexity += 1 + bool(node.orelse)
        elif isinstance(node, ast.Try):
            complexity += len(node.handlers) + bool(node.orelse)
        elif isinstance(node, ast.comprehension):
            complexity += 1 + len(node.ifs)
        elif isinstance(node, ast.Assert):
            complexity += 1
        stack.extend(ast.iter_child_nodes(node))
    return complexity


def risk_bucket(delta: int) -> Risk:
    if delta == 0:
        return Risk.NO_RISK
    if abs(delta) >= HIGH_RISK_THRESHOLD:
        return Risk.HIGH_RISK_ADDITION if delta > 0 else Risk.HIGH_RISK_REMOVAL
    return Risk.LOW_RISK_ADDITION if delta > 0 else Risk.LOW_RISK_REMOVAL


def complexity_delta(pair: FilePairDiff) -> ComplexityDelta:
    """Complexity change of one file pair.

    Raises SyntaxError when either side fails to parse; callers exclude
    the pair with a warning.
    """
    pre_cc = file_complexity(pair.pre_text) if pair.pre_text is not None else 0
    post_cc = file_complexity(pair.post_text) if pair.post_text is not None else 0
    delta = post_cc - pre_cc
    return ComplexityDelta(pre_cc=pre_cc, post_cc=post_cc, delta=delta, risk=risk_bucket(delta))
