"""Python source parsing: function extraction, canonical normalization,
and per-line category counts.

Functions are extracted with the stdlib ast so spans and nesting match the
interpreter's view of the file.  Line categories follow the radon raw-metric
partition: every physical line lands in exactly one of code / multi-line
string / blank / comment, so the four counts sum to the physical line total.
"""

from __future__ import annotations

import ast
import copy
import io
import textwrap
import tokenize
from dataclasses import dataclass

# Token types that carry no content of their own.
_FORMATTING_TOKENS = frozenset(
    {
        tokenize.NEWLINE,
        tokenize.NL,
        tokenize.INDENT,
        tokenize.DEDENT,
        tokenize.ENDMARKER,
        tokenize.COMMENT,
    }
)


@dataclass(frozen=True)
class FunctionUnit:
    """One named function or method extracted from a source file.

    `body_text` is the exact source slice (decorators included);
    `normalized_body` is the canonical form with local identifiers renamed
    to positional placeholders and comments/formatting discarded.
    """

    qualified_name: str
    file_path: str
    span: tuple[int, int]
    body_text: str
    normalized_body: str

    @property
    def start_line(self) -> int:
        return self.span[0]

    @property
    def end_line(self) -> int:
        return self.span[1]

    @property
    def name(self) -> str:
        """Unqualified function name."""
        return self.qualified_name.rsplit(".", 1)[-1]

    @property
    def scope(self) -> str:
        """Enclosing scope path within the module ('' at module level)."""
        head, _, _ = self.qualified_name.rpartition(".")
        return head

    @property
    def key(self) -> tuple[str, str]:
        """(file_path, qualified_name) identity used for snapshot diffing."""
        return (self.file_path, self.qualified_name)


@dataclass(frozen=True)
class LineCategoryCounts:
    """Physical-line partition of a source file (radon raw-metric style)."""

    loc: int
    multiline_string_lines: int
    blank_lines: int
    comment_lines: int

    def __add__(self, other: "LineCategoryCounts") -> "LineCategoryCounts":
        return LineCategoryCounts(
            self.loc + other.loc,
            self.multiline_string_lines + other.multiline_string_lines,
            self.blank_lines + other.blank_lines,
            self.comment_lines + other.comment_lines,
        )

    @property
    def total(self) -> int:
        return (
            self.loc
            + self.multiline_string_lines
            + self.blank_lines
            + self.comment_lines
        )


def extract_functions(
    source: str, file_path: str, include_nested: bool = True
) -> list[FunctionUnit]:
    """Extract every named function and method from `source`.

    Top-level functions, methods, and (unless `include_nested` is false)
    functions nested inside other functions each yield one unit, sorted by
    start line.  Lambdas and comprehensions are not units.  Raises
    SyntaxError on unparseable source; callers skip such files.
    """
    tree = ast.parse(source)
    lines = source.splitlines()
    units: list[FunctionUnit] = []
    _collect_units(tree, [], lines, file_path, units, include_nested)
    units.sort(key=lambda u: u.span[0])
    return units


def _collect_units(node, name_stack, lines, file_path, out, include_nested):
    for child in ast.iter_child_nodes(node):
        if isinstance(child, (ast.FunctionDef, ast.AsyncFunctionDef)):
            qualified = ".".join(name_stack + [child.name])
            out.append(_make_unit(child, qualified, lines, file_path))
            if include_nested:
                _collect_units(
                    child, name_stack + [child.name], lines, file_path, out, include_nested
                )
        elif isinstance(child, ast.ClassDef):
            _collect_units(
                child, name_stack + [child.name], lines, file_path, out, include_nested
            )
        else:
            _collect_units(child, name_stack, lines, file_path, out, include_nested)


def _make_unit(node, qualified, lines, file_path) -> FunctionUnit:
    start = node.lineno
    if node.decorator_list:
        start = min(start, min(d.lineno for d in node.decorator_list))
    end = node.end_lineno
    body_text = "\n".join(lines[start - 1 : end])
    return FunctionUnit(
        qualified_name=qualified,
        file_path=file_path,
        span=(start, end),
        body_text=body_text,
        normalized_body=normalize_function(node),
    )


def normalize_function(node) -> str:
    """Canonical text of a function def: local identifiers become positional
    placeholders (v0, v1, ... in first-occurrence order), comments and
    formatting are discarded via ast round-trip.

    The function's own name and names bound in nested scopes are
    canonicalized too, so a rename or move with an untouched body maps to
    the same string.  Attribute names, call keyword names, names declared
    `global`, and string/number literals are preserved.  Scoping is flat by
    design: one rename map covers the whole subtree.
    """
    clone = copy.deepcopy(node)
    local_names = _local_binding_names(clone)
    ordered = _first_occurrence_order(clone, local_names)
    mapping = {name: f"v{i}" for i, name in enumerate(ordered)}
    _Renamer(mapping).visit(clone)
    return ast.unparse(clone)


def _local_binding_names(func) -> set[str]:
    declared_global: set[str] = set()
    for n in ast.walk(func):
        if isinstance(n, ast.Global):
            declared_global.update(n.names)
    names: set[str] = set()
    for n in ast.walk(func):
        if isinstance(n, ast.arg):
            names.add(n.arg)
        elif isinstance(n, ast.Name) and isinstance(n.ctx, (ast.Store, ast.Del)):
            names.add(n.id)
        elif isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            names.add(n.name)
        elif isinstance(n, ast.ExceptHandler) and n.name:
            names.add(n.name)
    return names - declared_global


def _first_occurrence_order(func, local_names: set[str]) -> list[str]:
    occurrences: list[tuple[int, int, str]] = []
    for n in ast.walk(func):
        if isinstance(n, ast.Name) and n.id in local_names:
            occurrences.append((n.lineno, n.col_offset, n.id))
        elif isinstance(n, ast.arg) and n.arg in local_names:
            occurrences.append((n.lineno, n.col_offset, n.arg))
        elif (
            isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef))
            and n.name in local_names
        ):
            occurrences.append((n.lineno, n.col_offset, n.name))
        elif isinstance(n, ast.ExceptHandler) and n.name in local_names:
            occurrences.append((n.lineno, n.col_offset, n.name))
    occurrences.sort(key=lambda t: (t[0], t[1]))
    ordered: list[str] = []
    seen: set[str] = set()
    for _, _, name in occurrences:
        if name not in seen:
            seen.add(name)
            ordered.append(name)
    return ordered


class _Renamer(ast.NodeTransformer):
    def __init__(self, mapping: dict[str, str]):
        self.mapping = mapping

    def visit_Name(self, node):
        if node.id in self.mapping:
            node.id = self.mapping[node.id]
        return node

    def visit_arg(self, node):
        self.generic_visit(node)
        if node.arg in self.mapping:
            node.arg = self.mapping[node.arg]
        return node

    def _rename_def(self, node):
        self.generic_visit(node)
        if node.name in self.mapping:
            node.name = self.mapping[node.name]
        return node

    visit_FunctionDef = _rename_def
    visit_AsyncFunctionDef = _rename_def
    visit_ClassDef = _rename_def

    def visit_ExceptHandler(self, node):
        self.generic_visit(node)
        if node.name and node.name in self.mapping:
            node.name = self.mapping[node.name]
        return node

    def visit_Nonlocal(self, node):
        node.names = [self.mapping.get(n, n) for n in node.names]
        return node


def parse_single_function(body_text: str):
    """Parse a FunctionUnit.body_text slice back to its def node.

    Method slices are indented; dedent is tried before giving up.
    """
    last_error: SyntaxError | None = None
    for candidate in (body_text, textwrap.dedent(body_text)):
        try:
            tree = ast.parse(candidate)
        except SyntaxError as exc:
            last_error = exc
            continue
        if len(tree.body) == 1 and isinstance(
            tree.body[0], (ast.FunctionDef, ast.AsyncFunctionDef)
        ):
            return tree.body[0]
        last_error = SyntaxError("text is not a single function definition")
    raise last_error


def count_line_categories(source: str) -> LineCategoryCounts:
    """Partition physical lines into code / multi-line string / blank / comment.

    Rules (matching the radon raw-metric conventions):
      - a line covered by a string literal spanning several physical lines
        counts as a multi-line-string line, even where it also carries code
        (ties break toward the string category);
      - any other line with a real token is code, inline comments included;
      - lines holding only a comment are comment lines;
      - whitespace-only lines are blank.

    Tokenization failures degrade gracefully: lines seen before the failure
    keep their classification, the rest count as code (or blank if empty).
    """
    lines = source.splitlines()
    total = len(lines)
    if total == 0:
        return LineCategoryCounts(0, 0, 0, 0)

    code_rows: set[int] = set()
    multi_rows: set[int] = set()
    comment_rows: set[int] = set()
    try:
        for tok in tokenize.generate_tokens(io.StringIO(source).readline):
            kind = tok.type
            start_row = tok.start[0]
            end_row = tok.end[0]
            if kind == tokenize.COMMENT:
                comment_rows.add(start_row)
            elif kind == tokenize.STRING and end_row > start_row:
                multi_rows.update(range(start_row, end_row + 1))
            elif kind not in _FORMATTING_TOKENS:
                code_rows.add(start_row)
    except (tokenize.TokenError, IndentationError, SyntaxError):
        pass

    loc = multi = blank = comment = 0
    for row in range(1, total + 1):
        if row in multi_rows:
            multi += 1
        elif row in code_rows:
            loc += 1
        elif row in comment_rows:
            comment += 1
        elif lines[row - 1].strip():
            loc += 1
        else:
            blank += 1
    return LineCategoryCounts(loc, multi, blank, comment)
