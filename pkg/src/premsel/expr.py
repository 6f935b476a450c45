"""Syntax trees of named constants and their s-expression serialization.

An expression is a rooted tree: every node has a constant name (the head)
and an ordered, possibly empty, list of child expressions.  Statements pair
a conclusion tree with a list of hypothesis trees.  All values here are
immutable after construction and safe to share between threads.

The textual form is a plain s-expression: a bare name is a leaf, and
``(head child ...)`` is an applied constant.  Statement files carry one
statement per line::

    THM <name> CONCL <sexp> HYP <sexp> HYP <sexp> ...

Lines starting with ``#`` are comments.  Head names must not contain
whitespace, parentheses, ``/`` (reserved as the n-gram separator) or ``:``
(reserved for the hypothesis/conclusion tags); corpus producers can use
:func:`escape_head` to sanitize offending constants.
"""

from __future__ import annotations

from dataclasses import dataclass


_FORBIDDEN_HEAD_CHARS = set("()/:")

SLASH_ESCAPE = "_SLASH_"


class ExprError(ValueError):
    """Malformed expression text.  ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


def _check_head(head: str, position: int = 0) -> None:
    if not head:
        raise ExprError("empty constant name", position)
    for ch in head:
        if ch.isspace() or ch in _FORBIDDEN_HEAD_CHARS:
            raise ExprError(f"constant name {head!r} contains forbidden character {ch!r}", position)


def escape_head(name: str) -> str:
    """Replace characters a head may not contain; '/' becomes ``_SLASH_``."""
    name = name.replace("/", SLASH_ESCAPE)
    return "".join("_" if (c.isspace() or c in _FORBIDDEN_HEAD_CHARS) else c for c in name)


@dataclass(frozen=True)
class Expr:
    """A constant applied to zero or more argument expressions."""

    head: str
    args: tuple[Expr, ...] = ()

    def __post_init__(self):
        _check_head(self.head)
        object.__setattr__(self, "args", tuple(self.args))

    def walk(self):
        """Yield every node of the tree, root first (preorder)."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.args))

    def __str__(self) -> str:
        return format_expr(self)


@dataclass(frozen=True)
class Statement:
    """A conclusion together with its (possibly empty) hypotheses."""

    conclusion: Expr
    hypotheses: tuple[Expr, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))


def format_expr(e: Expr) -> str:
    """Render ``e`` as a canonical s-expression (single spaces, no frills)."""
    out: list[str] = []
    # Explicit stack; real statement trees can be deep.
    stack: list[object] = [e]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
        elif item.args:
            out.append("(" + item.head)
            stack.append(")")
            for child in reversed(item.args):
                stack.append(child)
                stack.append(" ")
        else:
            out.append(item.head)
    return "".join(out)


def _skip_ws(text: str, pos: int) -> int:
    n = len(text)
    while pos < n and text[pos].isspace():
        pos += 1
    return pos


def _read_name(text: str, pos: int) -> tuple[str, int]:
    n = len(text)
    end = pos
    while end < n and not text[end].isspace() and text[end] not in "()":
        end += 1
    name = text[pos:end]
    _check_head(name, pos)
    return name, end


def parse_expr_prefix(text: str, pos: int = 0) -> tuple[Expr, int]:
    """Parse one expression starting at ``pos``; return it and the end offset.

    Raises :class:`ExprError` pointing at the first offending character; an
    unclosed group is reported at the offset of its opening parenthesis.
    """
    pos = _skip_ws(text, pos)
    if pos >= len(text):
        raise ExprError("expected an expression", pos)

    # (start offset of group, head, children) per open parenthesis
    stack: list[tuple[int, str, list[Expr]]] = []
    while True:
        pos = _skip_ws(text, pos)
        if pos >= len(text):
            if stack:
                raise ExprError("unclosed '('", stack[-1][0])
            raise ExprError("expected an expression", pos)
        ch = text[pos]
        if ch == "(":
            open_at = pos
            pos = _skip_ws(text, pos + 1)
            if pos >= len(text):
                raise ExprError("unclosed '('", open_at)
            if text[pos] == ")":
                raise ExprError("empty group", open_at)
            if text[pos] == "(":
                raise ExprError("expected a constant name after '('", pos)
            head, pos = _read_name(text, pos)
            stack.append((open_at, head, []))
            continue
        if ch == ")":
            if not stack:
                raise ExprError("unmatched ')'", pos)
            _, head, children = stack.pop()
            node = Expr(head, tuple(children))
            pos += 1
        else:
            head, pos = _read_name(text, pos)
            node = Expr(head)
        if not stack:
            return node, pos
        stack[-1][2].append(node)


def parse_expr(text: str) -> Expr:
    """Parse a complete s-expression; trailing garbage is an error."""
    expr, end = parse_expr_prefix(text, 0)
    end = _skip_ws(text, end)
    if end != len(text):
        raise ExprError("unexpected trailing text", end)
    return expr


def _expect_keyword(text: str, pos: int, keyword: str) -> int:
    pos = _skip_ws(text, pos)
    end = pos
    while end < len(text) and not text[end].isspace() and text[end] not in "()":
        end += 1
    if text[pos:end] != keyword:
        raise ExprError(f"expected {keyword!r}", pos)
    return end


def parse_statement_line(line: str) -> tuple[str, Statement]:
    """Parse one ``THM <name> CONCL <sexp> HYP <sexp> ...`` line."""
    pos = _expect_keyword(line, 0, "THM")
    pos = _skip_ws(line, pos)
    end = pos
    while end < len(line) and not line[end].isspace() and line[end] not in "()":
        end += 1
    name = line[pos:end]
    if not name:
        raise ExprError("expected a theorem name", pos)
    pos = _expect_keyword(line, end, "CONCL")
    conclusion, pos = parse_expr_prefix(line, pos)
    hypotheses: list[Expr] = []
    pos = _skip_ws(line, pos)
    while pos < len(line):
        pos = _expect_keyword(line, pos, "HYP")
        hyp, pos = parse_expr_prefix(line, pos)
        hypotheses.append(hyp)
        pos = _skip_ws(line, pos)
    return name, Statement(conclusion, tuple(hypotheses))


def format_statement_line(name: str, s: Statement) -> str:
    parts = ["THM", name, "CONCL", format_expr(s.conclusion)]
    for hyp in s.hypotheses:
        parts.append("HYP")
        parts.append(format_expr(hyp))
    return " ".join(parts)
