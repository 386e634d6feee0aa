"""Tokenizer, Boolean formula nodes and a recursive-descent base shared by the
modal, first-order and probabilistic formula languages.

Binary connectives by increasing binding strength: ``->`` (right
associative), ``|``, ``&``; prefix operators (``~`` and each language's own)
bind tightest.  Printing a node with ``str`` gives text that parses back to
the same node.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParseError


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str, rules: Sequence[tuple[str, str]]) -> list[Token]:
    """Split ``text`` by the first matching ``(kind, regex)`` rule; whitespace is skipped."""
    pattern = re.compile("|".join(f"(?P<{k}>{r})" for k, r in rules))
    out: list[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = pattern.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        out.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(Token("eof", "", len(text)))
    return out


BOOL_TOKENS = [
    ("arrow", r"->"),
    ("op", r"[~&|().,=\[\]{}]"),
]


# -- Boolean nodes -------------------------------------------------------


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def children(self) -> tuple:
        return ()

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class Bot(Formula):
    def __str__(self) -> str:
        return "bot"


@dataclass(frozen=True)
class Top(Formula):
    def __str__(self) -> str:
        return "top"


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def children(self) -> tuple:
        return (self.body,)

    def __str__(self) -> str:
        return f"~{_wrap(self.body)}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self) -> tuple:
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self) -> tuple:
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"({self.left} | {self.right})"


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def children(self) -> tuple:
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"({self.left} -> {self.right})"


def _wrap(f: Formula) -> str:
    s = str(f)
    return s if s.startswith("(") or not any(c.isspace() for c in s) else f"({s})"


def conj(items: Iterable[Formula]) -> Formula:
    out: Formula | None = None
    for f in items:
        out = f if out is None else And(out, f)
    return Top() if out is None else out


def disj(items: Iterable[Formula]) -> Formula:
    out: Formula | None = None
    for f in items:
        out = f if out is None else Or(out, f)
    return Bot() if out is None else out


# -- parser base ---------------------------------------------------------


class BoolParser:
    """Recursive descent over the Boolean skeleton; subclasses supply :meth:`prefix`."""

    rules: Sequence[tuple[str, str]] = BOOL_TOKENS

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text, self.rules)
        self.i = 0

    # token helpers
    def peek(self) -> Token:
        return self.tokens[self.i]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            self.i += 1
            return self.tokens[self.i - 1]
        return None

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.accept(kind, text)
        if tok is None:
            self.fail((repr(text) if text else kind,))
        return tok

    def fail(self, expected: Iterable[str]):
        t = self.peek()
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"unexpected {found}", self.text, t.pos, expected)

    # grammar
    def parse(self) -> Formula:
        f = self.implication()
        if not self.at("eof"):
            self.fail(("end of input",))
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.accept("arrow"):
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.accept("op", "|"):
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.accept("op", "&"):
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.accept("op", "~"):
            return Not(self.unary())
        f = self.prefix()
        if f is not None:
            return f
        if self.accept("op", "("):
            f = self.implication()
            self.expect("op", ")")
            return f
        if self.accept("name", "bot"):
            return Bot()
        if self.accept("name", "top"):
            return Top()
        return self.atom()

    def prefix(self) -> Formula | None:
        """Language-specific prefix operators; return None when none applies."""
        return None

    def atom(self) -> Formula:
        self.fail(("formula",))
