"""The step-wise free modal algebra over finitely many variables, built dually.

Level ``n`` of the tower is the powerset algebra of a finite set ``X_n``:

* ``X_0`` is the set of valuations (frozensets of true variables);
* ``X_{n+1}`` is the set of pairs ``(x, C)`` with ``x`` in ``X_0`` and ``C``
  any subset of ``X_n``.

The projection ``X_{n+1} -> X_n`` keeps ``x`` and pushes ``C`` down one
level; its preimage map is the embedding ``B_n -> B_{n+1}``.  A point
``(x, C)`` satisfies ``dia phi`` iff some member of ``C`` satisfies ``phi``.

Sizes grow as a tower of exponentials, so every build is capped.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import CapExceeded, DepthExceeded, InvalidStructure
from .order import FinBoolAlg
from .presented import BOT, Presentation, gen, join
from .setalgebra import SetAlgebra
from .syntax import And, Bot, BoolParser, Formula, Implies, Not, Or, Top

DEFAULT_TOWER_CAP = int(os.environ.get("STEPDUAL_TOWER_CAP", 4096))


@dataclass(frozen=True)
class Var(Formula):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Dia(Formula):
    body: Formula

    def children(self) -> tuple:
        return (self.body,)

    def __str__(self) -> str:
        s = str(self.body)
        return f"dia {s}" if s.startswith("(") or " " not in s else f"dia ({s})"


def box(phi: Formula) -> Formula:
    """``box phi`` as ``~dia ~phi``."""
    return Not(Dia(Not(phi)))


class ModalParser(BoolParser):
    rules = [("name", r"[a-z][a-z0-9]*"), ("arrow", r"->"), ("op", r"[~&|()]")]

    def prefix(self):
        if self.accept("name", "dia"):
            return Dia(self.unary())
        return None

    def atom(self):
        tok = self.peek()
        if tok.kind == "name" and tok.text not in ("dia", "bot", "top"):
            self.i += 1
            return Var(tok.text)
        self.fail(("variable", "'~'", "'dia'", "'('", "'bot'", "'top'"))


def parse_modal(text: str) -> Formula:
    """Parse ``dia``, ``~``, ``&``, ``|``, ``->``, ``bot``, ``top`` and lower-case variables."""
    return ModalParser(text).parse()


def rank(phi: Formula) -> int:
    """Maximal nesting depth of ``dia``."""
    inner = max((rank(c) for c in phi.children()), default=0)
    return inner + 1 if isinstance(phi, Dia) else inner


def variables_of(phi: Formula) -> set[str]:
    if isinstance(phi, Var):
        return {phi.name}
    return set().union(*(variables_of(c) for c in phi.children()))


def _tower_sizes(n_vars: int, depth: int, cap: int) -> list[int]:
    sizes = [1 << n_vars]
    if sizes[0] > cap:
        raise CapExceeded("tower points", sizes[0], cap, level=0)
    for level in range(1, depth + 1):
        prev = sizes[-1]
        if prev > cap.bit_length() + 1:
            raise CapExceeded("tower points", sizes[0] << prev, cap, level=level)
        size = sizes[0] << prev
        if size > cap:
            raise CapExceeded("tower points", size, cap, level=level)
        sizes.append(size)
    return sizes


def _subsets(items: Sequence) -> list[frozenset]:
    return [frozenset(c) for r in range(len(items) + 1) for c in itertools.combinations(items, r)]


@dataclass(frozen=True, eq=False)
class ModalTower:
    """Levels ``X_0 .. X_depth`` with their projections and powerset algebras."""

    variables: tuple
    points: tuple  # points[n] is the tuple of points of X_n
    projections: tuple  # projections[n] maps X_{n+1} -> X_n

    @property
    def depth(self) -> int:
        return len(self.points) - 1

    @property
    def sizes(self) -> list[int]:
        return [len(p) for p in self.points]

    @cached_property
    def levels(self) -> tuple:
        """``B_n`` as the powerset algebra of ``X_n``."""
        return tuple(SetAlgebra.powerset(p) for p in self.points)

    @property
    def dual_levels(self) -> tuple:
        return self.points

    @cached_property
    def base(self) -> FinBoolAlg:
        """``B_0``, the free Boolean algebra on the variables."""
        return self.levels[0].to_fin_bool_alg(cap=1 << 16)

    def valuation(self, point) -> frozenset:
        """The ``X_0`` component of a point at any level."""
        return point if isinstance(point, frozenset) else point[0]

    def embed(self, subset: Iterable, source: int, target: int) -> frozenset:
        """Image of an element of ``B_source`` in ``B_target`` along the embeddings."""
        if not 0 <= source <= target <= self.depth:
            raise DepthExceeded(f"cannot embed level {source} into level {target} (depth {self.depth})")
        current = frozenset(subset)
        for n in range(source, target):
            proj = self.projections[n]
            current = frozenset(p for p in self.points[n + 1] if proj[p] in current)
        return current

    def embedding(self, n: int) -> dict:
        """``i_n`` on singletons of ``X_n`` (which determines it)."""
        return {x: self.embed({x}, n, n + 1) for x in self.points[n]}

    def level_of(self, phi: Formula) -> int:
        r = rank(phi)
        if r > self.depth:
            raise DepthExceeded(f"formula of rank {r} exceeds tower depth {self.depth}")
        return r


def build_tower(variables: Iterable[str], depth: int, cap: int = DEFAULT_TOWER_CAP) -> ModalTower:
    """Dual levels ``X_0 .. X_depth``; raises :class:`CapExceeded` at the first level over ``cap``."""
    variables = tuple(variables)
    if depth < 0:
        raise InvalidStructure("depth must be non-negative")
    if len(set(variables)) != len(variables):
        raise InvalidStructure("variable names must be distinct")
    _tower_sizes(len(variables), depth, cap)
    base = tuple(frozenset(c) for c in _subsets(variables))
    levels = [base]
    projections = []
    for n in range(depth):
        prev = levels[-1]
        new = tuple((x, C) for x in base for C in _subsets(prev))
        if n == 0:
            proj = {p: p[0] for p in new}
        else:
            below = projections[-1]
            proj = {(x, C): (x, frozenset(below[y] for y in C)) for x, C in new}
        levels.append(new)
        projections.append(proj)
    return ModalTower(variables, tuple(levels), tuple(projections))


def interpret_at(phi: Formula, T: ModalTower, level: int) -> frozenset:
    """Points of ``X_level`` satisfying ``phi`` (requires ``rank(phi) <= level``)."""
    if rank(phi) > level or level > T.depth:
        raise DepthExceeded(f"cannot interpret rank {rank(phi)} formula at level {level} (depth {T.depth})")
    pts = T.points[level]
    if isinstance(phi, Top):
        return frozenset(pts)
    if isinstance(phi, Bot):
        return frozenset()
    if isinstance(phi, Var):
        return frozenset(p for p in pts if phi.name in T.valuation(p))
    if isinstance(phi, Not):
        return frozenset(pts) - interpret_at(phi.body, T, level)
    if isinstance(phi, And):
        return interpret_at(phi.left, T, level) & interpret_at(phi.right, T, level)
    if isinstance(phi, Or):
        return interpret_at(phi.left, T, level) | interpret_at(phi.right, T, level)
    if isinstance(phi, Implies):
        return (frozenset(pts) - interpret_at(phi.left, T, level)) | interpret_at(phi.right, T, level)
    if isinstance(phi, Dia):
        inner = interpret_at(phi.body, T, level - 1)
        return frozenset(p for p in pts if p[1] & inner)
    raise InvalidStructure(f"not a modal formula: {phi!r}")


def interpret(phi: Formula, T: ModalTower) -> frozenset:
    """``phi`` as an element of ``B_rank(phi)``."""
    return interpret_at(phi, T, T.level_of(phi))


def equivalent_at_rank(phi: Formula, psi: Formula, T: ModalTower) -> bool:
    level = max(T.level_of(phi), T.level_of(psi))
    a = T.embed(interpret(phi, T), rank(phi), level)
    b = T.embed(interpret(psi, T), rank(psi), level)
    return a == b


def separating_point(phi: Formula, psi: Formula, T: ModalTower):
    """A point at the common level satisfying exactly one of the two, or None."""
    level = max(T.level_of(phi), T.level_of(psi))
    diff = interpret_at(phi, T, level) ^ interpret_at(psi, T, level)
    return min(diff, key=repr) if diff else None


# -- algebraic description of one level ----------------------------------


def level_presentation(variables: Sequence[str], lower_points: Sequence) -> Presentation:
    """``B ⊕ MA(B_n)`` presented on the variables and ``("dia", a)`` for ``a`` in ``P(X_n)``."""
    els = _subsets(tuple(lower_points))
    gens = tuple(variables) + tuple(("dia", a) for a in els)
    rels = [(gen(("dia", frozenset())), BOT)]
    for a, b in itertools.combinations_with_replacement(els, 2):
        rels.append((gen(("dia", a | b)), join(gen(("dia", a)), gen(("dia", b)))))
    return Presentation(gens, rels, "BA")


def read_level_point(S: frozenset, variables: Sequence[str], lower_points: Sequence) -> tuple:
    """The pair ``(x, C)`` encoded by an admissible point of :func:`level_presentation`."""
    x = frozenset(v for v in variables if v in S)
    C = frozenset(y for y in lower_points if ("dia", frozenset({y})) in S)
    return x, C
