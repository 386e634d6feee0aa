"""Finitely presented distributive lattices and Boolean algebras.

A presentation is a set of generators plus equations between lattice terms.
Its dual is the set of *admissible points*: subsets ``S`` of the generators
such that every equation holds under the valuation ``g -> (g in S)``.  An
element of the presented lattice is identified with its *extent*, the set of
admissible points where it holds, so two terms are equal exactly when their
extents agree.  This decides the word problem for these presentations.

Terms are nested tuples::

    ("gen", name) | ("top",) | ("bot",) | ("and", t, ...) | ("or", t, ...) | ("not", t)

``not`` is only allowed in Boolean presentations.
"""

from __future__ import annotations

import json
import os
import warnings
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Hashable, Iterable, Sequence

from .errors import CapExceeded, InconsistentPresentation, InvalidStructure, MixedLattice
from .order import FinBoolAlg, FinDistLattice, FinPoset, _bits

DEFAULT_POINT_CAP = int(os.environ.get("STEPDUAL_POINT_CAP", 1 << 20))
DEFAULT_ELEMENT_CAP = 2048

TOP = ("top",)
BOT = ("bot",)


def gen(name: Hashable) -> tuple:
    return ("gen", name)


def meet(*terms) -> tuple:
    if not terms:
        return TOP
    return terms[0] if len(terms) == 1 else ("and", *terms)


def join(*terms) -> tuple:
    if not terms:
        return BOT
    return terms[0] if len(terms) == 1 else ("or", *terms)


def neg(term) -> tuple:
    return ("not", term)


def term_generators(term) -> set:
    op = term[0]
    if op == "gen":
        return {term[1]}
    if op in ("top", "bot"):
        return set()
    return set().union(*(term_generators(t) for t in term[1:]))


def evaluate_term(term, point: frozenset | set) -> bool:
    """Truth value of ``term`` under the valuation ``g -> g in point``."""
    op = term[0]
    if op == "gen":
        return term[1] in point
    if op == "top":
        return True
    if op == "bot":
        return False
    if op == "and":
        return all(evaluate_term(t, point) for t in term[1:])
    if op == "or":
        return any(evaluate_term(t, point) for t in term[1:])
    if op == "not":
        return not evaluate_term(term[1], point)
    raise InvalidStructure(f"unknown term constructor {op!r}")


def term_from_json(data):
    if not isinstance(data, list) or not data:
        raise InvalidStructure(f"malformed term {data!r}")
    op = data[0]
    if op == "gen":
        return ("gen", _hashable(data[1]))
    if op in ("top", "bot"):
        return (op,)
    if op in ("and", "or", "not"):
        return (op, *(term_from_json(t) for t in data[1:]))
    raise InvalidStructure(f"unknown term constructor {op!r}")


def term_to_json(term):
    op = term[0]
    if op == "gen":
        name = term[1]
        return ["gen", list(name) if isinstance(name, tuple) else name]
    if op in ("top", "bot"):
        return [op]
    return [op, *(term_to_json(t) for t in term[1:])]


def _hashable(x):
    return tuple(_hashable(y) for y in x) if isinstance(x, list) else x


@dataclass(frozen=True)
class Presentation:
    generators: tuple
    relations: tuple = ()
    kind: str = "DL"

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relations", tuple((l, r) for l, r in self.relations))
        if self.kind not in ("DL", "BA"):
            raise InvalidStructure(f"kind must be 'DL' or 'BA', not {self.kind!r}")
        if len(set(self.generators)) != len(self.generators):
            raise InvalidStructure("generator names must be distinct")
        declared = set(self.generators)
        for left, right in self.relations:
            for t in (left, right):
                unknown = term_generators(t) - declared
                if unknown:
                    raise InvalidStructure(f"term mentions undeclared generators {sorted(map(repr, unknown))}")
                if self.kind == "DL" and _uses_not(t):
                    raise InvalidStructure("complement is not available in a DL presentation")

    def extended(self, relations: Iterable[tuple]) -> "Presentation":
        return Presentation(self.generators, self.relations + tuple(relations), self.kind)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "generators": [list(g) if isinstance(g, tuple) else g for g in self.generators],
            "relations": [{"left": term_to_json(l), "right": term_to_json(r)} for l, r in self.relations],
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "Presentation":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            tuple(_hashable(g) for g in data["generators"]),
            tuple((term_from_json(r["left"]), term_from_json(r["right"])) for r in data.get("relations", [])),
            data.get("kind", "DL"),
        )


def _uses_not(term) -> bool:
    if term[0] == "not":
        return True
    return term[0] in ("and", "or") and any(_uses_not(t) for t in term[1:])


# -- compiling terms to bitmask predicates ---------------------------------


def _compile(term, index: dict) -> tuple[Callable[[int], bool], int]:
    """Predicate on generator bitmasks, plus the mask of generators it reads."""
    op = term[0]
    if op == "gen":
        bit = 1 << index[term[1]]
        return (lambda s: bool(s & bit)), bit
    if op == "top":
        return (lambda s: True), 0
    if op == "bot":
        return (lambda s: False), 0
    if op in ("and", "or") and all(t[0] == "gen" for t in term[1:]):
        mask = reduce(int.__or__, (1 << index[t[1]] for t in term[1:]), 0)
        if op == "and":
            return (lambda s: s & mask == mask), mask
        return (lambda s: bool(s & mask)), mask
    if op == "not":
        f, m = _compile(term[1], index)
        return (lambda s: not f(s)), m
    parts = [_compile(t, index) for t in term[1:]]
    fs = [p[0] for p in parts]
    mask = reduce(int.__or__, (p[1] for p in parts), 0)
    if op == "and":
        return (lambda s: all(f(s) for f in fs)), mask
    if op == "or":
        return (lambda s: any(f(s) for f in fs)), mask
    raise InvalidStructure(f"unknown term constructor {op!r}")


def admissible_points(presentation: Presentation, cap: int = DEFAULT_POINT_CAP) -> list[int]:
    """All generator subsets (as bitmasks) satisfying every relation.

    Depth-first over the generators in declaration order; each relation is
    tested as soon as the last generator it mentions has been decided.
    """
    index = {g: i for i, g in enumerate(presentation.generators)}
    n = len(index)
    buckets: list[list] = [[] for _ in range(n + 1)]
    for left, right in presentation.relations:
        fl, ml = _compile(left, index)
        fr, mr = _compile(right, index)
        support = ml | mr
        buckets[support.bit_length()].append((fl, fr))
    if any(fl(0) != fr(0) for fl, fr in buckets[0]):
        return []
    out: list[int] = []

    def rec(k: int, s: int):
        if k == n:
            out.append(s)
            if len(out) > cap:
                raise CapExceeded("admissible points", len(out), cap)
            return
        checks = buckets[k + 1]
        for t in (s, s | (1 << k)):
            if all(fl(t) == fr(t) for fl, fr in checks):
                rec(k + 1, t)

    rec(0, 0)
    return out


# -- presented lattices ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class PresentedElement:
    owner: "PresentedLattice"
    extent: int

    def __eq__(self, other) -> bool:
        if not isinstance(other, PresentedElement):
            return NotImplemented
        return self.owner is other.owner and self.extent == other.extent

    def __hash__(self) -> int:
        return hash((id(self.owner), self.extent))

    def __repr__(self) -> str:
        return f"<{bin(self.extent).count('1')}/{len(self.owner.points)} points>"

    def _same(self, other: "PresentedElement"):
        if not isinstance(other, PresentedElement) or other.owner is not self.owner:
            raise MixedLattice("elements belong to different presented lattices")

    def __and__(self, other):
        self._same(other)
        return PresentedElement(self.owner, self.extent & other.extent)

    def __or__(self, other):
        self._same(other)
        return PresentedElement(self.owner, self.extent | other.extent)

    def __invert__(self):
        if self.owner.kind != "BA":
            raise InvalidStructure("complement is only defined in Boolean presentations")
        return PresentedElement(self.owner, self.owner.full_mask & ~self.extent)

    def __le__(self, other):
        return leq(self, other)

    def points(self) -> list[frozenset]:
        return [self.owner.points[i] for i in _bits(self.extent)]


class PresentedLattice:
    """A presentation together with its admissible points."""

    def __init__(self, presentation: Presentation, point_masks: Sequence[int]):
        self.presentation = presentation
        self.kind = presentation.kind
        gens = presentation.generators
        self._masks = tuple(point_masks)
        self.points = tuple(frozenset(gens[i] for i in _bits(m)) for m in self._masks)
        self.full_mask = (1 << len(self._masks)) - 1
        self.inconsistent = not self._masks
        self._gen_extent = {
            g: sum(1 << k for k, m in enumerate(self._masks) if m >> i & 1) for i, g in enumerate(gens)
        }

    def __repr__(self) -> str:
        return f"PresentedLattice({self.kind}, {len(self.presentation.generators)} generators, {len(self.points)} points)"

    @property
    def generators(self) -> tuple:
        return self.presentation.generators

    def top(self) -> PresentedElement:
        return PresentedElement(self, self.full_mask)

    def bottom(self) -> PresentedElement:
        return PresentedElement(self, 0)

    def gen(self, name) -> PresentedElement:
        return PresentedElement(self, self._gen_extent[name])

    def element(self, term) -> PresentedElement:
        """The element denoted by a term (computed on extents)."""
        return PresentedElement(self, self._extent(term))

    def _extent(self, term) -> int:
        op = term[0]
        if op == "gen":
            return self._gen_extent[term[1]]
        if op == "top":
            return self.full_mask
        if op == "bot":
            return 0
        if op == "and":
            return reduce(int.__and__, (self._extent(t) for t in term[1:]), self.full_mask)
        if op == "or":
            return reduce(int.__or__, (self._extent(t) for t in term[1:]), 0)
        if op == "not":
            if self.kind != "BA":
                raise InvalidStructure("complement is only defined in Boolean presentations")
            return self.full_mask & ~self._extent(term[1])
        raise InvalidStructure(f"unknown term constructor {op!r}")

    def restrict(self, relations: Iterable[tuple]) -> "PresentedLattice":
        """Quotient by further relations: keep the points satisfying them."""
        relations = tuple(relations)
        pres = self.presentation.extended(relations)
        index = {g: i for i, g in enumerate(pres.generators)}
        compiled = [(_compile(l, index)[0], _compile(r, index)[0]) for l, r in relations]
        keep = [m for m in self._masks if all(fl(m) == fr(m) for fl, fr in compiled)]
        return _finish(pres, keep)

    def element_extents(self, cap: int = DEFAULT_ELEMENT_CAP) -> list[int]:
        """Extents of every element of the presented lattice."""
        gens = list(dict.fromkeys(self._gen_extent.values()))
        if self.kind == "BA":
            classes: dict = {}
            for k in range(len(self._masks)):
                classes.setdefault(tuple(e >> k & 1 for e in gens), 0)
                classes[tuple(e >> k & 1 for e in gens)] |= 1 << k
            atoms = list(classes.values())
            if 1 << len(atoms) > cap:
                raise CapExceeded("presented lattice elements", 1 << len(atoms), cap)
            out = [0]
            for a in atoms:
                out += [x | a for x in out]
            return sorted(out, key=lambda m: (bin(m).count("1"), m))
        meets = {self.full_mask}
        for g in gens:
            meets |= {m & g for m in meets}
        joins = {0}
        for m in meets:
            joins |= {j | m for j in joins}
            if len(joins) > cap:
                raise CapExceeded("presented lattice elements", len(joins), cap)
        return sorted(joins, key=lambda m: (bin(m).count("1"), m))

    def elements(self, cap: int = DEFAULT_ELEMENT_CAP) -> list[PresentedElement]:
        return [PresentedElement(self, m) for m in self.element_extents(cap)]

    def __len__(self) -> int:
        return len(self.element_extents())

    def dual_points(self) -> FinPoset:
        """Admissible points under the separation preorder, modulo its kernel.

        ``S <= S'`` when every generated extent containing ``S'`` contains
        ``S``.  For a DL presentation this is reverse inclusion of points;
        for a Boolean one it is discrete.
        """
        gens = list(self._gen_extent.values())
        sig = [tuple(e >> k & 1 for e in gens) for k in range(len(self._masks))]
        reps: dict = {}
        for k, s in enumerate(sig):
            reps.setdefault(s, k)
        ks = list(reps.values())
        labels = [self.points[k] for k in ks]
        if self.kind == "BA":
            pairs = [(p, p) for p in labels]
        else:
            pairs = [
                (labels[i], labels[j])
                for i, a in enumerate(ks)
                for j, b in enumerate(ks)
                if all(sig[a][g] >= sig[b][g] for g in range(len(gens)))
            ]
        return FinPoset(labels, pairs)


def _finish(presentation: Presentation, masks: Sequence[int]) -> PresentedLattice:
    lat = PresentedLattice(presentation, masks)
    if lat.inconsistent:
        warnings.warn(
            InconsistentPresentation("no admissible point: the presented lattice is degenerate (0 = 1)"),
            stacklevel=3,
        )
    return lat


def quotient(presentation: Presentation, cap: int = DEFAULT_POINT_CAP) -> PresentedLattice:
    """The lattice presented by ``presentation``, via its admissible points."""
    return _finish(presentation, admissible_points(presentation, cap))


def free_dl(generators: Iterable[Hashable], cap: int = DEFAULT_POINT_CAP) -> PresentedLattice:
    return quotient(Presentation(tuple(generators), (), "DL"), cap)


def free_ba(generators: Iterable[Hashable], cap: int = DEFAULT_POINT_CAP) -> PresentedLattice:
    return quotient(Presentation(tuple(generators), (), "BA"), cap)


def leq(e1: PresentedElement, e2: PresentedElement) -> bool:
    """``e1 <= e2`` in the presented lattice: extent inclusion."""
    if not isinstance(e1, PresentedElement) or not isinstance(e2, PresentedElement) or e1.owner is not e2.owner:
        raise MixedLattice("elements belong to different presented lattices")
    return e1.extent & ~e2.extent == 0


def realize(P: PresentedLattice, cap: int = DEFAULT_ELEMENT_CAP):
    """Materialise the presented lattice and its dual poset of points.

    Returns ``(lattice, dual_points)`` where ``lattice`` is a
    :class:`FinDistLattice` (or :class:`FinBoolAlg` for Boolean
    presentations) whose elements are :class:`PresentedElement` values.
    """
    extents = P.element_extents(cap)
    labels = [PresentedElement(P, m) for m in extents]
    index = {m: i for i, m in enumerate(extents)}
    n = len(extents)
    leq_pairs = [(labels[i], labels[j]) for i in range(n) for j in range(n) if extents[i] & ~extents[j] == 0]
    poset = FinPoset(labels, leq_pairs)
    meet_t = [[index[a & b] for b in extents] for a in extents]
    join_t = [[index[a | b] for b in extents] for a in extents]
    L = FinDistLattice(poset, meet_t, join_t, labels[index[0]], labels[index[P.full_mask]], check=False)
    if P.kind == "BA":
        L = FinBoolAlg(L, lambda e: PresentedElement(P, P.full_mask & ~e.extent), check=False)
    return L, P.dual_points()
