"""First-order logic over finite relational structures.

Variables are ``v1, v2, ...`` and are identified by their index.  An
assignment maps variable indices to universe elements; universes are always
``1..N``.  Besides the usual quantifiers the language has counting
quantifiers ``exists[k] vI. phi`` whose annotation ``k`` is an element of a
finite semiring (see :mod:`stepdual.layers`); they can only be evaluated when
a semiring is supplied.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import (
    ArityMismatch,
    CapExceeded,
    IndexOutOfWindow,
    InvalidStructure,
    UnboundVariable,
    UnknownSymbol,
)
from .setalgebra import SetAlgebra
from .syntax import And, Bot, BoolParser, Formula, Implies, Not, Or, Top

# -- signatures and structures ---------------------------------------------


@dataclass(frozen=True)
class Signature:
    relations: tuple = ()  # ((name, arity), ...)
    constants: tuple = ()

    def __post_init__(self):
        rels = tuple(self.relations.items()) if isinstance(self.relations, Mapping) else tuple(tuple(r) for r in self.relations)
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "constants", tuple(self.constants))
        names = [r for r, _ in rels] + list(self.constants)
        if len(set(names)) != len(names):
            raise InvalidStructure("symbol names must be distinct")
        for name, arity in rels:
            if not isinstance(arity, int) or arity < 1:
                raise InvalidStructure(f"relation {name!r} needs arity >= 1")

    @cached_property
    def arity(self) -> dict:
        return dict(self.relations)

    def to_json(self) -> dict:
        return {"relations": dict(self.relations), "constants": list(self.constants)}

    @classmethod
    def from_json(cls, data: dict | str) -> "Signature":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple(data.get("relations", {}).items()), tuple(data.get("constants", ())))


@dataclass(frozen=True)
class FinStructure:
    """A finite structure on ``{1..size}``; relations are frozensets of tuples."""

    size: int
    relations: tuple = ()  # ((name, frozenset of tuples), ...) sorted by name
    constants: tuple = ()  # ((name, element), ...) sorted by name

    def __post_init__(self):
        rels = self.relations.items() if isinstance(self.relations, Mapping) else self.relations
        rels = tuple(sorted((n, frozenset(tuple(t) for t in ts)) for n, ts in rels))
        consts = self.constants.items() if isinstance(self.constants, Mapping) else self.constants
        consts = tuple(sorted(consts))
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "constants", consts)
        if self.size < 0:
            raise InvalidStructure("universe size must be non-negative")
        lengths = {}
        for name, tuples in rels:
            for t in tuples:
                if not all(1 <= x <= self.size for x in t):
                    raise InvalidStructure(f"tuple {t} of {name!r} leaves the universe 1..{self.size}")
                lengths.setdefault(name, set()).add(len(t))
            if len(lengths.get(name, ())) > 1:
                raise InvalidStructure(f"relation {name!r} mixes tuple lengths")
        for name, c in consts:
            if not 1 <= c <= self.size:
                raise InvalidStructure(f"constant {name!r} = {c} leaves the universe")

    @property
    def universe(self) -> range:
        return range(1, self.size + 1)

    @cached_property
    def _rel(self) -> dict:
        return dict(self.relations)

    @cached_property
    def _const(self) -> dict:
        return dict(self.constants)

    def rel(self, name: str) -> frozenset:
        return self._rel.get(name, frozenset())

    def const(self, name: str) -> int:
        try:
            return self._const[name]
        except KeyError:
            raise UnknownSymbol(f"constant {name!r} is not interpreted") from None

    def check_signature(self, sig: Signature) -> None:
        for name, arity in sig.relations:
            if any(len(t) != arity for t in self.rel(name)):
                raise ArityMismatch(f"relation {name!r} has arity {arity}")
        extra = set(self._rel) - set(sig.arity)
        if extra:
            raise UnknownSymbol(f"relations {sorted(extra)} are not in the signature")
        missing = set(sig.constants) - set(self._const)
        if missing:
            raise InvalidStructure(f"constants {sorted(missing)} are not interpreted")

    def __str__(self) -> str:
        parts = [f"{n}={sorted(ts)}" for n, ts in self.relations]
        parts += [f"{n}={c}" for n, c in self.constants]
        return f"<{self.size}: {', '.join(parts)}>"

    def to_json(self) -> dict:
        return {
            "universe": self.size,
            "relations": {n: sorted(list(t) for t in ts) for n, ts in self.relations},
            "constants": dict(self.constants),
        }

    @classmethod
    def from_json(cls, data: dict | str, signature: Signature | None = None) -> "FinStructure":
        if isinstance(data, str):
            data = json.loads(data)
        A = cls(int(data["universe"]), data.get("relations", {}), data.get("constants", {}))
        if signature is not None:
            A.check_signature(signature)
        return A

    def permuted(self, perm: Mapping[int, int]) -> "FinStructure":
        return FinStructure(
            self.size,
            tuple((n, frozenset(tuple(perm[x] for x in t) for t in ts)) for n, ts in self.relations),
            tuple((n, perm[c]) for n, c in self.constants),
        )


# -- formulas --------------------------------------------------------------


@dataclass(frozen=True)
class Variable:
    index: int

    def __str__(self) -> str:
        return f"v{self.index}"


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Atom(Formula):
    relation: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.relation}({','.join(map(str, self.args))})"


@dataclass(frozen=True)
class Eq(Formula):
    left: Variable | Constant
    right: Variable | Constant

    def __str__(self) -> str:
        return f"{self.left}={self.right}"


@dataclass(frozen=True)
class Exists(Formula):
    var: int
    body: Formula

    def children(self) -> tuple:
        return (self.body,)

    def __str__(self) -> str:
        return f"(exists v{self.var}. {self.body})"


@dataclass(frozen=True)
class Forall(Formula):
    var: int
    body: Formula

    def children(self) -> tuple:
        return (self.body,)

    def __str__(self) -> str:
        return f"(forall v{self.var}. {self.body})"


@dataclass(frozen=True)
class CountExists(Formula):
    """``exists[k] vI. phi``: the witness count, folded in a semiring, equals ``k``."""

    k: Hashable
    var: int
    body: Formula

    def children(self) -> tuple:
        return (self.body,)

    def __str__(self) -> str:
        return f"(exists[{self.k}] v{self.var}. {self.body})"


def free_variables(phi: Formula) -> frozenset:
    if isinstance(phi, Atom):
        return frozenset(t.index for t in phi.args if isinstance(t, Variable))
    if isinstance(phi, Eq):
        return frozenset(t.index for t in (phi.left, phi.right) if isinstance(t, Variable))
    if isinstance(phi, (Exists, Forall, CountExists)):
        return free_variables(phi.body) - {phi.var}
    return frozenset().union(*(free_variables(c) for c in phi.children()))


def counting_annotations(phi: Formula) -> set:
    own = {phi.k} if isinstance(phi, CountExists) else set()
    return own.union(*(counting_annotations(c) for c in phi.children()))


_VAR = r"v[0-9]+(?![A-Za-z0-9_])"


class FOParser(BoolParser):
    rules = [
        ("var", _VAR),
        ("name", r"[A-Za-z_][A-Za-z0-9_]*"),
        ("num", r"[0-9]+"),
        ("arrow", r"->"),
        ("op", r"[~&|().,=\[\]]"),
    ]
    keywords = ("exists", "forall", "bot", "top")

    def __init__(self, text: str, signature: Signature):
        super().__init__(text)
        self.sig = signature

    def prefix(self):
        for word, node in (("exists", Exists), ("forall", Forall)):
            if self.accept("name", word):
                if word == "exists" and self.accept("op", "["):
                    tok = self.accept("num") or self.accept("name")
                    if tok is None:
                        self.fail(("semiring element",))
                    self.expect("op", "]")
                    k = int(tok.text) if tok.kind == "num" else tok.text
                    var = self._binder()
                    return CountExists(k, var, self.implication())
                var = self._binder()
                return node(var, self.implication())
        return None

    def _binder(self) -> int:
        tok = self.expect("var")
        self.expect("op", ".")
        return int(tok.text[1:])

    def term(self):
        tok = self.peek()
        if tok.kind == "var":
            self.i += 1
            return Variable(int(tok.text[1:]))
        if tok.kind == "name" and tok.text not in self.keywords:
            if tok.text not in self.sig.constants:
                raise UnknownSymbol(f"unknown constant {tok.text!r} at position {tok.pos}")
            self.i += 1
            return Constant(tok.text)
        self.fail(("variable", "constant"))

    def atom(self):
        tok = self.peek()
        if tok.kind == "name" and tok.text not in self.keywords and tok.text not in self.sig.constants:
            name = tok.text
            self.i += 1
            if name not in self.sig.arity:
                raise UnknownSymbol(f"unknown relation {name!r} at position {tok.pos}")
            self.expect("op", "(")
            args = [self.term()]
            while self.accept("op", ","):
                args.append(self.term())
            self.expect("op", ")")
            if len(args) != self.sig.arity[name]:
                raise ArityMismatch(f"{name} has arity {self.sig.arity[name]} but got {len(args)} arguments at position {tok.pos}")
            return Atom(name, tuple(args))
        if tok.kind in ("var", "name") and tok.text not in self.keywords:
            left = self.term()
            self.expect("op", "=")
            return Eq(left, self.term())
        self.fail(("atom", "'~'", "'('", "quantifier", "'bot'", "'top'"))


def parse_fo(text: str, signature: Signature) -> Formula:
    """Parse a first-order formula, resolving symbols against ``signature``."""
    return FOParser(text, signature).parse()


# -- evaluation ------------------------------------------------------------


def _term_value(t, A: FinStructure, alpha: Mapping[int, int]) -> int:
    if isinstance(t, Variable):
        try:
            return alpha[t.index]
        except KeyError:
            raise UnboundVariable(f"v{t.index} is not assigned") from None
    return A.const(t.name)


def evaluate(A: FinStructure, alpha: Mapping[int, int] | Sequence[int], phi: Formula, semiring=None) -> bool:
    """Tarskian truth of ``phi`` in ``A`` under ``alpha``.

    ``alpha`` is a mapping from variable index to element, or a sequence
    read as the values of ``v1, v2, ...``.  Counting quantifiers need
    ``semiring`` (a :class:`stepdual.layers.SemiringTable`).
    """
    if not isinstance(alpha, Mapping):
        alpha = {i + 1: x for i, x in enumerate(alpha)}
    unbound = free_variables(phi) - set(alpha)
    if unbound:
        raise UnboundVariable(f"free variables {sorted(f'v{i}' for i in unbound)} are not assigned")
    return _eval(A, dict(alpha), phi, semiring)


def _eval(A: FinStructure, alpha: dict, phi: Formula, S) -> bool:
    if isinstance(phi, Atom):
        return tuple(_term_value(t, A, alpha) for t in phi.args) in A.rel(phi.relation)
    if isinstance(phi, Eq):
        return _term_value(phi.left, A, alpha) == _term_value(phi.right, A, alpha)
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bot):
        return False
    if isinstance(phi, Not):
        return not _eval(A, alpha, phi.body, S)
    if isinstance(phi, And):
        return _eval(A, alpha, phi.left, S) and _eval(A, alpha, phi.right, S)
    if isinstance(phi, Or):
        return _eval(A, alpha, phi.left, S) or _eval(A, alpha, phi.right, S)
    if isinstance(phi, Implies):
        return (not _eval(A, alpha, phi.left, S)) or _eval(A, alpha, phi.right, S)
    if isinstance(phi, (Exists, Forall, CountExists)):
        saved = alpha.get(phi.var)
        hits = 0
        for a in A.universe:
            alpha[phi.var] = a
            hits += _eval(A, alpha, phi.body, S)
        if saved is None:
            del alpha[phi.var]
        else:
            alpha[phi.var] = saved
        if isinstance(phi, Exists):
            return hits > 0
        if isinstance(phi, Forall):
            return hits == A.size
        if S is None:
            raise UnknownSymbol("counting quantifier evaluated without a semiring")
        if phi.k not in S.index:
            raise UnknownSymbol(f"{phi.k!r} is not an element of the semiring")
        return S.repeat_one(hits) == phi.k
    raise InvalidStructure(f"not a first-order formula: {phi!r}")


# -- enumeration -----------------------------------------------------------

MAX_ISO_SIZE = 7


def _iso_key(A: FinStructure) -> tuple:
    best = None
    for perm in itertools.permutations(A.universe):
        p = dict(zip(A.universe, perm))
        B = A.permuted(p)
        key = (tuple((n, tuple(sorted(ts))) for n, ts in B.relations), B.constants)
        if best is None or key < best:
            best = key
    return best


def structures_of_size(sig: Signature, n: int) -> Iterable[FinStructure]:
    """Every structure on ``{1..n}``, without isomorphism reduction."""
    universe = range(1, n + 1)
    rel_choices = []
    for name, arity in sig.relations:
        tuples = list(itertools.product(universe, repeat=arity))
        rel_choices.append([(name, frozenset(t for b, t in enumerate(tuples) if mask >> b & 1)) for mask in range(1 << len(tuples))])
    const_choices = [[(c, x) for x in universe] for c in sig.constants]
    for rels in itertools.product(*rel_choices):
        for consts in itertools.product(*const_choices):
            yield FinStructure(n, rels, consts)


def enumerate_structures(
    sig: Signature,
    max_size: int,
    theory: Iterable[Formula] = (),
    *,
    min_size: int = 1,
    up_to_iso: bool = True,
    cap: int = 1 << 16,
) -> list[FinStructure]:
    """Structures of size ``min_size..max_size`` satisfying ``theory``.

    With ``up_to_iso`` one representative (the first enumerated) of each
    isomorphism class is kept.
    """
    if max_size < 1:
        raise InvalidStructure("max_size must be at least 1")
    theory = list(theory)
    for phi in theory:
        if free_variables(phi):
            raise UnboundVariable(f"theory sentence {phi} has free variables")
    if up_to_iso and max_size > MAX_ISO_SIZE:
        raise CapExceeded("isomorphism reduction universe", max_size, MAX_ISO_SIZE)
    out = []
    seen = set()
    for n in range(max(min_size, 1), max_size + 1):
        for A in structures_of_size(sig, n):
            if not all(evaluate(A, {}, phi) for phi in theory):
                continue
            if up_to_iso:
                key = (n, _iso_key(A))
                if key in seen:
                    continue
                seen.add(key)
            out.append(A)
            if len(out) > cap:
                raise CapExceeded("structures", len(out), cap)
    return out


# -- model spaces ----------------------------------------------------------


@dataclass(frozen=True)
class ModelPoint:
    """A structure with values for the variables of its space, in order."""

    structure: FinStructure
    values: tuple
    variables: tuple

    @property
    def assignment(self) -> dict:
        return dict(zip(self.variables, self.values))

    def forget(self, i: int) -> "ModelPoint":
        k = self.variables.index(i)
        return ModelPoint(self.structure, self.values[:k] + self.values[k + 1 :], self.variables[:k] + self.variables[k + 1 :])

    def extend(self, i: int, a: int) -> "ModelPoint":
        """Add ``v_i -> a``, keeping variables sorted."""
        pairs = sorted(list(zip(self.variables, self.values)) + [(i, a)])
        return ModelPoint(self.structure, tuple(v for _, v in pairs), tuple(k for k, _ in pairs))

    def __str__(self) -> str:
        alpha = ", ".join(f"v{k}={v}" for k, v in zip(self.variables, self.values))
        return f"({self.structure}; {alpha})" if alpha else str(self.structure)


class ModelSpace:
    """Finite stand-in for the space of models with assignments on a set of variables."""

    def __init__(self, structures: Sequence[FinStructure], variables: Iterable[int]):
        self.structures = tuple(structures)
        self.variables = tuple(sorted(variables))
        self.points = tuple(
            ModelPoint(A, vals, self.variables)
            for A in self.structures
            for vals in itertools.product(A.universe, repeat=len(self.variables))
        )
        self.index = {p: k for k, p in enumerate(self.points)}

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __repr__(self) -> str:
        vs = ",".join(f"v{i}" for i in self.variables)
        return f"ModelSpace({len(self.structures)} structures, [{vs}], {len(self.points)} points)"

    def _check_index(self, i: int):
        if i not in self.variables:
            raise IndexOutOfWindow(f"v{i} is not among the variables {list(self.variables)}")

    def forget(self, i: int) -> "ModelSpace":
        """The space with ``v_i`` removed from the window."""
        self._check_index(i)
        return ModelSpace(self.structures, [v for v in self.variables if v != i])

    def projection(self, i: int) -> dict:
        """``pi_i``: each point to the point forgetting ``v_i``."""
        self._check_index(i)
        return {p: p.forget(i) for p in self.points}

    def fiber(self, point: ModelPoint, i: int) -> list[ModelPoint]:
        """Points over ``point`` (a point of ``forget(i)``), one per value of ``v_i``."""
        self._check_index(i)
        return [point.extend(i, a) for a in point.structure.universe]


def model_space(structures: Sequence[FinStructure], n: int) -> ModelSpace:
    """All pairs ``(A, alpha)`` with ``alpha`` assigning ``v1..vn``."""
    if n < 0:
        raise InvalidStructure("window must be non-negative")
    return ModelSpace(structures, range(1, n + 1))


def semantics_set(phi: Formula, space: ModelSpace, semiring=None) -> frozenset:
    """Points of ``space`` satisfying ``phi``."""
    unbound = free_variables(phi) - set(space.variables)
    if unbound:
        raise UnboundVariable(f"free variables {sorted(f'v{i}' for i in unbound)} lie outside the window")
    return frozenset(p for p in space.points if _eval(p.structure, p.assignment, phi, semiring))


def generated_subalgebra(generator_sets: Iterable[Iterable[ModelPoint]], space: ModelSpace) -> SetAlgebra:
    """Smallest Boolean subalgebra of ``P(space)`` containing the given sets."""
    return SetAlgebra.generated(space.points, generator_sets)
