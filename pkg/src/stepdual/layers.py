"""Adding one layer of existential or semiring quantifiers to a Boolean algebra
of sets of models, and the maps into hyperspaces and measure spaces dual to it.

A "semantically given logic" is a :class:`SetAlgebra` ``B`` over the points
of a :class:`ModelSpace`.  Its dual space is the set of atoms of ``B``; the
dual map of the inclusion sends each model point to the index of its atom.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .errors import CapExceeded, IndexOutOfWindow, InvalidStructure, OutOfRange
from .fo import ModelPoint, ModelSpace
from .setalgebra import SetAlgebra

DEFAULT_ALGEBRA_CAP = 1 << 12

# -- semirings -----------------------------------------------------------


class SemiringTable:
    """A finite semiring given by addition and multiplication tables."""

    def __init__(self, elements: Sequence[Hashable], add, mul, zero, one, *, name: str = "S", check: bool = True):
        self.elements = tuple(elements)
        self.name = name
        self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise InvalidStructure("semiring elements must be distinct")
        self._add = self._table(add)
        self._mul = self._table(mul)
        if zero not in self.index or one not in self.index:
            raise InvalidStructure("zero and one must be elements")
        self.zero, self.one = zero, one
        if check:
            self._check()

    def _table(self, op) -> tuple:
        els = self.elements
        if callable(op):
            rows = [[op(a, b) for b in els] for a in els]
        else:
            rows = [[els[x] if isinstance(x, int) and x not in self.index and 0 <= x < len(els) else x for x in row] for row in op]
        if len(rows) != len(els) or any(len(r) != len(els) for r in rows):
            raise InvalidStructure("operation table has the wrong shape")
        for r in rows:
            for x in r:
                if x not in self.index:
                    raise InvalidStructure(f"table entry {x!r} is not an element")
        return tuple(tuple(self.index[x] for x in r) for r in rows)

    def _check(self):
        n = range(len(self.elements))
        A, M = self._add, self._mul
        z, o = self.index[self.zero], self.index[self.one]
        for a in n:
            if A[a][z] != a or A[z][a] != a:
                raise InvalidStructure("zero is not an additive unit")
            if M[a][o] != a or M[o][a] != a:
                raise InvalidStructure("one is not a multiplicative unit")
            if M[a][z] != z or M[z][a] != z:
                raise InvalidStructure("zero does not annihilate")
            for b in n:
                if A[a][b] != A[b][a]:
                    raise InvalidStructure("addition is not commutative")
                for c in n:
                    if A[A[a][b]][c] != A[a][A[b][c]]:
                        raise InvalidStructure("addition is not associative")
                    if M[M[a][b]][c] != M[a][M[b][c]]:
                        raise InvalidStructure("multiplication is not associative")
                    if M[a][A[b][c]] != A[M[a][b]][M[a][c]] or M[A[a][b]][c] != A[M[a][c]][M[b][c]]:
                        raise InvalidStructure("multiplication does not distribute over addition")

    def __repr__(self) -> str:
        return f"SemiringTable({self.name}, {len(self.elements)} elements)"

    def __len__(self) -> int:
        return len(self.elements)

    def add(self, a, b):
        return self.elements[self._add[self.index[a]][self.index[b]]]

    def mul(self, a, b):
        return self.elements[self._mul[self.index[a]][self.index[b]]]

    def sum(self, items: Iterable):
        return reduce(self.add, items, self.zero)

    def repeat_one(self, m: int):
        """``1 + ... + 1`` with ``m`` summands; the empty sum is zero."""
        out = self.zero
        for _ in range(m):
            out = self.add(out, self.one)
        return out

    def to_json(self) -> dict:
        els = self.elements
        return {
            "name": self.name,
            "elements": list(els),
            "add": [[els[x] for x in r] for r in self._add],
            "mul": [[els[x] for x in r] for r in self._mul],
            "zero": self.zero,
            "one": self.one,
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "SemiringTable":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["elements"], data["add"], data["mul"], data["zero"], data["one"], name=data.get("name", "S"))


def boolean_semiring() -> SemiringTable:
    """``{0, 1}`` with ``or`` as addition (so ``1 + 1 = 1``) and ``and`` as multiplication."""
    return SemiringTable((0, 1), lambda a, b: a | b, lambda a, b: a & b, 0, 1, name="bool")


def cyclic_ring(q: int) -> SemiringTable:
    """The ring of integers modulo ``q`` (``1 <= q <= 12``)."""
    if not 1 <= q <= 12:
        raise InvalidStructure("built-in cyclic rings cover 1 <= q <= 12")
    return SemiringTable(range(q), lambda a, b: (a + b) % q, lambda a, b: (a * b) % q, 0, 1 % q, name=f"Z{q}")


def semiring_by_name(name: str) -> SemiringTable:
    """``bool`` or ``Zq`` / ``Z/q`` for the cyclic rings."""
    key = name.strip().lower().replace("/", "")
    if key in ("bool", "boolean", "2", "b"):
        return boolean_semiring()
    if key.startswith("z") and key[1:].isdigit():
        return cyclic_ring(int(key[1:]))
    raise InvalidStructure(f"unknown semiring {name!r}; use 'bool' or 'Zq'")


# -- layers ----------------------------------------------------------------


@dataclass(frozen=True)
class LayerResult:
    """A new algebra over ``space`` with the provenance of each generator."""

    algebra: SetAlgebra
    space: ModelSpace
    generators: tuple  # ((subset, provenance), ...)

    def __len__(self) -> int:
        return len(self.algebra)


def _check_layer_input(B: SetAlgebra, space: ModelSpace, i: int):
    if B.full != frozenset(space.points):
        raise InvalidStructure("algebra is not over the points of this space")
    if i not in space.variables:
        raise IndexOutOfWindow(f"v{i} is not among the variables {list(space.variables)}")


def _sources(B: SetAlgebra, which: str, cap: int) -> list[tuple[frozenset, tuple]]:
    """Elements of ``B`` to quantify, each with its atom-index description."""
    if which == "atoms":
        return [(a, (k,)) for k, a in enumerate(B.atoms)]
    if which != "all":
        raise ValueError("generators must be 'all' or 'atoms'")
    if len(B) > cap:
        raise CapExceeded("algebra elements to quantify", len(B), cap)
    out = []
    for r in range(len(B.atoms) + 1):
        for combo in itertools.combinations(range(len(B.atoms)), r):
            out.append((B.from_hat(combo), combo))
    return out


def exists_layer(B: SetAlgebra, space: ModelSpace, i: int, *, generators: str = "all", cap: int = DEFAULT_ALGEBRA_CAP) -> LayerResult:
    """Algebra over ``space.forget(i)`` generated by the images ``pi_i[b]`` for ``b`` in ``B``.

    Images preserve unions, so ``generators="atoms"`` (images of atoms only)
    yields the same algebra.
    """
    _check_layer_input(B, space, i)
    target = space.forget(i)
    proj = space.projection(i)
    gens = [(frozenset(proj[p] for p in b), ("exists", i, hat)) for b, hat in _sources(B, generators, cap)]
    return LayerResult(SetAlgebra.generated(target.points, [g for g, _ in gens]), target, tuple(gens))


def dual_map(B: SetAlgebra) -> dict:
    """Dual of the inclusion of ``B``: each point to the index of its atom."""
    return {x: B.atom_index(x) for x in B.universe}


def map_R_exists(B: SetAlgebra, space: ModelSpace, i: int) -> dict:
    """Each point of ``space.forget(i)`` to the set of atoms of ``B`` its fiber meets."""
    _check_layer_input(B, space, i)
    target = space.forget(i)
    return {p: frozenset(B.atom_index(q) for q in space.fiber(p, i)) for p in target.points}


def kernel_partition(R: Mapping) -> frozenset:
    """Classes of points with equal image."""
    classes: dict = {}
    for p, v in R.items():
        classes.setdefault(v, set()).add(p)
    return frozenset(frozenset(c) for c in classes.values())


@dataclass(frozen=True)
class DualityReport:
    ok: bool
    checks: dict
    counterexample: str | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": self.checks, "counterexample": self.counterexample, "details": self.details}


def verify_exists_duality(B: SetAlgebra, space: ModelSpace, i: int, *, cap: int = DEFAULT_ALGEBRA_CAP) -> DualityReport:
    """Check that the image of ``R`` is the dual space of the existential layer.

    (a) ``R^{-1}(dia b^)`` equals ``pi_i[b]`` for every ``b`` in ``B``;
    (b) the kernel of ``R`` partitions ``space.forget(i)`` exactly into the
    atoms of the layer algebra.
    """
    layer = exists_layer(B, space, i, cap=cap)
    R = map_R_exists(B, space, i)
    counter = None
    identity = True
    for b, (_, _, hat) in layer.generators:
        pre = frozenset(p for p, C in R.items() if C & set(hat))
        if pre != b:
            identity = False
            counter = f"R^-1(dia b^) != pi_{i}[b] for b with atoms {list(hat)}"
            break
    kernel = kernel_partition(R)
    kernel_ok = kernel == layer.algebra.partition()
    if kernel_ok is False and counter is None:
        counter = f"kernel of R has {len(kernel)} classes, layer has {len(layer.algebra.atoms)} atoms"
    details = {"image_size": len(set(R.values())), "layer_atoms": len(layer.algebra.atoms), "points": len(R)}
    return DualityReport(identity and kernel_ok, {"generator_identity": identity, "kernel_matches_layer": kernel_ok}, counter, details)


def semiring_count(b: Iterable[ModelPoint], point: ModelPoint, i: int, space: ModelSpace) -> int:
    """How many ``a`` put ``point`` extended by ``v_i -> a`` into ``b``."""
    if i not in space.variables:
        raise IndexOutOfWindow(f"v{i} is not among the variables {list(space.variables)}")
    b = b if isinstance(b, (set, frozenset)) else frozenset(b)
    return sum(q in b for q in space.fiber(point, i))


def semiring_layer(
    B: SetAlgebra, space: ModelSpace, S: SemiringTable, i: int, *, generators: str = "all", cap: int = DEFAULT_ALGEBRA_CAP
) -> LayerResult:
    """Algebra over ``space.forget(i)`` generated by ``{p | 1+...+1 (m_{b,p} times) = k}``."""
    _check_layer_input(B, space, i)
    target = space.forget(i)
    gens = []
    for b, hat in _sources(B, generators, cap):
        folded = {p: S.repeat_one(semiring_count(b, p, i, space)) for p in target.points}
        for k in S.elements:
            gens.append((frozenset(p for p, v in folded.items() if v == k), ("count", i, hat, k)))
    return LayerResult(SetAlgebra.generated(target.points, [g for g, _ in gens]), target, tuple(gens))


def combined_layer(B: SetAlgebra, space: ModelSpace, i: int) -> tuple[SetAlgebra, int]:
    """Algebra on ``space`` generated by ``B`` and the pulled-back existential layer.

    Also returns the size of the image of the product map ``p -> (R(pi_i p), f(p))``.
    """
    layer = exists_layer(B, space, i, generators="atoms")
    proj = space.projection(i)
    pulled = [frozenset(p for p in space.points if proj[p] in a) for a in layer.algebra.atoms]
    algebra = SetAlgebra.generated(space.points, list(B.atoms) + pulled)
    R = map_R_exists(B, space, i)
    image = {(R[proj[p]], B.atom_index(p)) for p in space.points}
    return algebra, len(image)


# -- measures --------------------------------------------------------------


class Measure:
    """A function on the elements of a finite :class:`SetAlgebra` with values in ``S``.

    ``S`` is anything with ``add`` and ``zero`` (a :class:`SemiringTable` or
    the Gamma value monoid).
    """

    def __init__(self, algebra: SetAlgebra, values: Mapping | Callable, S):
        self.algebra = algebra
        self.S = S
        f = values if callable(values) else values.__getitem__
        self.values = {a: f(a) for a in algebra.elements()}

    @classmethod
    def from_atoms(cls, algebra: SetAlgebra, atom_values: Sequence, S) -> "Measure":
        """The additive extension of values given on atoms."""
        vals = list(atom_values)
        return cls(algebra, lambda a: S.sum(vals[k] for k in algebra.hat(a)), S)

    def __call__(self, a):
        return self.values[frozenset(a)]

    @cached_property
    def key(self) -> tuple:
        return tuple(self.values[a] for a in self.algebra.elements())

    def atom_values(self) -> tuple:
        return tuple(self.values[a] for a in self.algebra.atoms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Measure) and self.algebra == other.algebra and self.values == other.values

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Measure({self.atom_values()!r})"

    def additivity_failures(self, limit: int = 1) -> list[tuple]:
        """Disjoint pairs ``(a, b)`` with ``mu(a v b) != mu(a) + mu(b)``; ``(0,)`` if ``mu(0) != 0``.

        Given ``mu(0) = 0`` this is equivalent to
        ``mu(a v b) + mu(a ^ b) = mu(a) + mu(b)`` for all pairs, and it never
        adds values whose sum may be undefined in a partial monoid such as Gamma.
        """
        S = self.S
        out = []
        if self.values[frozenset()] != S.zero:
            out.append((frozenset(),))
        els = list(self.algebra.elements())
        for a, b in itertools.product(els, repeat=2):
            if len(out) >= limit:
                break
            if a & b:
                continue
            try:
                ok = self.values[a | b] == S.add(self.values[a], self.values[b])
            except OutOfRange:
                ok = False
            if not ok:
                out.append((a, b))
        return out

    def is_finitely_additive(self) -> bool:
        return not self.additivity_failures()


def measures_space(points: Sequence, S, cap: int = 1 << 16) -> list[Measure]:
    """All finitely additive ``S``-valued measures on the powerset of ``points``."""
    algebra = SetAlgebra.powerset(points)
    total = len(S.elements) ** len(algebra.atoms)
    if total > cap:
        raise CapExceeded("measures", total, cap)
    return [Measure.from_atoms(algebra, vals, S) for vals in itertools.product(S.elements, repeat=len(algebra.atoms))]


def vietoris_to_measure(C: Iterable, algebra: SetAlgebra) -> Measure:
    """``mu_C(a) = 1`` iff ``a`` meets ``C``."""
    C = frozenset(C)
    return Measure(algebra, lambda a: 1 if a & C else 0, boolean_semiring())


def measure_to_vietoris(mu: Measure) -> frozenset:
    """Inverse of :func:`vietoris_to_measure`: the meet of all ``a`` with ``mu(~a) = 0``."""
    A = mu.algebra
    zero = mu.S.zero
    return reduce(frozenset.__and__, (a for a in A.elements() if mu(A.complement(a)) == zero), A.full)


class Integral:
    """``P -> sum of g over P`` for a finitely supported ``g``, on arbitrary subsets."""

    def __init__(self, g: Mapping, S):
        self.S = S
        self.support = {x: v for x, v in g.items() if v != S.zero}

    def __call__(self, subset: Iterable):
        subset = subset if isinstance(subset, (set, frozenset)) else frozenset(subset)
        return self.S.sum(v for x, v in self.support.items() if x in subset)


def integrate(g: Mapping, S) -> Integral:
    return Integral(g, S)


def pushforward(mu: Callable, f: Mapping, algebra: SetAlgebra) -> Measure:
    """``f_*(mu)(a) = mu(f^{-1}(a))`` on the elements of ``algebra`` (over the codomain of ``f``)."""
    S = mu.S
    return Measure(algebra, lambda a: mu(x for x, y in f.items() if y in a), S)


def integrate_pushforward(g: Mapping, f: Mapping, algebra: SetAlgebra, S) -> Measure:
    """Pushforward along ``f`` of the integral of ``g``."""
    return pushforward(integrate(g, S), f, algebra)


def indicator(point: ModelPoint, space: ModelSpace, i: int, S) -> dict:
    """``S``-valued characteristic function of the fiber over ``point``."""
    fiber = set(space.fiber(point, i))
    return {q: (S.one if q in fiber else S.zero) for q in space.points}


def map_R_semiring(B: SetAlgebra, space: ModelSpace, S: SemiringTable, i: int) -> dict:
    """Each point of ``space.forget(i)`` to its measure on the dual space of ``B``."""
    _check_layer_input(B, space, i)
    f = dual_map(B)
    atoms_algebra = SetAlgebra.powerset(range(len(B.atoms)))
    target = space.forget(i)
    return {p: integrate_pushforward(indicator(p, space, i, S), f, atoms_algebra, S) for p in target.points}


def verify_semiring_duality(B: SetAlgebra, space: ModelSpace, S: SemiringTable, i: int, *, cap: int = DEFAULT_ALGEBRA_CAP) -> DualityReport:
    """Check that the image of the measure map ``R`` is the dual space of the semiring layer.

    (a) ``R^{-1}([b, k])`` equals the layer generator for ``(b, k)``;
    (b) the kernel of ``R`` coincides with the atoms of the layer algebra;
    (c) every ``R(p)`` is finitely additive.
    """
    layer = semiring_layer(B, space, S, i, cap=cap)
    R = map_R_semiring(B, space, S, i)
    counter = None
    identity = True
    for gen_set, (_, _, hat, k) in layer.generators:
        pre = frozenset(p for p, mu in R.items() if mu(frozenset(hat)) == k)
        if pre != gen_set:
            identity = False
            counter = f"R^-1([b,{k}]) differs from the generator for b with atoms {list(hat)}"
            break
    additive = all(mu.is_finitely_additive() for mu in set(R.values()))
    if not additive and counter is None:
        counter = "some R(p) is not finitely additive"
    kernel = kernel_partition(R)
    kernel_ok = kernel == layer.algebra.partition()
    if not kernel_ok and counter is None:
        counter = f"kernel of R has {len(kernel)} classes, layer has {len(layer.algebra.atoms)} atoms"
    details = {"image_size": len(set(R.values())), "layer_atoms": len(layer.algebra.atoms), "points": len(R), "semiring": S.name}
    checks = {"generator_identity": identity, "finitely_additive": additive, "kernel_matches_layer": kernel_ok}
    return DualityReport(identity and additive and kernel_ok, checks, counter, details)
