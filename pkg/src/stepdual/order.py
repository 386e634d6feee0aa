"""Finite posets, distributive lattices and Boolean algebras.

Elements are arbitrary hashable labels.  Internally every structure works on
indices ``0..n-1`` with the order stored as a read-only boolean matrix and,
for set-style work, as integer bitmasks of down- and up-sets.

Throughout, join-irreducible and join-prime are used interchangeably; the two
notions agree in finite distributive lattices, which are the only lattices
built here.
"""

from __future__ import annotations

import itertools
import json
from functools import cached_property, reduce
from typing import Callable, Hashable, Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from . import iso
from .errors import CapExceeded, InvalidStructure, NotASublattice


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class FinPoset:
    """Finite partial order on distinct hashable elements.

    ``leq`` is an iterable of pairs ``(a, b)`` meaning ``a <= b`` and must
    already be reflexive and transitive; use :meth:`generated` to close a
    relation (e.g. a list of covers) first.
    """

    def __init__(self, elements: Iterable[Hashable], leq: Iterable[tuple] | np.ndarray):
        self.elements = tuple(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)
        if len(self.index) != n:
            raise InvalidStructure("poset elements must be distinct")
        if isinstance(leq, np.ndarray):
            mat = np.array(leq, dtype=bool)
        else:
            mat = np.zeros((n, n), dtype=bool)
            for a, b in leq:
                try:
                    mat[self.index[a], self.index[b]] = True
                except KeyError as exc:
                    raise InvalidStructure(f"order mentions unknown element {exc}") from None
        if mat.shape != (n, n):
            raise InvalidStructure("order matrix has the wrong shape")
        if n:
            if not mat.diagonal().all():
                bad = self.elements[int(np.argmin(mat.diagonal()))]
                raise InvalidStructure(f"order is not reflexive at {bad!r}")
            both = mat & mat.T
            np.fill_diagonal(both, False)
            if both.any():
                i, j = map(int, np.argwhere(both)[0])
                raise InvalidStructure(
                    f"order is not antisymmetric: {self.elements[i]!r}, {self.elements[j]!r}"
                )
            m = mat.astype(np.int64)
            if (((m @ m) > 0) & ~mat).any():
                raise InvalidStructure("order is not transitive")
        mat.flags.writeable = False
        self.matrix = mat

    @classmethod
    def generated(cls, elements: Iterable[Hashable], relation: Iterable[tuple]) -> "FinPoset":
        """Poset whose order is the reflexive-transitive closure of ``relation``."""
        elements = tuple(elements)
        idx = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        mat = np.eye(n, dtype=bool)
        for a, b in relation:
            mat[idx[a], idx[b]] = True
        for k in range(n):
            mat |= np.outer(mat[:, k], mat[k, :])
        return cls(elements, mat)

    # -- basic queries -------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator:
        return iter(self.elements)

    def __contains__(self, item) -> bool:
        return item in self.index

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinPoset):
            return NotImplemented
        if set(self.elements) != set(other.elements):
            return False
        perm = [other.index[e] for e in self.elements]
        return bool((other.matrix[np.ix_(perm, perm)] == self.matrix).all())

    def __hash__(self) -> int:
        return hash((frozenset(self.elements), frozenset(self.pairs())))

    def __repr__(self) -> str:
        return f"FinPoset({len(self)} elements, {len(self.covers())} covers)"

    def leq(self, a, b) -> bool:
        return bool(self.matrix[self.index[a], self.index[b]])

    def pairs(self) -> list[tuple]:
        return [(self.elements[i], self.elements[j]) for i, j in np.argwhere(self.matrix)]

    @cached_property
    def down_masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << int(i) for i in np.flatnonzero(self.matrix[:, j])) for j in range(len(self)))

    @cached_property
    def up_masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << int(j) for j in np.flatnonzero(self.matrix[i, :])) for i in range(len(self)))

    def down(self, a) -> frozenset:
        return self.mask_to_set(self.down_masks[self.index[a]])

    def up(self, a) -> frozenset:
        return self.mask_to_set(self.up_masks[self.index[a]])

    def mask_to_set(self, mask: int) -> frozenset:
        return frozenset(self.elements[i] for i in _bits(mask))

    def set_to_mask(self, subset: Iterable) -> int:
        return sum(1 << self.index[e] for e in set(subset))

    def covers(self) -> list[tuple]:
        """Hasse diagram edges ``(a, b)`` with ``b`` covering ``a``."""
        return list(self._covers)

    @cached_property
    def _covers(self) -> tuple:
        lt = self.matrix.copy()
        np.fill_diagonal(lt, False)
        between = (lt.astype(np.int64) @ lt.astype(np.int64)) > 0
        return tuple((self.elements[i], self.elements[j]) for i, j in np.argwhere(lt & ~between))

    def lower_covers(self, a) -> list:
        return [x for x, y in self.covers() if y == a]

    def minimal(self) -> list:
        return [e for i, e in enumerate(self.elements) if self.matrix[:, i].sum() == 1]

    def maximal(self) -> list:
        return [e for i, e in enumerate(self.elements) if self.matrix[i, :].sum() == 1]

    def is_downset(self, subset: Iterable) -> bool:
        mask = self.set_to_mask(subset)
        return all(self.down_masks[i] & ~mask == 0 for i in _bits(mask))

    def is_upset(self, subset: Iterable) -> bool:
        mask = self.set_to_mask(subset)
        return all(self.up_masks[i] & ~mask == 0 for i in _bits(mask))

    def linear_extension(self) -> list[int]:
        """Indices sorted so that every element follows everything below it."""
        return sorted(range(len(self)), key=lambda i: (int(self.matrix[:, i].sum()), i))

    def downset_masks(self) -> list[int]:
        """All down-closed subsets as bitmasks, in a deterministic order."""
        order = self.linear_extension()
        strict_down = [self.down_masks[i] & ~(1 << i) for i in range(len(self))]
        out: list[int] = []

        def rec(k: int, mask: int):
            if k == len(order):
                out.append(mask)
                return
            i = order[k]
            rec(k + 1, mask)
            if strict_down[i] & ~mask == 0:
                rec(k + 1, mask | (1 << i))

        rec(0, 0)
        return sorted(out, key=lambda m: (bin(m).count("1"), m))

    def upset_masks(self) -> list[int]:
        return self.dual().downset_masks()

    def dual(self) -> "FinPoset":
        """The opposite order."""
        return FinPoset(self.elements, self.matrix.T)

    def subposet(self, elements: Iterable) -> "FinPoset":
        wanted = set(elements)
        keep = [e for e in self.elements if e in wanted]
        idx = [self.index[e] for e in keep]
        return FinPoset(keep, self.matrix[np.ix_(idx, idx)])

    def relabel(self, mapping: Mapping | Callable) -> "FinPoset":
        f = mapping if callable(mapping) else mapping.__getitem__
        return FinPoset([f(e) for e in self.elements], self.matrix)

    def successor_sets(self) -> list[frozenset]:
        return [frozenset(int(j) for j in np.flatnonzero(self.matrix[i])) for i in range(len(self))]

    # -- serialisation -------------------------------------------------

    def to_json(self) -> dict:
        return {
            "elements": [_jsonable(e) for e in self.elements],
            "leq": [[_jsonable(a), _jsonable(b)] for a, b in self.covers()],
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "FinPoset":
        if isinstance(data, str):
            data = json.loads(data)
        elements = [_hashable(e) for e in data["elements"]]
        return cls.generated(elements, [(_hashable(a), _hashable(b)) for a, b in data["leq"]])

    def to_dot(self, name: str = "P") -> str:
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for i, e in enumerate(self.elements):
            lines.append(f'  n{i} [label="{_label(e)}"];')
        for a, b in self.covers():
            lines.append(f"  n{self.index[a]} -> n{self.index[b]};")
        lines.append("}")
        return "\n".join(lines)


def _jsonable(x):
    if isinstance(x, (frozenset, set)):
        return sorted((_jsonable(y) for y in x), key=repr)
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    return x


def _hashable(x):
    if isinstance(x, list):
        return tuple(_hashable(y) for y in x)
    return x


def _label(x) -> str:
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(_label(y) for y in x)) + "}"
    if isinstance(x, tuple):
        return "(" + ",".join(_label(y) for y in x) + ")"
    return str(x).replace('"', "'")


# -- isomorphism ------------------------------------------------------


def poset_canonical_form(P: FinPoset, element_cap: int = iso.DEFAULT_ELEMENT_CAP) -> tuple:
    return iso.canonical_form(len(P), [P.successor_sets()], element_cap=element_cap)


def poset_isomorphism(P: FinPoset, Q: FinPoset) -> dict | None:
    """An order isomorphism ``P -> Q`` as a dict, or None."""
    if len(P) != len(Q):
        return None
    f = iso.find_isomorphism(len(P), [P.successor_sets()], [Q.successor_sets()])
    if f is None:
        return None
    return {P.elements[i]: Q.elements[f[i]] for i in range(len(P))}


def is_isomorphic(a, b) -> bool:
    return poset_isomorphism(_poset_of(a), _poset_of(b)) is not None


def _poset_of(x) -> FinPoset:
    if isinstance(x, FinPoset):
        return x
    if isinstance(x, FinBoolAlg):
        return x.lattice.carrier
    if isinstance(x, FinDistLattice):
        return x.carrier
    raise TypeError(f"not an ordered structure: {type(x).__name__}")


def enumerate_posets(n: int) -> list[FinPoset]:
    """One poset per isomorphism class on ``n`` elements labelled ``0..n-1``."""
    if n == 0:
        return [FinPoset([], [])]
    reps: dict[tuple, FinPoset] = {}
    for P in enumerate_posets(n - 1):
        for mask in P.downset_masks():
            new = n - 1
            mat = np.zeros((n, n), dtype=bool)
            mat[: n - 1, : n - 1] = P.matrix
            mat[new, new] = True
            for i in _bits(mask):
                mat[i, new] = True
            Q = FinPoset(range(n), mat)
            reps.setdefault(poset_canonical_form(Q), Q)
    return list(reps.values())


# -- lattices ----------------------------------------------------------


class FinDistLattice:
    """Finite bounded distributive lattice with explicit meet/join tables.

    ``meet`` and ``join`` may be callables on labels or ``n x n`` index
    tables.  All axioms are verified on construction unless ``check=False``
    (used only by builders that guarantee them).
    """

    def __init__(self, carrier: FinPoset, meet, join, bottom, top, *, check: bool = True):
        self.carrier = carrier
        n = len(carrier)
        self.meet_table = self._table(meet)
        self.join_table = self._table(join)
        if n == 0:
            raise InvalidStructure("a bounded lattice has at least one element")
        self.bottom = bottom
        self.top = top
        self._bot = carrier.index[bottom]
        self._top = carrier.index[top]
        if check:
            self._check()

    def _table(self, op) -> np.ndarray:
        n = len(self.carrier)
        if callable(op):
            els, idx = self.carrier.elements, self.carrier.index
            tab = np.array([[idx[op(a, b)] for b in els] for a in els], dtype=np.int64).reshape(n, n)
        else:
            tab = np.array(op, dtype=np.int64).reshape(n, n)
        tab.flags.writeable = False
        return tab

    def _check(self) -> None:
        M, J, leq = self.meet_table, self.join_table, self.carrier.matrix
        n = len(self.carrier)
        ar = np.arange(n)
        if ((M < 0) | (M >= n) | (J < 0) | (J >= n)).any():
            raise InvalidStructure("operation tables leave the carrier")
        if not ((M == ar[:, None]) == leq).all():
            raise InvalidStructure("meet disagrees with the order (a <= b iff a ^ b = a)")
        if not ((J == ar[None, :]) == leq).all():
            raise InvalidStructure("join disagrees with the order (a <= b iff a v b = b)")
        for T, name in ((M, "meet"), (J, "join")):
            if not (T == T.T).all():
                raise InvalidStructure(f"{name} is not commutative")
            if not (T[T] == T[ar[:, None, None], T[None, :, :]]).all():
                raise InvalidStructure(f"{name} is not associative")
        if not (M[ar[:, None], J] == ar[:, None]).all():
            raise InvalidStructure("absorption a ^ (a v b) = a fails")
        if not (leq[self._bot, :].all() and leq[:, self._top].all()):
            raise InvalidStructure("declared bounds are not the least/greatest elements")
        lhs = M[ar[:, None, None], J[None, :, :]]
        rhs = J[M[:, :, None], M[:, None, :]]
        if not (lhs == rhs).all():
            a, b, c = map(int, np.argwhere(lhs != rhs)[0])
            e = self.carrier.elements
            raise InvalidStructure(f"not distributive at ({e[a]!r}, {e[b]!r}, {e[c]!r})")

    @classmethod
    def from_poset(cls, P: FinPoset, *, check: bool = True) -> "FinDistLattice":
        """Lattice whose meets and joins are the glbs and lubs of ``P``."""
        n = len(P)
        if n == 0:
            raise InvalidStructure("empty poset is not a lattice")
        leq = P.matrix
        meet = np.empty((n, n), dtype=np.int64)
        join = np.empty((n, n), dtype=np.int64)
        for a in range(n):
            for b in range(a, n):
                lower = np.flatnonzero(leq[:, a] & leq[:, b])
                upper = np.flatnonzero(leq[a, :] & leq[b, :])
                glb = [x for x in lower if leq[lower, x].all()]
                lub = [x for x in upper if leq[x, upper].all()]
                if not glb or not lub:
                    raise InvalidStructure(f"{P.elements[a]!r} and {P.elements[b]!r} lack a meet or join")
                meet[a, b] = meet[b, a] = glb[0]
                join[a, b] = join[b, a] = lub[0]
        bottoms = [e for e in P.elements if all(P.leq(e, x) for x in P.elements)]
        tops = [e for e in P.elements if all(P.leq(x, e) for x in P.elements)]
        return cls(P, meet, join, bottoms[0], tops[0], check=check)

    @classmethod
    def from_sets(cls, family: Iterable[frozenset], labels: Sequence | None = None, *, check: bool = False) -> "FinDistLattice":
        """Lattice of a family of sets closed under union and intersection."""
        sets = list(dict.fromkeys(frozenset(s) for s in family))
        index = {s: i for i, s in enumerate(sets)}
        n = len(sets)
        els = list(labels) if labels is not None else sets
        leq = np.array([[a <= b for b in sets] for a in sets], dtype=bool).reshape(n, n)
        try:
            meet = [[index[a & b] for b in sets] for a in sets]
            join = [[index[a | b] for b in sets] for a in sets]
        except KeyError:
            raise InvalidStructure("family is not closed under union and intersection") from None
        bottom = els[index[reduce(frozenset.__and__, sets)]]
        top = els[index[reduce(frozenset.__or__, sets)]]
        return cls(FinPoset(els, leq), meet, join, bottom, top, check=check)

    def __len__(self) -> int:
        return len(self.carrier)

    def __iter__(self):
        return iter(self.carrier.elements)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({len(self)} elements)"

    @property
    def elements(self) -> tuple:
        return self.carrier.elements

    def meet(self, a, b):
        idx = self.carrier.index
        return self.carrier.elements[self.meet_table[idx[a], idx[b]]]

    def join(self, a, b):
        idx = self.carrier.index
        return self.carrier.elements[self.join_table[idx[a], idx[b]]]

    def meet_all(self, items: Iterable):
        return reduce(self.meet, items, self.top)

    def join_all(self, items: Iterable):
        return reduce(self.join, items, self.bottom)

    def leq(self, a, b) -> bool:
        return self.carrier.leq(a, b)

    def is_sublattice(self, subset: Iterable) -> bool:
        K = set(subset)
        if self.bottom not in K or self.top not in K:
            return False
        return all(self.meet(a, b) in K and self.join(a, b) in K for a in K for b in K)

    def sublattice(self, subset: Iterable) -> "FinDistLattice":
        K = set(subset)
        if not self.is_sublattice(K):
            raise NotASublattice("subset is not a bounded sublattice")
        P = self.carrier.subposet(K)
        return FinDistLattice(P, self.meet, self.join, self.bottom, self.top, check=False)

    def to_json(self) -> dict:
        return self.carrier.to_json()

    def to_dot(self, name: str = "L") -> str:
        return self.carrier.to_dot(name)


class FinBoolAlg:
    """Finite Boolean algebra: a distributive lattice with a complement."""

    def __init__(self, lattice: FinDistLattice, complement: Callable | Mapping, *, check: bool = True):
        self.lattice = lattice
        comp = complement if callable(complement) else complement.__getitem__
        self._comp = {a: comp(a) for a in lattice.elements}
        if check:
            L = lattice
            for a in L.elements:
                c = self._comp[a]
                if self._comp.get(c) != a:
                    raise InvalidStructure(f"complement is not an involution at {a!r}")
                if L.meet(a, c) != L.bottom or L.join(a, c) != L.top:
                    raise InvalidStructure(f"{c!r} is not a complement of {a!r}")
            ats = self.atoms()
            for a in L.elements:
                if L.join_all(x for x in ats if L.leq(x, a)) != a:
                    raise InvalidStructure(f"{a!r} is not the join of the atoms below it")

    @classmethod
    def from_lattice(cls, L: FinDistLattice) -> "FinBoolAlg":
        comp = {}
        for a in L.elements:
            cands = [c for c in L.elements if L.meet(a, c) == L.bottom and L.join(a, c) == L.top]
            if not cands:
                raise InvalidStructure(f"{a!r} has no complement")
            comp[a] = cands[0]
        return cls(L, comp)

    def __len__(self) -> int:
        return len(self.lattice)

    def __iter__(self):
        return iter(self.lattice.elements)

    def __repr__(self) -> str:
        return f"FinBoolAlg({len(self)} elements)"

    @property
    def elements(self) -> tuple:
        return self.lattice.elements

    @property
    def bottom(self):
        return self.lattice.bottom

    @property
    def top(self):
        return self.lattice.top

    def meet(self, a, b):
        return self.lattice.meet(a, b)

    def join(self, a, b):
        return self.lattice.join(a, b)

    def complement(self, a):
        return self._comp[a]

    def leq(self, a, b) -> bool:
        return self.lattice.leq(a, b)

    def atoms(self) -> list:
        L = self.lattice
        return [a for a in L.elements if a != L.bottom and L.carrier.lower_covers(a) == [L.bottom]]


def powerset_algebra(points: Iterable[Hashable]) -> FinBoolAlg:
    """Boolean algebra of all subsets of ``points`` (elements are frozensets)."""
    pts = tuple(points)
    family = [frozenset(c) for r in range(len(pts) + 1) for c in itertools.combinations(pts, r)]
    L = FinDistLattice.from_sets(family)
    full = frozenset(pts)
    return FinBoolAlg(L, lambda a: full - a, check=False)


def chain_lattice(n: int) -> FinDistLattice:
    """The ``n``-element chain ``0 < 1 < ... < n-1``."""
    P = FinPoset(range(n), [(i, j) for i in range(n) for j in range(i, n)])
    return FinDistLattice.from_poset(P)


# -- operations ----------------------------------------------------------


def downset_lattice(P: FinPoset) -> FinDistLattice:
    """The distributive lattice of down-closed subsets of ``P`` (frozensets)."""
    family = [P.mask_to_set(m) for m in P.downset_masks()]
    return FinDistLattice.from_sets(family)


def upset_lattice(P: FinPoset) -> FinDistLattice:
    family = [P.mask_to_set(m) for m in P.upset_masks()]
    return FinDistLattice.from_sets(family)


def join_irreducibles(L: FinDistLattice | FinBoolAlg) -> FinPoset:
    """Subposet of elements with exactly one lower cover."""
    if isinstance(L, FinBoolAlg):
        L = L.lattice
    P = L.carrier
    count: dict = {}
    for a, b in P.covers():
        count[b] = count.get(b, 0) + 1
    return P.subposet([e for e in P.elements if count.get(e, 0) == 1])


def meet_irreducibles(L: FinDistLattice) -> FinPoset:
    P = L.carrier
    count: dict = {}
    for a, b in P.covers():
        count[a] = count.get(a, 0) + 1
    return P.subposet([e for e in P.elements if count.get(e, 0) == 1])


def filters(L: FinDistLattice | FinBoolAlg) -> FinPoset:
    """All filters of ``L`` as frozensets, ordered by reverse inclusion.

    In a finite lattice every filter is principal, so these are the up-sets
    of single elements.
    """
    if isinstance(L, FinBoolAlg):
        L = L.lattice
    P = L.carrier
    fs = [P.up(a) for a in P.elements]
    return FinPoset(fs, [(F, G) for F in fs for G in fs if G <= F])


def atoms(B: FinBoolAlg) -> frozenset:
    return frozenset(B.atoms())


class MonotoneMap:
    """A total order-preserving map between two ordered structures.

    ``source`` and ``target`` may be posets, lattices or Boolean algebras; in
    the latter cases the map is a candidate lattice map (see
    :func:`is_homomorphism`).
    """

    def __init__(self, source, target, mapping: Mapping | Callable, *, check: bool = True):
        self.source = source
        self.target = target
        P, Q = _poset_of(source), _poset_of(target)
        f = mapping if callable(mapping) else mapping.__getitem__
        self.mapping = {a: f(a) for a in P.elements}
        if check:
            for a, b in self.mapping.items():
                if b not in Q:
                    raise InvalidStructure(f"image {b!r} of {a!r} is not in the target")
            for a, b in P.pairs():
                if not Q.leq(self.mapping[a], self.mapping[b]):
                    raise InvalidStructure(f"map is not monotone on {a!r} <= {b!r}")

    def __call__(self, a):
        return self.mapping[a]

    def __repr__(self) -> str:
        return f"MonotoneMap({len(self.mapping)} points)"

    def __eq__(self, other) -> bool:
        return isinstance(other, MonotoneMap) and self.mapping == other.mapping

    def __hash__(self):
        return hash(frozenset(self.mapping.items()))

    def compose(self, after: "MonotoneMap") -> "MonotoneMap":
        """``after ∘ self``."""
        return MonotoneMap(self.source, after.target, lambda a: after(self(a)), check=False)

    def is_injective(self) -> bool:
        return len(set(self.mapping.values())) == len(self.mapping)


LatticeMap = MonotoneMap


class HomCheck(NamedTuple):
    ok: bool
    witness: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_homomorphism(f: MonotoneMap) -> HomCheck:
    """Check that ``f`` preserves meets, joins, bounds (and complements)."""
    S, T = f.source, f.target
    LS = S.lattice if isinstance(S, FinBoolAlg) else S
    LT = T.lattice if isinstance(T, FinBoolAlg) else T
    if f(LS.bottom) != LT.bottom:
        return HomCheck(False, f"h(0) = {f(LS.bottom)!r} != 0")
    if f(LS.top) != LT.top:
        return HomCheck(False, f"h(1) = {f(LS.top)!r} != 1")
    for a in LS.elements:
        for b in LS.elements:
            if f(LS.meet(a, b)) != LT.meet(f(a), f(b)):
                return HomCheck(False, f"h({a!r} ^ {b!r}) != h({a!r}) ^ h({b!r})")
            if f(LS.join(a, b)) != LT.join(f(a), f(b)):
                return HomCheck(False, f"h({a!r} v {b!r}) != h({a!r}) v h({b!r})")
    if isinstance(S, FinBoolAlg) and isinstance(T, FinBoolAlg):
        for a in S.elements:
            if f(S.complement(a)) != T.complement(f(a)):
                return HomCheck(False, f"h(~{a!r}) != ~h({a!r})")
    return HomCheck(True)


def lower_adjoint(f: MonotoneMap) -> MonotoneMap | None:
    """The map ``g`` with ``g(y) <= x  iff  y <= f(x)``, if it exists."""
    P, Q = _poset_of(f.source), _poset_of(f.target)
    out = {}
    for y in Q.elements:
        U = [x for x in P.elements if Q.leq(y, f(x))]
        least = [x for x in U if all(P.leq(x, z) for z in U)]
        if not least:
            return None
        out[y] = least[0]
    return MonotoneMap(f.target, f.source, out, check=False)


def upper_adjoint(f: MonotoneMap) -> MonotoneMap | None:
    """The map ``g`` with ``f(x) <= y  iff  x <= g(y)``, if it exists."""
    P, Q = _poset_of(f.source), _poset_of(f.target)
    out = {}
    for y in Q.elements:
        D = [x for x in P.elements if Q.leq(f(x), y)]
        greatest = [x for x in D if all(P.leq(z, x) for z in D)]
        if not greatest:
            return None
        out[y] = greatest[0]
    return MonotoneMap(f.target, f.source, out, check=False)


def is_adjoint_pair(f: MonotoneMap, g: MonotoneMap) -> bool:
    """``f`` is lower adjoint to ``g``: ``f(x) <= y  iff  x <= g(y)``."""
    P, Q = _poset_of(f.source), _poset_of(f.target)
    return all(
        Q.leq(f(x), y) == P.leq(x, g(y)) for x in P.elements for y in Q.elements
    )


def monotone_maps(P: FinPoset, Q: FinPoset, *, cap: int = 1 << 20) -> list[dict]:
    """Every monotone map ``P -> Q`` as a dict, by backtracking along a linear extension."""
    order = [P.elements[i] for i in P.linear_extension()]
    out: list[dict] = []
    current: dict = {}

    def rec(k: int):
        if k == len(order):
            out.append(dict(current))
            if len(out) > cap:
                raise CapExceeded("monotone maps", len(out), cap)
            return
        a = order[k]
        below = [x for x in order[:k] if P.leq(x, a)]
        for b in Q.elements:
            if all(Q.leq(current[x], b) for x in below):
                current[a] = b
                rec(k + 1)
                del current[a]

    rec(0)
    return out


def map_poset(P: FinPoset, Q: FinPoset, maps: Sequence[dict] | None = None) -> FinPoset:
    """The monotone maps ``P -> Q`` under the pointwise order.

    Each map is labelled by the tuple of its values along ``P.elements``.
    """
    if maps is None:
        maps = monotone_maps(P, Q)
    labels = [tuple(m[a] for a in P.elements) for m in maps]
    qidx = Q.index
    vals = np.array([[qidx[v] for v in lab] for lab in labels], dtype=np.int64).reshape(len(labels), len(P))
    k = len(labels)
    mat = np.ones((k, k), dtype=bool)
    for j in range(len(P)):
        mat &= Q.matrix[vals[:, j][:, None], vals[:, j][None, :]]
    return FinPoset(labels, mat)
