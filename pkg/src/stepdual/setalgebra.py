"""Boolean algebras of subsets of a finite universe, stored by their atoms.

A Boolean subalgebra of a finite powerset is determined by the partition of
the universe into its atoms; elements are unions of atoms.  This keeps
algebras with thousands of elements cheap: nothing is materialised until
:meth:`SetAlgebra.elements` or :meth:`SetAlgebra.to_fin_bool_alg` is called.
"""

from __future__ import annotations

import itertools
from typing import Hashable, Iterable, Iterator

from .errors import CapExceeded, InvalidStructure
from .order import FinBoolAlg, FinDistLattice


class SetAlgebra:
    """The Boolean subalgebra of ``P(universe)`` with the given atoms."""

    def __init__(self, universe: Iterable[Hashable], atoms: Iterable[Iterable[Hashable]]):
        self.universe = tuple(universe)
        self.full = frozenset(self.universe)
        blocks = [frozenset(a) for a in atoms]
        self._atom_of: dict = {}
        for k, block in enumerate(blocks):
            if not block:
                raise InvalidStructure("atoms must be nonempty")
            for x in block:
                if x in self._atom_of:
                    raise InvalidStructure(f"point {x!r} lies in two atoms")
                self._atom_of[x] = k
        if set(self._atom_of) != set(self.full):
            raise InvalidStructure("atoms must partition the universe")
        # canonical atom order: by first appearance in the universe
        pos = {x: i for i, x in enumerate(self.universe)}
        first = {k: min(pos[x] for x in b) for k, b in enumerate(blocks)}
        self.atoms = tuple(blocks[k] for k in sorted(first, key=first.get))
        self._atom_of = {x: k for k, b in enumerate(self.atoms) for x in b}

    @classmethod
    def powerset(cls, universe: Iterable[Hashable]) -> "SetAlgebra":
        u = tuple(universe)
        return cls(u, [[x] for x in u])

    @classmethod
    def generated(cls, universe: Iterable[Hashable], generators: Iterable[Iterable[Hashable]]) -> "SetAlgebra":
        """Smallest Boolean subalgebra containing the generator sets.

        Its atoms are the nonempty classes of points sharing the same
        membership pattern across all generators.
        """
        u = tuple(universe)
        gens = [frozenset(g) for g in generators]
        full = frozenset(u)
        for g in gens:
            if not g <= full:
                raise InvalidStructure("generator is not a subset of the universe")
        classes: dict[tuple, list] = {}
        for x in u:
            classes.setdefault(tuple(x in g for g in gens), []).append(x)
        return cls(u, classes.values())

    def __len__(self) -> int:
        return 1 << len(self.atoms)

    def __repr__(self) -> str:
        return f"SetAlgebra({len(self.universe)} points, {len(self.atoms)} atoms)"

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetAlgebra):
            return NotImplemented
        return self.full == other.full and set(self.atoms) == set(other.atoms)

    def __hash__(self) -> int:
        return hash(frozenset(self.atoms))

    @property
    def bottom(self) -> frozenset:
        return frozenset()

    @property
    def top(self) -> frozenset:
        return self.full

    def __contains__(self, subset) -> bool:
        s = frozenset(subset)
        if not s <= self.full:
            return False
        return all(a <= s or not (a & s) for a in self.atoms)

    def atom_index(self, point) -> int:
        return self._atom_of[point]

    def atom_of(self, point) -> frozenset:
        return self.atoms[self._atom_of[point]]

    def hat(self, element: Iterable) -> frozenset:
        """Indices of the atoms below ``element`` (its clopen in the dual space)."""
        s = frozenset(element)
        if s not in self:
            raise InvalidStructure("set is not an element of this algebra")
        return frozenset(self._atom_of[x] for x in s)

    def from_hat(self, atom_indices: Iterable[int]) -> frozenset:
        return frozenset().union(*(self.atoms[k] for k in atom_indices))

    def complement(self, element: Iterable) -> frozenset:
        return self.full - frozenset(element)

    def elements(self) -> Iterator[frozenset]:
        """All elements, smallest atom-count first."""
        k = len(self.atoms)
        for r in range(k + 1):
            for combo in itertools.combinations(range(k), r):
                yield self.from_hat(combo)

    def is_subalgebra_of(self, other: "SetAlgebra") -> bool:
        return self.full == other.full and all(a in other for a in self.atoms)

    def partition(self) -> frozenset:
        return frozenset(self.atoms)

    def to_fin_bool_alg(self, cap: int = 1 << 10) -> FinBoolAlg:
        """Materialise as a table-based :class:`FinBoolAlg` (elements are frozensets)."""
        if len(self) > cap:
            raise CapExceeded("Boolean algebra elements", len(self), cap)
        L = FinDistLattice.from_sets(list(self.elements()))
        return FinBoolAlg(L, self.complement, check=False)

