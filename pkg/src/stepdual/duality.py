"""Finite dual spaces, hyperspaces and the presented lattices dual to them.

At finite scale a spectral space is just a finite poset, so *closed* means
any subset (in the discrete, Boolean case), *compact saturated* means
up-set, and *continuous* means monotone.  Dual spaces of distributive
lattices are presented by their join-irreducibles in the lattice order.

Hyperspace and function-space constructions come with the presentations
whose admissible points realise them (:func:`f_box`, :func:`f_arrow`,
:func:`f_arrow_at_primes`), so both sides can be computed independently and
compared.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, NamedTuple

from .errors import CapExceeded, InvalidStructure, NotASublattice
from .order import (
    FinBoolAlg,
    FinDistLattice,
    FinPoset,
    MonotoneMap,
    is_adjoint_pair,
    is_homomorphism,
    join_irreducibles,
    powerset_algebra,
)
from .presented import (
    BOT,
    DEFAULT_POINT_CAP,
    Presentation,
    PresentedLattice,
    gen,
    join,
    leq,
    meet,
    quotient,
)

# largest index lattice whose subsets are expanded into relation instances
MAX_SCHEME_BASE = 16


@dataclass(frozen=True)
class FinSpace:
    """A finite spectral space, given by its specialisation poset."""

    poset: FinPoset

    @property
    def points(self) -> tuple:
        return self.poset.elements

    @property
    def order(self) -> FinPoset:
        return self.poset

    @property
    def discrete(self) -> bool:
        P = self.poset
        return all(a == b for a, b in P.pairs())

    def __len__(self) -> int:
        return len(self.poset)

    def __iter__(self):
        return iter(self.poset.elements)

    @classmethod
    def discrete_on(cls, points: Iterable[Hashable]) -> "FinSpace":
        pts = tuple(points)
        return cls(FinPoset(pts, [(p, p) for p in pts]))

    def to_json(self) -> dict:
        return self.poset.to_json()

    def to_dot(self, name: str = "X") -> str:
        return self.poset.to_dot(name)


def _lattice(L):
    return L.lattice if isinstance(L, FinBoolAlg) else L


# -- Stone and Birkhoff duals --------------------------------------------


def dual_ba(B: FinBoolAlg) -> tuple[FinSpace, dict]:
    """Discrete space of atoms and the clopen map ``a -> atoms below a``."""
    ats = B.atoms()
    hat = {a: frozenset(x for x in ats if B.leq(x, a)) for a in B.elements}
    return FinSpace.discrete_on(ats), hat


def dual_dl(L: FinDistLattice | FinBoolAlg) -> FinSpace:
    """The join-irreducibles of ``L`` in the lattice order."""
    return FinSpace(join_irreducibles(L))


def clopen_algebra(X: FinSpace) -> FinBoolAlg:
    """All subsets of a discrete space."""
    if not X.discrete:
        raise InvalidStructure("clopen algebra requires a discrete space")
    return powerset_algebra(X.points)


# -- Vietoris, MA and Smyth ----------------------------------------------


def _subsets(items: tuple) -> list[frozenset]:
    return [frozenset(c) for r in range(len(items) + 1) for c in itertools.combinations(items, r)]


def vietoris(X: FinSpace, cap: int = DEFAULT_POINT_CAP) -> FinSpace:
    """All subsets of a finite discrete space, as a discrete space."""
    if not X.discrete:
        raise InvalidStructure("the Vietoris space is built here for discrete spaces only")
    if 1 << len(X) > cap:
        raise CapExceeded("Vietoris points", 1 << len(X), cap)
    return FinSpace.discrete_on(_subsets(X.points))


def vietoris_map(f: Mapping | Callable, X: FinSpace, Y: FinSpace) -> dict:
    """Forward-image map ``V(X) -> V(Y)`` induced by ``f: X -> Y``."""
    fn = f if callable(f) else f.__getitem__
    out = {}
    for C in vietoris(X).points:
        image = frozenset(fn(x) for x in C)
        if not image <= frozenset(Y.points):
            raise InvalidStructure("map leaves the target space")
        out[C] = image
    return out


def smyth(X: FinSpace) -> FinSpace:
    """Up-sets of ``X`` (including the empty one) under reverse inclusion."""
    P = X.poset
    ups = [P.mask_to_set(m) for m in P.upset_masks()]
    return FinSpace(FinPoset(ups, [(U, V) for U in ups for V in ups if V <= U]))


@dataclass(frozen=True)
class DiamondAlgebra:
    """``MA(B)`` together with the generator map ``a -> dia a`` on ``B``.

    Elements of ``algebra`` are sets of points of the Vietoris space of the
    atoms of ``source``.
    """

    source: FinBoolAlg
    algebra: FinBoolAlg
    diamond: Mapping

    def __call__(self, a):
        return self.diamond[a]

    def equation_failures(self) -> list[str]:
        """Violations of ``dia 0 = 0`` and ``dia(a v b) = dia a v dia b``."""
        B, M = self.source, self.algebra
        out = []
        if self.diamond[B.bottom] != M.bottom:
            out.append("dia 0 != 0")
        for a in B.elements:
            for b in B.elements:
                if self.diamond[B.join(a, b)] != M.join(self.diamond[a], self.diamond[b]):
                    out.append(f"dia({a!r} v {b!r}) != dia {a!r} v dia {b!r}")
        return out


def ma_functor(B: FinBoolAlg, cap: int = 1 << 12) -> DiamondAlgebra:
    """``MA(B)`` as the powerset of the Vietoris space of ``dual_ba(B)``."""
    X, hat = dual_ba(B)
    V = vietoris(X)
    if 1 << len(V) > cap:
        raise CapExceeded("MA elements", 1 << len(V), cap)
    M = powerset_algebra(V.points)
    dia = {a: frozenset(C for C in V.points if C & hat[a]) for a in B.elements}
    return DiamondAlgebra(B, M, dia)


def ma_presentation(B: FinBoolAlg) -> Presentation:
    """Boolean presentation on generators ``("dia", a)`` with the rank-1 equations."""
    els = B.elements
    gens = tuple(("dia", a) for a in els)
    rels = [(gen(("dia", B.bottom)), BOT)]
    for a, b in itertools.combinations_with_replacement(els, 2):
        rels.append((gen(("dia", B.join(a, b))), join(gen(("dia", a)), gen(("dia", b)))))
    return Presentation(gens, rels, "BA")


def atom_map(h: MonotoneMap) -> dict:
    """Dual of a Boolean homomorphism ``h: B -> C``: each atom of C to the atom of B it lies under."""
    B, C = h.source, h.target
    out = {}
    for y in C.atoms():
        below = [x for x in B.atoms() if C.leq(y, h(x))]
        if len(below) != 1:
            raise InvalidStructure("map is not a Boolean homomorphism")
        out[y] = below[0]
    return out


def ma_map(h: MonotoneMap, MB: DiamondAlgebra, MC: DiamondAlgebra) -> dict:
    """``MA(h): MA(B) -> MA(C)``, computed as preimage along ``V`` of the dual of ``h``."""
    dual = atom_map(h)
    back = {Cset: frozenset(dual[y] for y in Cset) for Cset in _subsets(tuple(MC.source.atoms()))}
    return {U: frozenset(Cset for Cset, image in back.items() if image in U) for U in MB.algebra.elements}


# -- presentations dual to Smyth and function spaces ---------------------


def _index_subsets(L: FinDistLattice, expansion: str):
    els = L.elements
    if expansion == "binary":
        return [()] + list(itertools.combinations(els, 2))
    if expansion != "full":
        raise ValueError("expansion must be 'full' or 'binary'")
    if len(els) > MAX_SCHEME_BASE:
        raise CapExceeded("relation scheme base", len(els), MAX_SCHEME_BASE)
    return [c for r in range(len(els) + 1) for c in itertools.combinations(els, r)]


def _top_down(L: FinDistLattice) -> list:
    """Elements of ``L`` ordered so that each comes before everything below it."""
    P = L.carrier
    return [P.elements[i] for i in reversed(P.linear_extension())]


def f_box_presentation(L: FinDistLattice, expansion: str = "full") -> Presentation:
    L = _lattice(L)
    gens = tuple(("box", a) for a in _top_down(L))
    rels = []
    for G in _index_subsets(L, expansion):
        rels.append((gen(("box", L.meet_all(G))), meet(*(gen(("box", a)) for a in G))))
    return Presentation(gens, rels, "DL")


def f_box(L: FinDistLattice, expansion: str = "full", cap: int = DEFAULT_POINT_CAP) -> PresentedLattice:
    """``F_box(L)``: free DL on ``box a`` modulo ``box(meet G) = meet box G``.

    ``expansion="full"`` imposes the scheme for every ``G``; ``"binary"``
    only for ``|G|`` in ``{0, 2}``.
    """
    return quotient(f_box_presentation(L, expansion), cap)


def _arrow(a, b) -> tuple:
    return gen(("to", a, b))


def f_arrow_presentation(L: FinDistLattice, M: FinDistLattice, expansion: str = "full") -> Presentation:
    L, M = _lattice(L), _lattice(M)
    left = list(reversed(_top_down(L)))
    right = _top_down(M)
    gens = tuple(("to", a, b) for a in left for b in right)
    rels = []
    for a in L.elements:
        for G in _index_subsets(M, expansion):
            rels.append((_arrow(a, M.meet_all(G)), meet(*(_arrow(a, b) for b in G))))
    for F in _index_subsets(L, expansion):
        for b in M.elements:
            rels.append((_arrow(L.join_all(F), b), meet(*(_arrow(a, b) for a in F))))
    return Presentation(gens, rels, "DL")


def f_arrow(L: FinDistLattice, M: FinDistLattice, expansion: str = "full", cap: int = DEFAULT_POINT_CAP) -> PresentedLattice:
    """``F_to(L x M)``: free DL on ``a -> b`` modulo the meet and join-to-meet schemes."""
    return quotient(f_arrow_presentation(L, M, expansion), cap)


def f_arrow_at_primes(L: FinDistLattice, M: FinDistLattice, expansion: str = "full", cap: int = DEFAULT_POINT_CAP) -> PresentedLattice:
    """Quotient of :func:`f_arrow` by ``p -> join G = join {p -> b}`` at join-primes ``p``."""
    L, M = _lattice(L), _lattice(M)
    pres = f_arrow_presentation(L, M, expansion)
    extra = []
    for p in join_irreducibles(L).elements:
        for G in _index_subsets(M, expansion):
            extra.append((_arrow(p, M.join_all(G)), join(*(_arrow(p, b) for b in G))))
    return quotient(pres.extended(extra), cap)


def arrow_point_to_map(point: frozenset, L: FinDistLattice, M: FinDistLattice) -> dict:
    """Read an admissible point of :func:`f_arrow` as a map ``J(L) -> up-sets of J(M)``.

    A point is a set of generators ``a -> b``; for a join-prime ``p`` the
    set ``{b | p -> b}`` is a filter of ``M``, sent to the join-primes of
    ``M`` outside its generator (the up-set it determines).
    """
    L, M = _lattice(L), _lattice(M)
    JM = join_irreducibles(M).elements
    out = {}
    for p in join_irreducibles(L).elements:
        filt = [b for b in M.elements if ("to", p, b) in point]
        m = M.meet_all(filt)
        out[p] = frozenset(q for q in JM if not M.leq(q, m))
    return out


class JoinsAtPrimesReport(NamedTuple):
    ok: bool
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def joins_at_primes(theta: PresentedLattice, L: FinDistLattice, M: FinDistLattice, expansion: str = "full") -> JoinsAtPrimesReport:
    """Check that every prime filter ``F`` of ``L`` makes ``x -> (-)`` join-preserving in ``theta``.

    For each join-prime ``p`` (the prime filter ``up p``), ``a`` in it and
    ``G`` a subset of ``M``, some ``a'`` in the filter must satisfy
    ``[a -> join G] <= [join {a' -> b | b in G}]``.  Returns the first
    failing ``(p, a, G)`` otherwise.
    """
    L, M = _lattice(L), _lattice(M)
    for p in join_irreducibles(L).elements:
        F = [a for a in L.elements if L.leq(p, a)]
        for a in F:
            for G in _index_subsets(M, expansion):
                lhs = theta.element(_arrow(a, M.join_all(G)))
                if not any(leq(lhs, theta.element(join(*(_arrow(a2, b) for b in G)))) for a2 in F):
                    return JoinsAtPrimesReport(False, (p, a, G))
    return JoinsAtPrimesReport(True)


# -- embedding-retraction pairs -----------------------------------------


def is_erp(f: MonotoneMap, g: MonotoneMap) -> bool:
    """``f`` injective and lower adjoint to ``g``."""
    return f.is_injective() and is_adjoint_pair(f, g)


@dataclass(frozen=True)
class ErpPair:
    embed: MonotoneMap
    retract: MonotoneMap

    def __post_init__(self):
        if not is_erp(self.embed, self.retract):
            raise InvalidStructure("not an embedding-retraction pair")


@dataclass(frozen=True)
class ErpReport:
    principal: bool
    principal_witness: object
    primes: bool
    primes_witness: object
    retraction: MonotoneMap | None

    @property
    def ok(self) -> bool:
        return self.retraction is not None

    def __bool__(self) -> bool:
        return self.ok


def sublattice(L: FinDistLattice, subset: Iterable) -> FinDistLattice:
    """Validated bounded sublattice of ``L``."""
    L = _lattice(L)
    K = frozenset(subset)
    if not K <= frozenset(L.elements):
        raise NotASublattice("subset contains non-elements")
    if L.bottom not in K or L.top not in K:
        raise NotASublattice("sublattice must contain both bounds")
    for a in K:
        for b in K:
            if L.meet(a, b) not in K or L.join(a, b) not in K:
                raise NotASublattice(f"not closed under meet/join at {a!r}, {b!r}")
    return L.sublattice(K)


def erp_retraction(L: FinDistLattice, K: FinDistLattice | Iterable) -> ErpReport:
    """Decide whether the inclusion ``K -> L`` has a homomorphic retraction forming an e-r-p.

    Condition (principal): ``down b`` meets ``K`` in a principal down-set for
    every ``b``.  Condition (primes): join-irreducibles of ``K`` stay
    join-irreducible in ``L``.  When both hold the retraction sends ``b`` to
    the largest element of ``K`` below it.
    """
    L = _lattice(L)
    Kset = K.elements if isinstance(K, FinDistLattice) else tuple(K)
    Klat = sublattice(L, Kset)
    principal, pw = True, None
    h = {}
    for b in L.elements:
        below = [k for k in Klat.elements if L.leq(k, b)]
        top = [k for k in below if all(L.leq(x, k) for x in below)]
        if not top:
            principal, pw = False, b
            break
        h[b] = top[0]
    JL = set(join_irreducibles(L).elements)
    missing = [k for k in join_irreducibles(Klat).elements if k not in JL]
    primes = not missing
    retraction = None
    if principal and primes:
        retraction = MonotoneMap(L, Klat, h, check=False)
    return ErpReport(principal, pw, primes, missing[0] if missing else None, retraction)


def inclusion(K: FinDistLattice, L: FinDistLattice) -> MonotoneMap:
    return MonotoneMap(K, _lattice(L), lambda a: a, check=False)


def erp_by_search(L: FinDistLattice, K: FinDistLattice) -> list[MonotoneMap]:
    """All homomorphisms ``h: L -> K`` with (inclusion, h) an e-r-p, by exhaustive search."""
    from .order import monotone_maps

    L = _lattice(L)
    i = inclusion(K, L)
    out = []
    for m in monotone_maps(L.carrier, K.carrier):
        h = MonotoneMap(L, K, m, check=False)
        if is_homomorphism(h) and is_erp(i, h):
            out.append(h)
    return out


def dual_hom(h: MonotoneMap) -> MonotoneMap:
    """Dual of a lattice homomorphism ``h: L -> K`` as a map ``J(K) -> J(L)``.

    ``j`` goes to the least ``a`` with ``j <= h(a)``, which is join-prime.
    """
    L, K = _lattice(h.source), _lattice(h.target)
    JL, JK = join_irreducibles(L), join_irreducibles(K)
    out = {}
    for j in JK.elements:
        cands = [a for a in L.elements if K.leq(j, h(a))]
        least = [a for a in cands if all(L.leq(a, c) for c in cands)]
        if not least or least[0] not in JL:
            raise InvalidStructure("map is not a lattice homomorphism")
        out[j] = least[0]
    return MonotoneMap(JK, JL, out, check=False)


def specialization(f: MonotoneMap) -> MonotoneMap:
    """The same map between the opposite posets (the specialisation order of the dual spaces)."""
    from .order import _poset_of

    return MonotoneMap(_poset_of(f.source).dual(), _poset_of(f.target).dual(), f.mapping, check=False)


def dual_erp(embed: MonotoneMap, retract: MonotoneMap) -> tuple[MonotoneMap, MonotoneMap]:
    """Dual pair of a lattice e-r-p, in the specialisation order of the dual spaces.

    The dual of the retraction is the embedding of spaces and vice versa.
    """
    return specialization(dual_hom(retract)), specialization(dual_hom(embed))


def preimage_map(f: MonotoneMap) -> MonotoneMap:
    """Dual of a monotone map ``f: X -> Y`` of finite spaces: preimage on up-sets."""
    from .order import _poset_of, upset_lattice

    X, Y = _poset_of(f.source), _poset_of(f.target)
    UX, UY = upset_lattice(X), upset_lattice(Y)
    return MonotoneMap(UY, UX, lambda V: frozenset(x for x in X.elements if f(x) in V), check=False)


def dual_space_erp(embed: MonotoneMap, retract: MonotoneMap) -> tuple[MonotoneMap, MonotoneMap]:
    """Dual pair of a space e-r-p, on the lattices of up-sets."""
    return preimage_map(retract), preimage_map(embed)
