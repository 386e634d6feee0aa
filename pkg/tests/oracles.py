"""Brute-force reference implementations used only by the tests.

Each oracle avoids the code path it checks: subsets are enumerated
exhaustively, isomorphisms are found by trying permutations, and closures
are computed by iterating operations to a fixed point.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def subsets(items):
    items = list(items)
    return [frozenset(c) for r in range(len(items) + 1) for c in itertools.combinations(items, r)]


def leq_of(P):
    return {(a, b) for a in P.elements for b in P.elements if P.leq(a, b)}


def naive_downsets(P):
    return [S for S in subsets(P.elements) if all(a in S for b in S for a in P.elements if P.leq(a, b))]


def naive_upsets(P):
    return [S for S in subsets(P.elements) if all(b in S for a in S for b in P.elements if P.leq(a, b))]


def naive_join_irreducibles(L):
    """Non-bottom elements not expressible as a join of two strictly smaller ones."""
    els = L.elements
    out = []
    for a in els:
        if a == L.bottom:
            continue
        below = [x for x in els if L.leq(x, a) and x != a]
        if not any(L.join(x, y) == a for x in below for y in below):
            out.append(a)
    return out


def naive_filters(L):
    """Nonempty up-closed, meet-closed subsets, by trying every subset."""
    out = []
    for S in subsets(L.elements):
        if not S:
            continue
        if not all(b in S for a in S for b in L.elements if L.leq(a, b)):
            continue
        if all(L.meet(a, b) in S for a in S for b in S):
            out.append(S)
    return out


def iso_by_permutation(P, Q, leq_p=None, leq_q=None):
    """An order isomorphism found by trying all bijections, or None."""
    if len(P.elements) != len(Q.elements):
        return None
    lp = leq_p or P.leq
    lq = leq_q or Q.leq
    pe, qe = list(P.elements), list(Q.elements)
    for perm in itertools.permutations(qe):
        f = dict(zip(pe, perm))
        if all(lp(a, b) == lq(f[a], f[b]) for a in pe for b in pe):
            return f
    return None


def is_order_iso(f: dict, P, Q) -> bool:
    """``f`` is a bijection ``P -> Q`` preserving and reflecting the order."""
    if sorted(map(repr, f.values())) != sorted(map(repr, Q.elements)) or len(set(f.values())) != len(Q.elements):
        return False
    return all(P.leq(a, b) == Q.leq(f[a], f[b]) for a in P.elements for b in P.elements)


def all_monotone_maps(P, Q):
    """Every monotone map, by filtering the full function space."""
    pe = list(P.elements)
    out = []
    for vals in itertools.product(Q.elements, repeat=len(pe)):
        f = dict(zip(pe, vals))
        if all(Q.leq(f[a], f[b]) for a in pe for b in pe if P.leq(a, b)):
            out.append(f)
    return out


def closure(start, ops, limit=100000):
    """Smallest set containing ``start`` and closed under the binary ``ops``."""
    seen = set(start)
    frontier = list(seen)
    while frontier:
        new = []
        for x in frontier:
            for y in list(seen):
                for op in ops:
                    for z in (op(x, y), op(y, x)):
                        if z not in seen:
                            seen.add(z)
                            new.append(z)
        if len(seen) > limit:
            raise RuntimeError("closure too large")
        frontier = new
    return seen


def boolean_closure(universe, gens):
    """Boolean subalgebra of the powerset of ``universe`` generated by ``gens``."""
    U = frozenset(universe)
    start = {frozenset(), U} | {frozenset(g) for g in gens} | {U - frozenset(g) for g in gens}
    return closure(start, [frozenset.__and__, frozenset.__or__])


def algebra_atoms(family):
    """Minimal nonempty members of a finite Boolean algebra of sets."""
    nonempty = [a for a in family if a]
    return {a for a in nonempty if not any(b < a for b in nonempty)}


def burnside_count(n: int, arities: list[int]) -> int:
    """Isomorphism classes of structures on ``n`` points with relations of the given arities."""
    total = 0
    for perm in itertools.permutations(range(n)):
        fixed = 1
        for k in arities:
            tuples = list(itertools.product(range(n), repeat=k))
            seen, cycles = set(), 0
            for t in tuples:
                if t in seen:
                    continue
                cycles += 1
                u = t
                while u not in seen:
                    seen.add(u)
                    u = tuple(perm[x] for x in u)
            fixed *= 2**cycles
        total += fixed
    return total // math.factorial(n)


def approx(value: Fraction, stabilises: bool, n: int) -> Fraction:
    """The ``n``-th coordinate, straight from the max-of-a-set definition."""
    cands = [Fraction(a, n) for a in range(n + 1)]
    return max(c for c in cands if (c <= value if stabilises else c < value))


def levelwise_sum(x: tuple, y: tuple, n: int, depth: int = 24) -> Fraction:
    """Coordinate ``n`` of the sum, as the supremum over finer levels ``m = kn``
    of the floored truncated sum of the level-``m`` approximations."""
    best = Fraction(0)
    for k in range(1, depth + 1):
        m = k * n
        s = min(approx(*x, m) + approx(*y, m), Fraction(1))
        best = max(best, Fraction(math.floor(s * n), n))
    return best
