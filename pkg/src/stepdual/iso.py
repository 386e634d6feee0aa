"""Canonical forms and isomorphism search for small relational structures.

A structure here is ``n`` vertices ``0..n-1`` carrying a list of binary
relations (each given as a list of successor sets) and an optional initial
vertex colouring.  Posets, lattices and the unary/binary part of first-order
structures are all fed through this module.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from typing import Sequence

from .errors import CapExceeded

DEFAULT_ELEMENT_CAP = 12
DEFAULT_PERMUTATION_BUDGET = 200_000

Relations = Sequence[Sequence[frozenset]]


def _predecessors(n: int, succ: Sequence[frozenset]) -> list[frozenset]:
    pred: list[set] = [set() for _ in range(n)]
    for u in range(n):
        for v in succ[u]:
            pred[v].add(u)
    return [frozenset(p) for p in pred]


def refine(n: int, relations: Relations, colors: Sequence | None = None) -> list[int]:
    """Colour refinement (1-dimensional Weisfeiler-Leman) to a stable partition.

    The returned colours are canonical: they depend only on the isomorphism
    type of the coloured structure, not on the vertex numbering.
    """
    preds = [_predecessors(n, succ) for succ in relations]
    base = [
        (colors[v] if colors is not None else 0,)
        + tuple(v in succ[v] for succ in relations)
        for v in range(n)
    ]
    labels = {sig: i for i, sig in enumerate(sorted(set(base)))}
    color = [labels[b] for b in base]
    while True:
        sigs = []
        for v in range(n):
            parts = [color[v]]
            for succ, pred in zip(relations, preds):
                parts.append(tuple(sorted(color[u] for u in succ[v])))
                parts.append(tuple(sorted(color[u] for u in pred[v])))
            sigs.append(tuple(parts))
        labels = {sig: i for i, sig in enumerate(sorted(set(sigs)))}
        new = [labels[s] for s in sigs]
        if len(labels) == len(set(color)):
            return new
        color = new


def _twins(u: int, v: int, relations: Relations, preds) -> bool:
    for succ, pred in zip(relations, preds):
        if (v in succ[u]) != (u in succ[v]):
            return False
        if (u in succ[u]) != (v in succ[v]):
            return False
        if succ[u] - {u, v} != succ[v] - {u, v}:
            return False
        if pred[u] - {u, v} != pred[v] - {u, v}:
            return False
    return True


def _distinct_permutations(items: list):
    counts = Counter(items)
    keys = sorted(counts)
    out: list = []

    def rec():
        if len(out) == len(items):
            yield tuple(out)
            return
        for k in keys:
            if counts[k]:
                counts[k] -= 1
                out.append(k)
                yield from rec()
                out.pop()
                counts[k] += 1

    yield from rec()


def _multinomial(items: list) -> int:
    total = math.factorial(len(items))
    for c in Counter(items).values():
        total //= math.factorial(c)
    return total


def canonical_form(
    n: int,
    relations: Relations,
    colors: Sequence | None = None,
    *,
    element_cap: int = DEFAULT_ELEMENT_CAP,
    budget: int = DEFAULT_PERMUTATION_BUDGET,
) -> tuple:
    """Return a hashable key equal for two inputs iff they are isomorphic.

    Searches all orderings compatible with the refined colouring, collapsing
    interchangeable (twin) vertices, and keeps the lexicographically least
    adjacency encoding.
    """
    if n > element_cap:
        raise CapExceeded("canonical form input", n, element_cap)
    color = refine(n, relations, colors)
    preds = [_predecessors(n, succ) for succ in relations]

    # twin classes inside each colour class
    twin_of = list(range(n))
    for v in range(n):
        for u in range(v):
            if twin_of[u] == u and color[u] == color[v]:
                members = [w for w in range(v) if twin_of[w] == u]
                if all(_twins(w, v, relations, preds) for w in members):
                    twin_of[v] = u
                    break

    classes = sorted(set(color))
    slots = []
    total = 1
    for c in classes:
        labels = sorted(twin_of[v] for v in range(n) if color[v] == c)
        slots.append(labels)
        total *= _multinomial(labels)
    if total > budget:
        raise CapExceeded("canonical form orderings", total, budget)

    members = {t: [v for v in range(n) if twin_of[v] == t] for t in set(twin_of)}
    best = None
    for choice in itertools.product(*(_distinct_permutations(s) for s in slots)):
        order = []
        for labels in choice:
            used = Counter()
            for t in labels:
                order.append(members[t][used[t]])
                used[t] += 1
        code = tuple(
            tuple(order[j] in succ[order[i]] for i in range(n) for j in range(n))
            for succ in relations
        )
        if best is None or code < best:
            best = code
    return (n, tuple(sorted(color)), best)


def find_isomorphism(
    n: int,
    rel_a: Relations,
    rel_b: Relations,
    colors_a: Sequence | None = None,
    colors_b: Sequence | None = None,
) -> list[int] | None:
    """Return a vertex bijection ``f`` with ``f`` an isomorphism A -> B, or None."""
    if len(rel_a) != len(rel_b):
        return None
    if n == 0:
        return []
    # refine the disjoint union so colours are comparable across A and B
    union = [
        [frozenset(sa[v]) for v in range(n)] + [frozenset(w + n for w in sb[v]) for v in range(n)]
        for sa, sb in zip(rel_a, rel_b)
    ]
    ca = list(colors_a) if colors_a is not None else [0] * n
    cb = list(colors_b) if colors_b is not None else [0] * n
    color = refine(2 * n, union, ca + cb)
    col_a, col_b = color[:n], color[n:]
    if sorted(col_a) != sorted(col_b):
        return None

    # place vertices of A so that each one is related to earlier ones if possible
    adj = [set() for _ in range(n)]
    for succ in rel_a:
        for u in range(n):
            for v in succ[u]:
                adj[u].add(v)
                adj[v].add(u)
    order: list[int] = []
    placed = set()
    remaining = sorted(range(n), key=lambda v: (col_a.count(col_a[v]), col_a[v], v))
    while remaining:
        best = max(remaining, key=lambda v: (len(adj[v] & placed), -remaining.index(v)))
        order.append(best)
        placed.add(best)
        remaining.remove(best)

    candidates = {c: [w for w in range(n) if col_b[w] == c] for c in set(col_b)}
    f: dict[int, int] = {}
    used: set[int] = set()

    def consistent(u: int, w: int) -> bool:
        for sa, sb in zip(rel_a, rel_b):
            if (u in sa[u]) != (w in sb[w]):
                return False
            for x, y in f.items():
                if (x in sa[u]) != (y in sb[w]) or (u in sa[x]) != (w in sb[y]):
                    return False
        return True

    def search(k: int) -> bool:
        if k == n:
            return True
        u = order[k]
        for w in candidates[col_a[u]]:
            if w not in used and consistent(u, w):
                f[u] = w
                used.add(w)
                if search(k + 1):
                    return True
                del f[u]
                used.discard(w)
        return False

    if search(0):
        return [f[v] for v in range(n)]
    return None
