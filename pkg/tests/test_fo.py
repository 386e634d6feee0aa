from __future__ import annotations

import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import boolean_closure, burnside_count
from stepdual.errors import ArityMismatch, IndexOutOfWindow, InvalidStructure, ParseError, UnboundVariable, UnknownSymbol
from stepdual.fo import (
    Atom,
    Eq,
    Exists,
    FinStructure,
    Forall,
    Signature,
    Variable,
    enumerate_structures,
    evaluate,
    free_variables,
    generated_subalgebra,
    model_space,
    parse_fo,
    semantics_set,
    structures_of_size,
)
from stepdual.syntax import And, Bot, Implies, Not, Or, Top

P1 = Signature({"P": 1})
R2 = Signature({"R": 2})
PR = Signature({"P": 1, "R": 2})
EDGE = FinStructure(2, {"R": [(1, 2)]})


@st.composite
def formulas(draw, free=(1, 2), depth=3):
    """Formulas over ``PR`` whose free variables lie in ``free``."""
    if depth == 0 or draw(st.integers(0, 3)) == 0:
        v = [Variable(i) for i in free]
        if not v:
            return draw(st.sampled_from([Top(), Bot()]))
        kind = draw(st.sampled_from(["P", "R", "eq", "const"]))
        if kind == "P":
            return Atom("P", (draw(st.sampled_from(v)),))
        if kind == "R":
            return Atom("R", (draw(st.sampled_from(v)), draw(st.sampled_from(v))))
        if kind == "eq":
            return Eq(draw(st.sampled_from(v)), draw(st.sampled_from(v)))
        return draw(st.sampled_from([Top(), Bot()]))
    kind = draw(st.sampled_from(["not", "and", "or", "imp", "ex", "all"]))
    if kind == "not":
        return Not(draw(formulas(free, depth - 1)))
    if kind in ("ex", "all"):
        i = draw(st.sampled_from([1, 2, 3]))
        body = draw(formulas(tuple(sorted(set(free) | {i})), depth - 1))
        return (Exists if kind == "ex" else Forall)(i, body)
    op = {"and": And, "or": Or, "imp": Implies}[kind]
    return op(draw(formulas(free, depth - 1)), draw(formulas(free, depth - 1)))


def naive_eval(A, alpha, phi):
    """Satisfaction by substitution into a fresh dict at every binder."""
    if isinstance(phi, Atom):
        return tuple(alpha[t.index] for t in phi.args) in A.rel(phi.relation)
    if isinstance(phi, Eq):
        return alpha[phi.left.index] == alpha[phi.right.index]
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bot):
        return False
    if isinstance(phi, Not):
        return not naive_eval(A, alpha, phi.body)
    if isinstance(phi, (And, Or, Implies)):
        a, b = naive_eval(A, alpha, phi.left), naive_eval(A, alpha, phi.right)
        return {And: a and b, Or: a or b, Implies: (not a) or b}[type(phi)]
    vals = [naive_eval(A, {**alpha, phi.var: x}, phi.body) for x in A.universe]
    return any(vals) if isinstance(phi, Exists) else all(vals)


def small_structures():
    return [A for n in (1, 2) for A in structures_of_size(PR, n)]


# -- parsing ---------------------------------------------------------------


def test_parse_examples():
    assert parse_fo("exists v1. P(v1)", P1) == Exists(1, Atom("P", (Variable(1),)))
    assert free_variables(parse_fo("forall v1. R(v1,v2)", R2)) == {2}
    assert parse_fo("v1 = v2", P1) == Eq(Variable(1), Variable(2))
    assert parse_fo("exists v1. P(v1) & ~P(v1)", P1) == Exists(1, And(Atom("P", (Variable(1),)), Not(Atom("P", (Variable(1),)))))


def test_parse_errors():
    with pytest.raises(ArityMismatch):
        parse_fo("P(v1,v2)", P1)
    with pytest.raises(UnknownSymbol):
        parse_fo("Q(v1)", P1)
    with pytest.raises(ParseError) as exc:
        parse_fo("exists v1 P(v1)", P1)
    assert exc.value.position == 10


def test_constants_parse_and_evaluate():
    sig = Signature({"P": 1}, ["c"])
    A = FinStructure(2, {"P": [(2,)]}, {"c": 2})
    assert evaluate(A, {}, parse_fo("P(c)", sig))
    assert evaluate(A, [1], parse_fo("~(v1 = c)", sig))


@given(formulas())
def test_printing_round_trips(phi):
    assert parse_fo(str(phi), PR) == phi


# -- structures ------------------------------------------------------------


def test_structure_validation():
    with pytest.raises(InvalidStructure):
        FinStructure(2, {"R": [(1, 3)]})
    with pytest.raises(InvalidStructure):
        FinStructure(2, {"R": [(1, 2), (1,)]})
    with pytest.raises(InvalidStructure):
        FinStructure(1, {}, {"c": 2})
    with pytest.raises(InvalidStructure):
        Signature({"P": 0})
    with pytest.raises(InvalidStructure):
        Signature({"P": 1}, ["P"])


def test_structure_json_round_trip():
    A = FinStructure(3, {"R": [(1, 2), (3, 3)]}, {"c": 2})
    data = json.loads(json.dumps(A.to_json()))
    assert FinStructure.from_json(data) == A
    assert data == {"universe": 3, "relations": {"R": [[1, 2], [3, 3]]}, "constants": {"c": 2}}
    with pytest.raises(UnknownSymbol):
        FinStructure.from_json(data, P1)


# -- evaluation ------------------------------------------------------------


def test_evaluate_examples():
    assert evaluate(EDGE, {}, parse_fo("exists v1. exists v2. R(v1,v2)", R2))
    assert not evaluate(EDGE, {}, parse_fo("forall v1. R(v1,v1)", R2))
    assert not evaluate(EDGE, {}, Bot())
    assert evaluate(EDGE, [1, 2], parse_fo("R(v1,v2)", R2))
    assert not evaluate(EDGE, {1: 2, 2: 1}, parse_fo("R(v1,v2)", R2))


def test_evaluate_unbound():
    with pytest.raises(UnboundVariable):
        evaluate(EDGE, {}, parse_fo("R(v1,v2)", R2))
    with pytest.raises(UnboundVariable):
        evaluate(EDGE, [1], parse_fo("R(v1,v2)", R2))


def test_binder_restores_outer_assignment():
    phi = parse_fo("(exists v1. R(v1,v2)) & v1 = v2", R2)
    assert evaluate(EDGE, [2, 2], phi)
    assert not evaluate(EDGE, [1, 2], phi)


@given(formulas(), st.sampled_from(small_structures()), st.data())
def test_evaluate_matches_substitution_oracle(phi, A, data):
    alpha = {i: data.draw(st.sampled_from(list(A.universe))) for i in (1, 2)}
    assert evaluate(A, alpha, phi) == naive_eval(A, alpha, phi)


# -- enumeration -----------------------------------------------------------


def test_enumeration_examples():
    assert len(enumerate_structures(P1, 1)) == 2
    assert len(enumerate_structures(P1, 2, min_size=2)) == 3
    assert len(enumerate_structures(P1, 2, [parse_fo("forall v1. P(v1)", P1)])) == 2


def test_enumeration_counts_match_orbit_counting():
    for n in (1, 2, 3):
        assert len(enumerate_structures(P1, n, min_size=n)) == burnside_count(n, [1]) == n + 1
    for n in (1, 2, 3):
        assert len(enumerate_structures(R2, n, min_size=n)) == burnside_count(n, [2])
    assert [burnside_count(n, [2]) for n in (1, 2, 3)] == [2, 10, 104]
    assert len(enumerate_structures(PR, 2, min_size=2)) == burnside_count(2, [1, 2])


def test_raw_enumeration_counts():
    assert len(enumerate_structures(P1, 3, up_to_iso=False)) == 2 + 4 + 8
    assert len(list(structures_of_size(R2, 2))) == 16


def test_enumerated_structures_are_pairwise_non_isomorphic():
    reps = enumerate_structures(R2, 3, min_size=3)
    for A, B in itertools.combinations(reps, 2):
        assert all(A.permuted(dict(zip(A.universe, p))) != B for p in itertools.permutations(A.universe))


def test_enumeration_rejects_open_theory():
    with pytest.raises(UnboundVariable):
        enumerate_structures(P1, 2, [parse_fo("P(v1)", P1)])
    with pytest.raises(InvalidStructure):
        enumerate_structures(P1, 0)


# -- model spaces ----------------------------------------------------------


def test_model_space_sizes():
    two = FinStructure(2, {"P": [(1,)]})
    one = FinStructure(1, {"P": []})
    assert len(model_space([two], 2)) == 4
    X0 = model_space([one, two], 0)
    assert [p.structure for p in X0] == [one, two]
    assert len(model_space([one, two], 1)) == 3
    with pytest.raises(InvalidStructure):
        model_space([one], -1)


def test_projection_and_fibers():
    X = model_space(enumerate_structures(P1, 2), 2)
    with pytest.raises(IndexOutOfWindow):
        X.projection(3)
    pi = X.projection(1)
    Y = X.forget(1)
    assert set(pi.values()) == set(Y.points)
    for y in Y:
        assert set(X.fiber(y, 1)) == {x for x in X if pi[x] == y}


def test_semantics_set_examples():
    X = model_space(enumerate_structures(P1, 2), 1)
    assert semantics_set(Top(), X) == frozenset(X.points)
    phi = parse_fo("P(v1)", P1)
    want = frozenset(p for p in X if (p.assignment[1],) in p.structure.rel("P"))
    assert semantics_set(phi, X) == want
    assert semantics_set(And(phi, Not(phi)), X) == frozenset()
    with pytest.raises(UnboundVariable):
        semantics_set(parse_fo("P(v2)", P1), X)


@given(formulas(depth=2), st.sampled_from([1, 2]))
def test_projection_of_semantics_is_exists(phi, i):
    X = model_space(enumerate_structures(PR, 2)[:6], 2)
    assert len(X) <= 30
    pi = X.projection(i)
    image = frozenset(pi[p] for p in semantics_set(phi, X))
    assert image == semantics_set(Exists(i, phi), X.forget(i))


# -- generated subalgebras -------------------------------------------------


def test_generated_subalgebra_examples():
    X = model_space(enumerate_structures(P1, 2), 1)
    S = semantics_set(parse_fo("P(v1)", P1), X)
    assert len(generated_subalgebra([S], X)) == 4
    assert generated_subalgebra([S, frozenset(X.points) - S], X) == generated_subalgebra([S], X)
    assert len(generated_subalgebra([frozenset()], X)) == 2


def test_two_independent_generators_give_sixteen():
    X = model_space([FinStructure(2, {"R": []})], 3)
    assert len(X) == 8
    S = semantics_set(parse_fo("v1 = v2", R2), X)
    T = semantics_set(parse_fo("v2 = v3", R2), X)
    B = generated_subalgebra([S, T], X)
    assert len(B) == 16
    assert set(B.elements()) == boolean_closure(X.points, [S, T])


@given(st.lists(formulas(depth=2), min_size=1, max_size=3))
def test_generated_subalgebra_matches_closure(phis):
    X = model_space(enumerate_structures(PR, 2)[:4], 2)
    gens = [semantics_set(phi, X) for phi in phis]
    B = generated_subalgebra(gens, X)
    assert set(B.elements()) == boolean_closure(X.points, gens)
