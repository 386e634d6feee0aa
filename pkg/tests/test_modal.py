from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stepdual.errors import CapExceeded, DepthExceeded, ParseError
from stepdual.modal import (
    Dia,
    Var,
    box,
    build_tower,
    equivalent_at_rank,
    interpret,
    interpret_at,
    level_presentation,
    parse_modal,
    rank,
    read_level_point,
    separating_point,
)
from stepdual.presented import quotient
from stepdual.syntax import And, Bot, Implies, Not, Or, Top


@st.composite
def modal_formulas(draw, names=("p", "q"), depth=3):
    if depth == 0 or draw(st.integers(0, 3)) == 0:
        return draw(st.sampled_from([Var(n) for n in names] + [Top(), Bot()]))
    kind = draw(st.sampled_from(["not", "dia", "and", "or", "imp"]))
    if kind == "not":
        return Not(draw(modal_formulas(names, depth - 1)))
    if kind == "dia":
        return Dia(draw(modal_formulas(names, depth - 1)))
    op = {"and": And, "or": Or, "imp": Implies}[kind]
    return op(draw(modal_formulas(names, depth - 1)), draw(modal_formulas(names, depth - 1)))


def test_parse_examples():
    assert parse_modal("dia(p & dia q)") == Dia(And(Var("p"), Dia(Var("q"))))
    assert parse_modal("~dia ~p") == box(Var("p"))
    assert parse_modal("p -> q -> p") == Implies(Var("p"), Implies(Var("q"), Var("p")))
    assert parse_modal("p | q & r") == Or(Var("p"), And(Var("q"), Var("r")))


def test_parse_error_position():
    with pytest.raises(ParseError) as exc:
        parse_modal("dia(")
    assert exc.value.position == 4
    assert exc.value.expected


@given(modal_formulas())
def test_printing_round_trips(phi):
    assert parse_modal(str(phi)) == phi


def test_rank_examples():
    assert rank(parse_modal("p & ~q")) == 0
    assert rank(parse_modal("dia(p & dia q)")) == 2
    assert rank(parse_modal("dia bot")) == 1


def test_tower_sizes():
    assert build_tower([], 3).sizes == [1, 2, 4, 16]
    assert build_tower(["p"], 2).sizes == [2, 8, 512]
    assert build_tower(["p", "q"], 0).sizes == [4]
    assert len(build_tower(["p", "q"], 0).base) == 16


def test_tower_cap_names_the_level():
    with pytest.raises(CapExceeded) as exc:
        build_tower(["p"], 3)
    assert exc.value.level == 3
    with pytest.raises(CapExceeded):
        build_tower([], 4, cap=100)


def test_projections_are_surjective_and_embeddings_injective():
    T = build_tower(["p"], 2)
    for n in range(2):
        assert set(T.projections[n].values()) == set(T.points[n])
        emb = T.embedding(n)
        assert len(set(emb.values())) == len(emb)


def test_interpret_examples():
    T = build_tower([], 2)
    assert interpret(parse_modal("dia top"), T) == frozenset(p for p in T.points[1] if p[1])
    assert len(interpret(parse_modal("dia top"), T)) == 1
    for level in (1, 2):
        assert interpret_at(parse_modal("dia bot"), T, level) == frozenset()
    U = build_tower(["p"], 1)
    assert interpret(Var("p"), U) == {frozenset({"p"})}


def test_depth_exceeded():
    T = build_tower(["p"], 1)
    with pytest.raises(DepthExceeded):
        interpret(parse_modal("dia dia p"), T)


def test_equivalences():
    T = build_tower(["p", "q"], 1)
    assert equivalent_at_rank(parse_modal("dia(p | p)"), parse_modal("dia p"), T)
    assert equivalent_at_rank(parse_modal("dia(p | q)"), parse_modal("dia p | dia q"), T)
    assert equivalent_at_rank(parse_modal("dia bot"), parse_modal("bot"), T)
    assert not equivalent_at_rank(parse_modal("dia(p & q)"), parse_modal("dia p & dia q"), T)


def test_no_transitivity():
    T = build_tower(["p"], 2)
    phi, psi = parse_modal("dia dia p"), parse_modal("dia p")
    assert not equivalent_at_rank(phi, psi, T)
    x = separating_point(phi, psi, T)
    assert x is not None
    assert (x in interpret_at(phi, T, 2)) != (x in interpret_at(psi, T, 2))


@given(modal_formulas(depth=3))
def test_interpretation_commutes_with_embedding(phi):
    if rank(phi) > 1:
        return
    T = build_tower(["p", "q"], 1)
    assert T.embed(interpret(phi, T), rank(phi), 1) == interpret_at(phi, T, 1)


@given(modal_formulas(names=("p",), depth=4))
def test_interpretation_commutes_with_embedding_two_levels(phi):
    T = build_tower(["p"], 2)
    if rank(phi) > 2:
        return
    assert T.embed(interpret(phi, T), rank(phi), 2) == interpret_at(phi, T, 2)


def test_level_one_matches_presentation():
    for names in ([], ["p"]):
        T = build_tower(names, 1)
        L = quotient(level_presentation(names, T.points[0]))
        read = {read_level_point(S, names, T.points[0]) for S in L.points}
        assert len(L.points) == T.sizes[1]
        assert read == set(T.points[1])
