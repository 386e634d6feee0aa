from __future__ import annotations

import json
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import closure, iso_by_permutation, subsets
from stepdual.errors import CapExceeded, InconsistentPresentation, InvalidStructure, MixedLattice
from stepdual.order import chain_lattice, filters, is_isomorphic
from stepdual.presented import (
    BOT,
    TOP,
    Presentation,
    admissible_points,
    evaluate_term,
    free_ba,
    free_dl,
    gen,
    join,
    leq,
    meet,
    neg,
    quotient,
    realize,
    term_from_json,
    term_to_json,
)

G1, G2, G3 = gen("g1"), gen("g2"), gen("g3")


def brute_points(pres):
    return {S for S in subsets(pres.generators) if all(evaluate_term(l, S) == evaluate_term(r, S) for l, r in pres.relations)}


def brute_elements(pres):
    """Extents generated from the generator extents by intersection and union (and complement)."""
    pts = frozenset(brute_points(pres))
    ext = {frozenset(S for S in pts if g in S) for g in pres.generators} | {frozenset(), pts}
    if pres.kind == "BA":
        ext |= {pts - e for e in ext}
    return closure(ext, [frozenset.__and__, frozenset.__or__])


@st.composite
def dl_terms(draw, names, depth=3):
    if depth == 0 or draw(st.integers(0, 2)) == 0:
        return draw(st.sampled_from([gen(n) for n in names] + [TOP, BOT]))
    op = draw(st.sampled_from([meet, join]))
    return op(draw(dl_terms(names, depth - 1)), draw(dl_terms(names, depth - 1)))


@st.composite
def dl_presentations(draw):
    names = ["g1", "g2", "g3"][: draw(st.integers(1, 3))]
    rels = draw(st.lists(st.tuples(dl_terms(names), dl_terms(names)), max_size=3))
    return Presentation(names, rels, "DL")


def test_free_dl_sizes():
    # Dedekind numbers for 0..3 generators
    assert [len(free_dl([f"g{i}" for i in range(n)])) for n in range(4)] == [2, 3, 6, 20]


def test_free_dl_sizes_match_closure_oracle():
    for n in range(4):
        pres = Presentation([f"g{i}" for i in range(n)], (), "DL")
        assert len(quotient(pres)) == len(brute_elements(pres))


def test_free_ba_sizes():
    assert len(free_ba(["g1"])) == 4
    assert len(free_ba(["g1", "g2"])) == 16


def test_boolean_extent_of_difference():
    B = free_ba(["g1", "g2"])
    e = B.element(meet(G1, neg(G2)))
    assert e.points() == [frozenset({"g1"})]


def test_quotient_filters_points():
    L = quotient(Presentation(["g1", "g2"], [(meet(G1, G2), G1)], "DL"))
    assert len(L.points) == 3 and frozenset({"g1"}) not in L.points
    assert L.gen("g1") <= L.gen("g2")
    F = free_dl(["g1", "g2"])
    assert not leq(F.gen("g1"), F.gen("g2"))
    assert leq(F.gen("g1"), F.gen("g1") | F.gen("g2"))
    assert all(leq(F.bottom(), e) for e in F.elements())


def test_restrict_matches_quotient():
    F = free_dl(["g1", "g2"])
    R = F.restrict([(meet(G1, G2), G1)])
    assert set(R.points) == set(quotient(R.presentation).points)


def test_zero_relation_collapses_generator():
    L = quotient(Presentation(["g"], [(gen("g"), BOT)], "DL"))
    assert len(L) == 2
    lat, pts = realize(L)
    assert len(lat) == 2 and len(pts) == 1


def test_realize_one_generator():
    lat, pts = realize(free_dl(["g"]))
    assert is_isomorphic(lat, chain_lattice(3))
    assert len(pts) == 2 and len(pts.covers()) == 1


def test_realize_boolean_gives_boolean_algebra():
    B, pts = realize(free_ba(["g1", "g2"]))
    assert len(B.atoms()) == 4
    assert all(a == B.complement(B.complement(a)) for a in B.elements)
    assert all(x == y for x, y in pts.pairs())


def test_inconsistent_boolean_presentation_warns():
    with pytest.warns(InconsistentPresentation):
        L = quotient(Presentation(["g"], [(TOP, BOT)], "BA"))
    assert L.inconsistent and len(L) == 1


def test_inconsistent_lattice_presentation_warns():
    with pytest.warns(InconsistentPresentation):
        quotient(Presentation(["g"], [(TOP, BOT)], "DL"))


def test_not_is_rejected_in_lattice_presentations():
    with pytest.raises(InvalidStructure):
        Presentation(["g"], [(neg(gen("g")), BOT)], "DL")
    with pytest.raises(InvalidStructure):
        ~free_dl(["g"]).gen("g")


def test_undeclared_generator_rejected():
    with pytest.raises(InvalidStructure):
        Presentation(["g"], [(gen("h"), BOT)], "DL")


def test_mixing_lattices_is_an_error():
    with pytest.raises(MixedLattice):
        leq(free_dl(["g"]).gen("g"), free_dl(["g"]).gen("g"))


def test_point_cap():
    with pytest.raises(CapExceeded):
        admissible_points(Presentation([f"g{i}" for i in range(12)], (), "BA"), cap=100)


def test_json_round_trip():
    pres = Presentation(["a", "b"], [(meet(gen("a"), gen("b")), gen("a")), (join(gen("a"), TOP), TOP)], "DL")
    data = json.loads(json.dumps(pres.to_json()))
    assert Presentation.from_json(data) == pres
    term = ["and", ["gen", "a"], ["or", ["bot"], ["gen", "b"]]]
    assert term_to_json(term_from_json(term)) == term


@given(dl_presentations())
def test_points_match_brute_force(pres):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InconsistentPresentation)
        L = quotient(pres)
    assert set(L.points) == brute_points(pres)


@given(dl_presentations())
def test_elements_match_closure_oracle(pres):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InconsistentPresentation)
        L = quotient(pres)
    got = {frozenset(e.points()) for e in L.elements()}
    assert got == brute_elements(pres)


@given(dl_presentations(), dl_terms(["g1", "g2", "g3"]), dl_terms(["g1", "g2", "g3"]))
def test_word_problem_matches_valuations(pres, s, t):
    names = set(pres.generators)
    if not {x[1] for x in _gens(s) + _gens(t)} <= names:
        return
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InconsistentPresentation)
        L = quotient(pres)
    want = all(not evaluate_term(s, S) or evaluate_term(t, S) for S in brute_points(pres))
    assert leq(L.element(s), L.element(t)) == want


def _gens(term):
    if term[0] == "gen":
        return [term]
    return [g for t in term[1:] for g in _gens(t)] if term[0] in ("and", "or", "not") else []


def test_dual_points_are_reverse_inclusion_for_lattices():
    L = free_dl(["g1", "g2"])
    P = L.dual_points()
    assert len(P) == 4
    assert all(P.leq(S, T) == (T <= S) for S in P.elements for T in P.elements)


def test_f_box_style_presentation_of_three_chain():
    C = chain_lattice(3)
    gens = [("box", a) for a in C.elements]
    rels = [(gen(("box", C.meet(a, b))), meet(gen(("box", a)), gen(("box", b)))) for a in C.elements for b in C.elements]
    rels.append((gen(("box", C.top)), TOP))
    lat, pts = realize(quotient(Presentation(gens, rels, "DL")))
    assert is_isomorphic(lat, chain_lattice(4))
    assert iso_by_permutation(pts, filters(C)) is not None
