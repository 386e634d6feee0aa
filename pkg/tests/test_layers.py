from __future__ import annotations

import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import boolean_closure, subsets
from stepdual.duality import FinSpace, vietoris
from stepdual.errors import CapExceeded, IndexOutOfWindow, InvalidStructure
from stepdual.fo import FinStructure, Signature, enumerate_structures, generated_subalgebra, model_space, parse_fo, semantics_set
from stepdual.layers import (
    Measure,
    SemiringTable,
    boolean_semiring,
    combined_layer,
    cyclic_ring,
    dual_map,
    exists_layer,
    indicator,
    integrate_pushforward,
    kernel_partition,
    map_R_exists,
    map_R_semiring,
    measure_to_vietoris,
    measures_space,
    semiring_by_name,
    semiring_count,
    semiring_layer,
    verify_exists_duality,
    verify_semiring_duality,
    vietoris_to_measure,
)
from stepdual.setalgebra import SetAlgebra

P1 = Signature({"P": 1})
PR = Signature({"P": 1, "R": 2})
BOOL = boolean_semiring()
Z2, Z3 = cyclic_ring(2), cyclic_ring(3)


def space_P(max_size=2, window=1):
    return model_space(enumerate_structures(P1, max_size), window)


def algebra_of(phis, X, sig=P1):
    return generated_subalgebra([semantics_set(parse_fo(p, sig), X) for p in phis], X)


# -- semirings -------------------------------------------------------------


def test_builtin_semirings():
    assert BOOL.add(1, 1) == 1 and BOOL.mul(1, 0) == 0
    assert Z3.add(2, 2) == 1 and Z3.repeat_one(5) == 2
    assert Z2.repeat_one(0) == 0
    assert semiring_by_name("Z/3").elements == Z3.elements
    assert semiring_by_name("bool").name == "bool"
    with pytest.raises(InvalidStructure):
        semiring_by_name("Q")
    with pytest.raises(InvalidStructure):
        cyclic_ring(13)


def test_cyclic_rings_satisfy_axioms():
    for q in range(1, 8):
        S = cyclic_ring(q)
        assert len(S) == q


def test_semiring_rejects_bad_tables():
    with pytest.raises(InvalidStructure):
        SemiringTable((0, 1), [[0, 1], [1, 1]], [[1, 0], [0, 1]], 0, 1)
    with pytest.raises(InvalidStructure):
        SemiringTable((0, 1), [[0, 1], [1, 0]], [[0, 0], [0, 1]], 1, 1)
    with pytest.raises(InvalidStructure):
        SemiringTable((0, 1), [[0, 1]], [[0, 0], [0, 1]], 0, 1)


def test_semiring_json_round_trip():
    data = json.loads(json.dumps(Z3.to_json()))
    S = SemiringTable.from_json(data)
    assert all(S.add(a, b) == Z3.add(a, b) and S.mul(a, b) == Z3.mul(a, b) for a in range(3) for b in range(3))


# -- existential layer -----------------------------------------------------


def test_exists_layer_of_P():
    X = space_P()
    B = algebra_of(["P(v1)"], X)
    L = exists_layer(B, X, 1)
    want = semantics_set(parse_fo("exists v1. P(v1)", P1), X.forget(1))
    assert want in L.algebra
    # atoms: P everywhere, P nowhere, P somewhere but not everywhere
    assert len(L.algebra.atoms) == 3


def test_exists_layer_of_trivial_algebra():
    X = space_P()
    for B in (SetAlgebra(X.points, [X.points]), algebra_of(["v1 = v1"], X)):
        L = exists_layer(B, X, 1)
        assert set(L.algebra.elements()) == {frozenset(), frozenset(X.forget(1).points)}


def test_exists_layer_atoms_only_gives_same_algebra():
    X = space_P(2, 2)
    B = algebra_of(["P(v1)", "P(v2)", "v1 = v2"], X)
    assert exists_layer(B, X, 1).algebra == exists_layer(B, X, 1, generators="atoms").algebra


def test_layer_input_errors():
    X = space_P()
    B = algebra_of(["P(v1)"], X)
    with pytest.raises(IndexOutOfWindow):
        exists_layer(B, X, 2)
    with pytest.raises(InvalidStructure):
        exists_layer(B, space_P(1), 1)
    with pytest.raises(CapExceeded):
        exists_layer(SetAlgebra.powerset(X.points), X, 1, cap=8)


def test_map_R_examples():
    A = FinStructure(1, {"P": [(1,)]})
    X = model_space([A], 1)
    B = algebra_of(["P(v1)"], X)
    R = map_R_exists(B, X, 1)
    (p,) = X.forget(1).points
    assert R[p] == {B.atom_index(X.points[0])}
    X2 = space_P()
    T = SetAlgebra(X2.points, [X2.points])
    assert set(map_R_exists(T, X2, 1).values()) == {frozenset({0})}


def test_verify_exists_duality_examples():
    X = space_P()
    assert verify_exists_duality(algebra_of(["P(v1)"], X), X, 1)
    assert verify_exists_duality(SetAlgebra.powerset(X.points), X, 1)
    assert verify_exists_duality(SetAlgebra(X.points, [X.points]), X, 1)


@given(st.lists(st.sampled_from(["P(v1)", "P(v2)", "v1 = v2", "R(v1,v2)", "R(v2,v1)", "exists v3. R(v1,v3)"]), max_size=3), st.sampled_from([1, 2]))
def test_exists_layer_matches_direct_images(phis, i):
    X = model_space(enumerate_structures(PR, 2)[:5], 2)
    B = algebra_of(phis, X, PR)
    proj = X.projection(i)
    images = [frozenset(proj[p] for p in b) for b in B.elements()]
    L = exists_layer(B, X, i)
    assert set(L.algebra.elements()) == boolean_closure(X.forget(i).points, images)
    R = map_R_exists(B, X, i)
    assert kernel_partition(R) == L.algebra.partition()


def test_layer_monotonicity():
    X = space_P(3, 2)
    small = algebra_of(["P(v1)"], X)
    big = algebra_of(["P(v1)", "v1 = v2"], X)
    for i in (1, 2):
        assert exists_layer(small, X, i).algebra.is_subalgebra_of(exists_layer(big, X, i).algebra)
        assert semiring_layer(small, X, Z2, i).algebra.is_subalgebra_of(semiring_layer(big, X, Z2, i).algebra)


def test_combined_layer():
    X = space_P(2, 2)
    B = algebra_of(["P(v1)", "P(v2)"], X)
    algebra, image = combined_layer(B, X, 1)
    assert B.is_subalgebra_of(algebra)
    assert image == len(algebra.atoms)


# -- semiring layer --------------------------------------------------------


def test_semiring_count_examples():
    X = space_P(3)
    b = semantics_set(parse_fo("P(v1)", P1), X)
    A = FinStructure(3, {"P": [(1,), (2,)]})
    (p,) = [q for q in X.forget(1) if q.structure == A]
    assert semiring_count(b, p, 1, X) == 2
    assert semiring_count(frozenset(), p, 1, X) == 0
    assert semiring_count(X.points, p, 1, X) == 3
    with pytest.raises(IndexOutOfWindow):
        semiring_count(b, p, 2, X)


def test_semiring_layer_generators():
    X = space_P(3)
    B = algebra_of(["P(v1)"], X)
    b = semantics_set(parse_fo("P(v1)", P1), X)
    hat = tuple(sorted(B.hat(b)))
    L3 = semiring_layer(B, X, Z3, 1)
    A = next(q for q in X.forget(1) if q.structure == FinStructure(3, {"P": [(1,), (2,)]}))
    member = {k for g, (_, _, h, k) in L3.generators if h == hat and A in g}
    assert member == {2}
    L2 = semiring_layer(B, X, Z2, 1)
    A2 = next(q for q in X.forget(1) if q.structure == FinStructure(2, {"P": [(1,), (2,)]}))
    assert {k for g, (_, _, h, k) in L2.generators if h == hat and A2 in g} == {0}


def test_boolean_semiring_recovers_exists():
    X = space_P(3, 2)
    B = algebra_of(["P(v1)", "v1 = v2"], X)
    for i in (1, 2):
        ex = exists_layer(B, X, i)
        sl = semiring_layer(B, X, BOOL, i)
        ones = {g for g, prov in sl.generators if prov[3] == 1}
        assert ones == {g for g, _ in ex.generators}
        assert sl.algebra == ex.algebra


def test_verify_semiring_duality_examples():
    X = space_P(3)
    B = algebra_of(["P(v1)"], X)
    for S in (BOOL, Z2, Z3):
        report = verify_semiring_duality(B, X, S, 1)
        assert report and report.counterexample is None
    ex, sr = verify_exists_duality(B, X, 1), verify_semiring_duality(B, X, BOOL, 1)
    assert ex.details["layer_atoms"] == sr.details["layer_atoms"]
    assert ex.details["image_size"] == sr.details["image_size"]


# -- measures --------------------------------------------------------------


def brute_measures(points, S):
    """All maps on the powerset satisfying finite additivity, by direct filtering."""
    els = list(subsets(points))
    out = set()
    for vals in itertools.product(S.elements, repeat=len(els)):
        mu = dict(zip(els, vals))
        if mu[frozenset()] != S.zero:
            continue
        if all(S.add(mu[a | b], mu[a & b]) == S.add(mu[a], mu[b]) for a in els for b in els):
            out.add(tuple(sorted(mu.items(), key=lambda kv: sorted(kv[0]))))
    return out


def test_measures_space_counts():
    assert len(measures_space([1, 2], Z2)) == 4
    assert len(measures_space([], Z2)) == 1
    assert len(measures_space([1, 2, 3], Z3)) == 27
    with pytest.raises(CapExceeded):
        measures_space(range(10), Z3, cap=1000)


def test_measures_space_matches_brute_force():
    for n in range(3):
        for S in (BOOL, Z2):
            got = {tuple(sorted(mu.values.items(), key=lambda kv: sorted(kv[0]))) for mu in measures_space(range(n), S)}
            assert got == brute_measures(range(n), S)
            assert all(mu.is_finitely_additive() for mu in measures_space(range(n), S))


def test_non_additive_measure_detected():
    A = SetAlgebra.powerset([1, 2])
    mu = Measure(A, lambda a: 1 if len(a) == 1 else 0, Z3)
    assert not mu.is_finitely_additive()
    nu = Measure(A, lambda a: 1, Z2)
    assert nu.additivity_failures() == [(frozenset(),)]


def test_vietoris_measure_bijection():
    for n in range(5):
        X = FinSpace.discrete_on(range(n))
        A = SetAlgebra.powerset(range(n))
        V = vietoris(X).points
        ms = {vietoris_to_measure(C, A) for C in V}
        assert len(ms) == len(V) == len(measures_space(range(n), BOOL))
        assert ms == set(measures_space(range(n), BOOL))
        for C in V:
            mu = vietoris_to_measure(C, A)
            assert measure_to_vietoris(mu) == C
            assert all((mu(a) == 1) == bool(C & a) for a in A.elements())


def test_integrate_pushforward_examples():
    pts = ["x", "y", "z"]
    A = SetAlgebra.powerset(pts)
    ident = {p: p for p in pts}
    zero = integrate_pushforward({p: 0 for p in pts}, ident, A, Z3)
    assert all(v == 0 for v in zero.values.values())
    dirac = integrate_pushforward({"x": 1, "y": 0, "z": 0}, ident, A, Z3)
    assert all(dirac(a) == (1 if "x" in a else 0) for a in A.elements())
    coarse = SetAlgebra.powerset([0, 1])
    f = {"x": 0, "y": 0, "z": 1}
    mu = integrate_pushforward({"x": 2, "y": 2, "z": 1}, f, coarse, Z3)
    assert mu({0}) == 1 and mu({1}) == 1 and mu({0, 1}) == 2


def test_indicator_integral_counts_fibers():
    X = space_P(3)
    B = algebra_of(["P(v1)"], X)
    R = map_R_semiring(B, X, Z3, 1)
    f = dual_map(B)
    for p, mu in R.items():
        g = indicator(p, X, 1, Z3)
        assert sum(g[q] for q in X.points) % 3 == p.structure.size % 3
        for hat in subsets(range(len(B.atoms))):
            count = sum(1 for q in X.fiber(p, 1) if f[q] in hat)
            assert mu(hat) == count % 3
