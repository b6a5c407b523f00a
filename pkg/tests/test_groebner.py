"""Division, Buchberger, F-bases, syzygies and adapted resolutions."""

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from dmodalg.groebner import (NotAGroebnerBasis, adapted_resolution, buchberger, compose_rows, divide,
                              f_groebner, ideal_equal, is_groebner, lead_monomial, minimalize, reduce_basis,
                              symbol, syzygy_basis)
from dmodalg.orders import F_order, OrderError, h_order, monomial_order
from dmodalg.ring import Operator, RingSpec, homogenize_h, order_of, v_weight
from dmodalg.text import parse, render

from conftest import operators
from oracles import bounded_multiples, relations, span_leads

A1 = RingSpec(0, 1)
T1 = RingSpec(1, 0)
A2 = RingSpec(0, 2)
B2 = RingSpec(1, 1)


def ops(ring, *texts):
    return [parse(t, ring) for t in texts]


def rgb(gens, order=None):
    order = order or monomial_order(gens[0].ring, gens[0].rank)
    return [render(g) for g in reduce_basis(buchberger(gens, order)).elements]


# ---------------------------------------------------------------------------
# examples


def test_weyl_unit_ideal():
    assert rgb(ops(A1, "x1", "dx1")) == ["1"]


def test_single_generator_is_its_own_basis():
    assert rgb(ops(T1, "t1*dt1 + 1")) == ["t1*dt1 + 1"]


def test_reduce_basis_examples():
    assert rgb(ops(A1, "x1", "x1 + 1")) == ["1"]
    assert rgb(ops(A1, "x1^2", "x1")) == ["x1"]


def test_divide_reconstructs():
    G = ops(A2, "x1*dx1 + 1", "dx2")
    o = monomial_order(A2)
    P = parse("x1^2*dx1^2*dx2 + x2*dx2 + 3", A2)
    q, r = divide(P, G, o)
    assert sum((a * g for a, g in zip(q, G)), r) == P


def test_f_groebner_example():
    F = f_groebner(ops(T1, "dt1 + t1"))
    assert F.elements == ops(T1, "dt1 + t1")
    assert F.order.kind == "F_order"
    F1 = f_groebner(ops(T1, "1"))
    assert [render(g) for g in F1.elements] == ["1"]


def test_f_groebner_routes_agree_on_initial_ideal():
    gens = ops(B2, "t1 - x1^2", "dx1 + 2*x1*dt1")
    sig = {}
    for route in ("t0", "h"):
        F = f_groebner(gens, route=route)
        sig[route] = [symbol(g) for g in F.elements]
    o = monomial_order(B2)
    assert ideal_equal(sig["t0"], sig["h"], o)


def test_non_well_order_refuses_division():
    with pytest.raises(OrderError):
        divide(parse("t1", T1), ops(T1, "dt1 + t1"), F_order(T1))


def test_syzygy_of_two_variables():
    G = buchberger(ops(A2, "x1", "x2"), monomial_order(A2))
    S = syzygy_basis(G)
    assert len(S.generators) == 1
    V = S.generators[0]
    g1, g2 = G.elements
    assert V == Operator.vector([g2, -g1]) or V == Operator.vector([-g2, g1])


def test_single_generator_has_no_syzygies():
    G = buchberger(ops(A2, "x1*dx2 + 1"), monomial_order(A2))
    assert syzygy_basis(G).generators == []


def test_syzygy_of_a_non_basis_is_rejected():
    with pytest.raises(NotAGroebnerBasis):
        syzygy_basis(ops(A1, "x1", "dx1"), monomial_order(A1))


# ---------------------------------------------------------------------------
# properties


small_sets = st.lists(operators(A2, max_terms=3, max_exp=1, nonzero=True), min_size=1, max_size=3)


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(small_sets)
def test_generators_reduce_to_zero(gens):
    o = monomial_order(A2)
    G = buchberger(gens, o)
    assert is_groebner(G.elements, o)
    for g in gens:
        assert not divide(g, G, o)[1].terms
    R = reduce_basis(G)
    assert is_groebner(R.elements, o)
    assert all(g.terms[lead_monomial(g, o)] == 1 for g in R.elements)


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(small_sets)
def test_selection_strategy_does_not_change_the_reduced_basis(gens):
    o = monomial_order(A2)
    assert buchberger(gens, o).elements == buchberger(gens, o, strategy="normal").elements


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(operators(A2, max_terms=3, max_exp=1, nonzero=True), min_size=1, max_size=3))
def test_cone_coverage(gens):
    """Every leading exponent of a bounded-degree ideal element lies in the
    cone of some basis lead (the defining property of a Groebner basis)."""
    o = monomial_order(A2)
    leads = [lead_monomial(g, o) for g in reduce_basis(buchberger(gens, o)).elements]
    for L in span_leads(bounded_multiples(gens, 2), o):
        assert any(a[0] == L[0] and all(x <= y for x, y in zip(a[1:], L[1:])) for a in leads), L


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(operators(A2, max_terms=2, max_exp=1, nonzero=True), min_size=2, max_size=3))
def test_syzygy_completeness(gens):
    o = monomial_order(A2)
    G = reduce_basis(buchberger(gens, o)).elements
    if len(G) < 2:
        return
    S = syzygy_basis(G, o)
    for V in S.generators:
        assert not any(x.terms for x in compose_rows([V], G))
    if not S.generators:
        return
    SG = buchberger(S.generators, S.order)
    for rel in relations(G, 1):
        assert not divide(rel, SG, S.order)[1].terms


RESOLUTION_INPUTS = [
    (B2, ["dt1", "dx1"], None),
    (B2, ["t1*dt1 + 1", "dx1"], None),
    (B2, ["t1 - x1^2", "dx1 + 2*x1*dt1"], None),
    (RingSpec(2, 0), ["t1*dt1 - t2*dt2", "dt1*dt2"], None),
    (B2, ["[dt1, 0]", "[x1, t1]", "[0, dx1]"], (0, 1)),
]


@pytest.mark.parametrize("route", ["h", "t0"])
@pytest.mark.parametrize("ring,texts,m", RESOLUTION_INPUTS)
def test_resolution_is_an_adapted_complex(ring, texts, m, route):
    gens = ops(ring, *texts)
    res = adapted_resolution(gens, m, ring.d + ring.n + 1, route)
    w = v_weight(ring)
    for j in range(1, len(res.levels)):
        assert not any(x.terms for x in compose_rows(res.levels[j], res.levels[j - 1]))
    for j, rows in enumerate(res.levels):
        # recorded shifts are the orders of the rows
        assert res.shifts[j + 1] == tuple(order_of(r, w, res.shifts[j]) for r in rows)


@pytest.mark.parametrize("ring,texts,m", RESOLUTION_INPUTS[:4])
def test_resolution_exactness(ring, texts, m):
    gens = ops(ring, *texts)
    res = adapted_resolution(gens, m, 2, "h")
    if len(res.levels) < 2:
        pytest.skip("resolution stops at the first level")
    lo, hi = res.levels[0], res.levels[1]
    o = monomial_order(ring, len(lo))
    H = buchberger(hi, o)
    for rel in relations(lo, 1):
        assert not divide(rel, H, o)[1].terms


@pytest.mark.parametrize("ring,texts,m", RESOLUTION_INPUTS)
def test_resolution_length_bound(ring, texts, m):
    N = ring.d + ring.n
    res = adapted_resolution(ops(ring, *texts), m, 2 * N + 2, "h")
    # psi_{2N+2} = 0: there is no level 2N+2
    assert len(res.levels) <= 2 * N + 1


def test_minimalize_drops_redundant_leads():
    o = monomial_order(A1)
    out = minimalize(ops(A1, "x1", "x1^2 + dx1", "x1*dx1"), o)
    assert [render(g) for g in out] == ["x1"]
