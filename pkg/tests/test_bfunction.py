"""b-functions along t = 0."""

from itertools import combinations

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from dmodalg.bfunction import (BPoly, NotSpecializable, annihilation_residue, b_function, b_function_linear,
                               eval_at_theta, falling_factorial, integer_roots, psi, s_ring, theta_operator,
                               upoly_gcd, upoly_lcm, upoly_mul)
from dmodalg.groebner import f_groebner
from dmodalg.restriction import restrict
from dmodalg.ring import Operator, RingSpec
from dmodalg.text import parse

T1 = RingSpec(1, 0)
B2 = RingSpec(1, 1)

D1_CASES = [
    (T1, ["dt1 + t1"], [0]),
    (T1, ["t1*dt1 + 1"], [-1]),
    (T1, ["dt1"], [0]),
    (T1, ["t1"], [-1]),
    (T1, ["t1^2"], [-1, -2]),
    (B2, ["t1 - x1^2", "dx1 + 2*x1*dt1"], [0, mpq(-1, 2)]),
    (B2, ["t1*dt1 - 1/3", "dx1"], [mpq(1, 3)]),
]


def gens(ring, texts):
    return [parse(t, ring) for t in texts]


@pytest.mark.parametrize("ring,texts,roots", D1_CASES)
def test_b_function_values(ring, texts, roots):
    b = b_function(gens(ring, texts)).b
    assert b == BPoly.from_roots(roots)
    assert b_function_linear(gens(ring, texts)) == b


@pytest.mark.parametrize("ring,texts,roots", D1_CASES)
def test_b_annihilates_and_is_minimal(ring, texts, roots):
    G = gens(ring, texts)
    F = f_groebner(G, position="pot")
    b = b_function(G, fgb=F).b
    assert all(not r.terms for r in annihilation_residue(b, F))
    rts = b.rational_roots()
    for k in range(len(rts)):
        for sub in combinations(range(len(rts)), k):
            d = BPoly.from_roots([rts[i] for i in sub])
            assert any(r.terms for r in annihilation_residue(d, F)), d


@pytest.mark.parametrize("route", ["t0", "h"])
def test_routes_agree(route):
    G = gens(B2, ["t1 - x1^3", "dx1 + 3*x1^2*dt1"])
    assert b_function(G, route=route).b == BPoly.from_roots([0, mpq(-1, 3), mpq(-2, 3)])


@settings(max_examples=10, deadline=None)
@given(st.integers(-3, 3))
def test_shift_translates_roots(c):
    M = [parse("[dt1, 0]", T1), parse("[t1, -1]", T1), parse("[0, t1*dt1 + 2]", T1)]
    b0 = b_function(M, (0, 1)).b
    bc = b_function(M, (c, 1 + c)).b
    assert bc == b0.shift(-c)


def test_vector_module_b_function():
    M = [parse("[t1*dt1, 0]", T1), parse("[0, dt1]", T1)]
    r = b_function(M, (0, 2))
    # component 0 gives theta, component 1 gives theta shifted by its weight
    assert r.b == BPoly.from_roots([0, 2])


def test_zero_b_function_is_reported():
    r = b_function(gens(B2, ["dx1"]))
    assert r.b.is_zero()
    with pytest.raises(NotSpecializable):
        restrict(gens(B2, ["dx1"]))


def test_integer_roots_and_window():
    b = BPoly.from_roots([mpq(1, 2), -3, 2, 2])
    assert integer_roots(b) == ([-3, 2], (-3, 2))
    assert integer_roots(BPoly.from_roots([mpq(1, 3)])) == ([], None)


def test_large_root_bound_uses_divisors():
    b = BPoly.from_roots([10 ** 6 + 3, -7])
    assert integer_roots(b)[0] == [-7, 10 ** 6 + 3]


def test_polynomial_helpers():
    a = [mpq(-1), mpq(1)]          # s - 1
    b = [mpq(-2), mpq(1)]          # s - 2
    assert upoly_gcd(upoly_mul(a, b), a) == a
    assert upoly_lcm(a, b) == upoly_mul(a, b)
    assert tuple(falling_factorial(3)) == BPoly.from_roots([0, 1, 2], "s").coeffs


def test_psi_on_euler_operator():
    S = s_ring(T1)
    assert psi(parse("t1*dt1", T1), S) == Operator.var(S, "s1")
    # t^2 dt^2 = s(s - 1)
    assert psi(parse("t1^2*dt1^2", T1), S) == parse("s1^2 - s1", S)


def test_theta_evaluation():
    th = theta_operator(B2)
    assert th == parse("t1*dt1", B2)
    b = BPoly.from_roots([1, 2])
    assert eval_at_theta(b, B2) == (th - Operator.constant(B2, 1)) * (th - Operator.constant(B2, 2))
