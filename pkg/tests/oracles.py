"""Brute-force linear-algebra oracles shared by the test suites."""

from itertools import product

import sympy
from gmpy2 import mpq

from dmodalg.ring import Operator, RingSpec


def monomials_upto(ring: RingSpec, D: int):
    nv = ring.nvars
    out = []
    for e in product(range(D + 1), repeat=nv):
        if sum(e) <= D:
            out.append(e)
    return out


def span_leads(vectors, order):
    """Leading monomials of the Q-span of ``vectors`` (term dicts)."""
    pivots = {}
    for v in vectors:
        v = dict(v)
        while v:
            lead = max(v, key=order.key)
            p = pivots.get(lead)
            if p is None:
                pivots[lead] = v
                break
            f = v[lead] / p[lead]
            for k, c in p.items():
                s = v.get(k, mpq(0)) - f * c
                if s:
                    v[k] = s
                else:
                    v.pop(k, None)
    return set(pivots)


def bounded_multiples(gens, D):
    """``m * g`` for every generator and monomial ``m`` of degree ``<= D``."""
    ring = gens[0].ring
    out = []
    for g in gens:
        for e in monomials_upto(ring, D):
            out.append((Operator.monomial(ring, e) * g).terms)
    return out


def relations(rows, D):
    """Basis of ``{(Q_1..Q_s) : sum Q_k rows_k = 0, deg Q_k <= D}``."""
    ring = rows[0].ring
    s = len(rows)
    cols = []
    images = []
    for k, r in enumerate(rows):
        for e in monomials_upto(ring, D):
            cols.append((k, e))
            images.append((Operator.monomial(ring, e) * r).terms)
    keys = sorted({m for im in images for m in im})
    index = {m: i for i, m in enumerate(keys)}
    M = sympy.zeros(len(keys), len(cols))
    for j, im in enumerate(images):
        for m, c in im.items():
            M[index[m], j] = sympy.Rational(int(c.numerator), int(c.denominator))
    out = []
    for vec in M.nullspace():
        terms = {}
        for j, c in enumerate(vec):
            if c != 0:
                k, e = cols[j]
                terms[(k, *e)] = mpq(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1]))
        out.append(Operator(ring, terms, s))
    return out
