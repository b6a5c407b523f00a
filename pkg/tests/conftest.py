import os
import sys

from gmpy2 import mpq
from hypothesis import strategies as st

from dmodalg.ring import Operator, RingSpec

JOBS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "jobs")

coefficients = st.builds(lambda a, b: mpq(a, b), st.integers(-5, 5), st.integers(1, 3))


@st.composite
def operators(draw, ring: RingSpec, max_terms=4, max_exp=2, rank=1, nonzero=False):
    nv = ring.nvars
    k = draw(st.integers(1 if nonzero else 0, max_terms))
    terms = {}
    for _ in range(k):
        exps = tuple(draw(st.lists(st.integers(0, max_exp), min_size=nv, max_size=nv)))
        comp = draw(st.integers(0, rank - 1))
        c = draw(coefficients)
        if c:
            terms[(comp, *exps)] = c
    if nonzero and not terms:
        terms[(0,) + (0,) * nv] = mpq(1)
    return Operator(ring, terms, rank)


@st.composite
def h_homogeneous(draw, ring: RingSpec, degree=None, max_terms=4, max_exp=2, rank=1):
    """Nonzero h-homogeneous operators of a common total degree."""
    from dmodalg.ring import homogenize_h

    base = ring.base()
    P = draw(operators(base, max_terms, max_exp, rank, nonzero=True))
    H = homogenize_h(P)
    if degree is not None:
        from dmodalg.ring import total_degree

        extra = degree - total_degree(H)
        if extra > 0:
            H = Operator.var(H.ring, "h", extra) * H if rank == 1 else \
                Operator._raw(H.ring, {(m[0], m[1] + extra, *m[2:]): c for m, c in H.terms.items()}, rank)
    return H
