"""Finitely presented modules ``A^l / (relations)`` and cohomology of
complexes of free modules given by matrices.

Matrices act on row vectors from the right: an ``a x b`` matrix sends
``(Q_1, ..., Q_a)`` to ``sum_i Q_i * row_i`` in ``A^b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .groebner import (GroebnerBasis, NotAGroebnerBasis, buchberger, divide, lead_monomial,
                       reduce_basis, syzygy_basis)
from .orders import monomial_order
from .ring import ONE, Operator, RingSpec, multiply


@dataclass
class Matrix:
    """An ``nrows x ncols`` matrix of rank-1 operators stored by rows."""

    ring: RingSpec
    nrows: int
    ncols: int
    entries: dict = field(default_factory=dict)   # (i, j) -> nonzero rank-1 Operator

    @classmethod
    def from_rows(cls, ring: RingSpec, rows: Sequence[Operator], ncols: int | None = None) -> "Matrix":
        if ncols is None:
            ncols = rows[0].rank if rows else 0
        M = cls(ring, len(rows), ncols)
        for i, r in enumerate(rows):
            if r.rank != ncols:
                raise ValueError("row rank does not match column count")
            for j, e in enumerate(r.entries()):
                if e.terms:
                    M.entries[(i, j)] = e
        return M

    def row(self, i: int) -> Operator:
        if self.ncols == 0:
            raise ValueError("rows of a matrix with no columns are not operators")
        return Operator.vector([self.entries.get((i, j), Operator.zero(self.ring)) for j in range(self.ncols)])

    def rows(self) -> list:
        return [self.row(i) for i in range(self.nrows)]

    def get(self, i, j) -> Operator:
        return self.entries.get((i, j), Operator.zero(self.ring))

    def is_zero(self) -> bool:
        return not self.entries

    def times(self, other: "Matrix") -> "Matrix":
        """Matrix product ``self * other`` (rows of self combine rows of other)."""
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        out = Matrix(self.ring, self.nrows, other.ncols)
        for (i, k), a in self.entries.items():
            for j in range(other.ncols):
                b = other.entries.get((k, j))
                if b is not None:
                    cur = out.entries.get((i, j), Operator.zero(self.ring)) + multiply(a, b)
                    if cur.terms:
                        out.entries[(i, j)] = cur
                    else:
                        out.entries.pop((i, j), None)
        return out

    def to_lists(self) -> list:
        from .text import render

        return [[render(self.get(i, j)) for j in range(self.ncols)] for i in range(self.nrows)]


@dataclass
class ModulePresentation:
    """``A^rank / (relations)`` over ``ring``; rank 0 is the zero module."""

    ring: RingSpec
    rank: int
    relations: list = field(default_factory=list)

    def __post_init__(self):
        for r in self.relations:
            if r.rank != self.rank or r.ring != self.ring:
                raise ValueError("relation does not live in the presented free module")

    def groebner(self, order=None) -> GroebnerBasis | None:
        rels = [r for r in self.relations if r.terms]
        if self.rank == 0 or not rels:
            return None
        order = order or monomial_order(self.ring, self.rank)
        return reduce_basis(buchberger(rels, order))

    def is_zero(self) -> bool:
        return is_zero_module(self)

    def is_cyclic(self) -> bool:
        return self.rank == 1

    def annihilator_gb(self) -> list:
        """Reduced GB of the relation ideal of a cyclic presentation."""
        if self.rank != 1:
            raise ValueError("presentation is not cyclic")
        G = self.groebner()
        return [] if G is None else G.elements

    def dimension(self):
        """Dimension over Q when the ring is A_0 = Q; ``None`` otherwise."""
        if self.ring.nweyl != 0:
            return None
        if self.rank == 0:
            return 0
        rows = [[r.constant_term(j) for j in range(self.rank)] for r in self.relations]
        return self.rank - matrix_rank(rows)

    def render(self) -> dict:
        from .text import render

        return {"rank": self.rank, "relations": [render(r) for r in self.relations]}


def matrix_rank(rows: Sequence[Sequence]) -> int:
    """Rank over Q by fraction-exact Gaussian elimination."""
    A = [[mpq(x) for x in r] for r in rows if any(r)]
    if not A:
        return 0
    ncols = len(A[0])
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(A)) if A[i][col]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        p = A[rank]
        inv = ONE / p[col]
        for i in range(len(A)):
            if i != rank and A[i][col]:
                f = A[i][col] * inv
                A[i] = [a - f * b for a, b in zip(A[i], p)]
        rank += 1
        if rank == len(A):
            break
    return rank


def is_zero_module(P: ModulePresentation) -> bool:
    """Every unit vector reduces to zero modulo a GB of the relations."""
    if P.rank == 0:
        return True
    G = P.groebner()
    if G is None:
        return False
    for i in range(P.rank):
        e = Operator.constant(P.ring, 1, i, P.rank)
        if divide(e, G, G.order)[1].terms:
            return False
    return True


def _unit_entry(rel: Operator):
    """A component where ``rel`` has a nonzero constant entry."""
    comps = {}
    for mono, c in rel.terms.items():
        comps.setdefault(mono[0], []).append((mono, c))
    best = None
    for k, terms in comps.items():
        if len(terms) == 1 and not any(terms[0][0][1:]):
            # prefer the sparsest relation/component for stability
            if best is None or k > best[0]:
                best = (k, terms[0][1])
    return best


def _drop_component(rel: Operator, k: int, rank: int) -> Operator:
    out = {}
    for mono, c in rel.terms.items():
        j = mono[0]
        if j == k:
            raise ValueError("component still present")
        out[(j - (j > k), *mono[1:])] = c
    return Operator._raw(rel.ring, out, rank - 1)


def _eliminate_units(ring: RingSpec, rank: int, rels: list):
    changed = True
    while changed and rank > 0:
        changed = False
        for idx, r in enumerate(rels):
            hit = _unit_entry(r)
            if hit is None:
                continue
            k, c = hit
            # e_k = -(1/c) * sum_{i != k} r_i e_i
            inv = ONE / c
            new = []
            for jdx, s in enumerate(rels):
                if jdx == idx:
                    continue
                sk = s.component(k)
                if sk.terms:
                    s = s - multiply(sk.scale(inv), r)
                if s.terms:
                    new.append(s)
            rank -= 1
            if rank == 0:
                return 0, []
            rels = [_drop_component(s, k, rank + 1) for s in new]
            rels = [s for s in rels if s.terms]
            changed = True
            break
    return rank, rels


def minimize_presentation(P: ModulePresentation) -> ModulePresentation:
    """Eliminate generators that some relation expresses through the others."""
    ring, rank = P.ring, P.rank
    rels = [r for r in P.relations if r.terms]
    while True:
        rank, rels = _eliminate_units(ring, rank, rels)
        if rank == 0:
            return ModulePresentation(ring, 0, [])
        if not rels:
            return ModulePresentation(ring, rank, [])
        G = reduce_basis(buchberger(rels, monomial_order(ring, rank)))
        rels2 = list(G.elements)
        if any(_unit_entry(r) is not None for r in rels2):
            rels = rels2
            continue
        return ModulePresentation(ring, rank, rels2)


def kernel_basis(M: Matrix) -> list:
    """Groebner basis (rank ``M.nrows``) of ``{Q : Q * M = 0}``.

    Augmented trick: rows ``[e_i | M_i]`` with the ``M`` block at the higher
    component indices under a position-over-term order; basis elements whose
    lead lies in the ``e`` block have vanishing ``M`` block.
    """
    a, b = M.nrows, M.ncols
    ring = M.ring
    if a == 0:
        return []
    if b == 0 or M.is_zero():
        return [Operator.constant(ring, 1, i, a) for i in range(a)]
    total = a + b
    aug = []
    for i in range(a):
        terms = {(i, *ring.zero_exp()): ONE}
        for j in range(b):
            e = M.entries.get((i, j))
            if e is not None:
                for mono, c in e.terms.items():
                    terms[(a + j, *mono[1:])] = c
        aug.append(Operator._raw(ring, terms, total))
    order = monomial_order(ring, total, position="pot")
    G = buchberger(aug, order, reduce=True)
    out = []
    for g in G.elements:
        if lead_monomial(g, order)[0] < a:
            out.append(Operator._raw(ring, {m: c for m, c in g.terms.items() if m[0] < a}, a))
    return out


def presentation_cohomology(kernel_of: Matrix | None, image_of: Matrix | None, rank: int | None = None
                            ) -> ModulePresentation:
    """Present ``ker(kernel_of) / im(image_of)`` on the free module of rank
    ``kernel_of.nrows`` (= ``image_of.ncols``)."""
    if kernel_of is not None:
        rank = kernel_of.nrows
        ring = kernel_of.ring
    elif image_of is not None:
        rank = image_of.ncols
        ring = image_of.ring
    else:
        raise ValueError("need at least one map")
    if image_of is not None and image_of.ncols != rank:
        raise ValueError("maps do not compose")
    if rank == 0:
        return ModulePresentation(ring, 0, [])
    if kernel_of is not None and image_of is not None and image_of.nrows and kernel_of.ncols:
        if not image_of.times(kernel_of).is_zero():
            raise ValueError("composite of the two maps is not zero")
    if kernel_of is None:
        K = [Operator.constant(ring, 1, i, rank) for i in range(rank)]
    else:
        K = kernel_basis(kernel_of)
    if not K:
        return ModulePresentation(ring, 0, [])
    l = len(K)
    order = monomial_order(ring, rank, position="pot")
    Kgb = reduce_basis(buchberger(K, order))
    K = Kgb.elements
    l = len(K)
    rels = []
    if image_of is not None:
        for i in range(image_of.nrows):
            r = image_of.row(i) if image_of.ncols else None
            if r is None or not r.terms:
                continue
            q, rem = divide(r, K, order)
            if rem.terms:
                raise ValueError("image row is not in the kernel")
            rels.append(Operator.vector(q) if l else None)
    if l > 1:
        syz = syzygy_basis(K, order)
        rels.extend(syz.generators)
    rels = [r for r in rels if r is not None and r.terms]
    return ModulePresentation(ring, l, rels)
