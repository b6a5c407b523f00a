"""Cohomology of the restriction of ``A_{d+n}^r / N`` to ``t = 0``.

A V-adapted free resolution of length ``d + 1`` is truncated to the window
``[k0, k1]`` spanned by the integral roots of the b-function; tensoring with
``A_{d+n} / t A_{d+n}`` leaves a complex of free ``A_n``-modules of finite
rank whose cohomology is returned as module presentations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Sequence

from .bfunction import BPoly, NotSpecializable, b_function, integer_roots
from .groebner import Resolution, adapted_resolution
from .presentation import Matrix, ModulePresentation, matrix_rank, minimize_presentation, \
    presentation_cohomology
from .ring import ZERO, Operator, RingSpec, mono_mul

log = logging.getLogger(__name__)


def compositions(total: int, d: int) -> list:
    """All ``nu`` in ``N^d`` with ``|nu| = total``."""
    out = []
    for combo in combinations_with_replacement(range(d), total):
        nu = [0] * d
        for j in combo:
            nu[j] += 1
        out.append(tuple(nu))
    return out


def level_labels(shift: Sequence[int], d: int, k0: int, k1: int) -> list:
    """Labels ``(nu, i)`` with ``k0 - m_i <= |nu| <= k1 - m_i``, ordered by
    ``(|nu|, reverse-lex nu, i)``."""
    labels = []
    for i, mi in enumerate(shift):
        lo, hi = max(0, k0 - mi), k1 - mi
        for tot in range(lo, hi + 1):
            for nu in compositions(tot, d):
                labels.append((nu, i))
    labels.sort(key=lambda l: (sum(l[0]), tuple(-x for x in reversed(l[0])), l[1]))
    return labels


def target_ring(ring: RingSpec) -> RingSpec:
    return RingSpec(0, ring.n, "none", (), (), ring.xnames)


def induced_matrix(rows: Sequence[Operator], src_labels: Sequence, tgt_labels: Sequence,
                   tgt_shift: Sequence[int], k0: int, k1: int, ring: RingSpec | None = None) -> Matrix:
    """Matrix over ``A_n`` of ``sum_nu dt^nu e_(nu,i) -> dt^nu * row_i`` modulo
    ``t A`` and the window."""
    if ring is None:
        ring = rows[0].ring
    d, n = ring.d, ring.n
    nc = ring.ncentral
    if nc:
        raise ValueError("rows must live in an unextended Weyl algebra")
    tr = target_ring(ring)
    M = Matrix(tr, len(src_labels), len(tgt_labels))
    tindex = {lab: j for j, lab in enumerate(tgt_labels)}
    for a, (nu, i) in enumerate(src_labels):
        row = rows[i]
        dexp = [0] * ring.nvars
        for j in range(d):
            dexp[d + n + j] = nu[j]
        prod = mono_mul(ring, dexp, row.terms) if any(nu) else row.terms
        acc: dict = {}
        for mono, c in prod.items():
            if any(mono[1 + j] for j in range(d)):
                continue
            sigma = tuple(mono[1 + d + n + j] for j in range(d))
            k = mono[0]
            lab = (sigma, k)
            col = tindex.get(lab)
            if col is None:
                w = sum(sigma) + tgt_shift[k]
                if w > k1:
                    raise ValueError(f"row leaves the filtration window (order {w} > {k1}); "
                                     "the resolution is not adapted")
                continue
            key = (col, 0, *(mono[1 + d + j] for j in range(n)), *(mono[1 + 2 * d + n + j] for j in range(n)))
            s = acc.get(key, ZERO) + c
            if s:
                acc[key] = s
            else:
                acc.pop(key, None)
        per_col: dict = {}
        for key, c in acc.items():
            per_col.setdefault(key[0], {})[key[1:]] = c
        for col, terms in per_col.items():
            M.entries[(a, col)] = Operator._raw(tr, terms)
    return M


@dataclass
class TruncatedComplex:
    ring: RingSpec                # the target A_n
    labels: list                  # per level j = 0..L
    matrices: list                # matrices[j-1] is the map level j -> level j-1
    window: tuple | None
    b: BPoly | None = None
    resolution: Resolution | None = None

    @property
    def ranks(self) -> list:
        return [len(l) for l in self.labels]

    def composite_zero(self) -> bool:
        for j in range(1, len(self.matrices)):
            A, B = self.matrices[j], self.matrices[j - 1]
            if A.nrows and B.ncols and not A.times(B).is_zero():
                return False
        return True


def restriction_complex(generators: Sequence[Operator], m: Sequence[int] | None = None,
                        window: tuple | None = None, depth: int | None = None, route: str = "h",
                        b: BPoly | None = None) -> TruncatedComplex:
    """Truncated induced complex; empty when the b-function has no integral root."""
    if not generators:
        raise ValueError("no generators")
    ring, rank = generators[0].ring, generators[0].rank
    d = ring.d
    m = tuple(m) if m is not None else (0,) * rank
    if window is None:
        if b is None:
            b = b_function(generators, m).b
        if b.is_zero():
            raise NotSpecializable("the b-function is zero; the module is not specializable")
        roots, span = integer_roots(b)
        if not roots:
            return TruncatedComplex(target_ring(ring), [], [], None, b)
        window = span
    k0, k1 = window
    length = d + 1 if depth is None else min(d + 1, depth + 1)
    res = adapted_resolution(generators, m, length, route)
    labels = [level_labels(res.shifts[j], d, k0, k1) for j in range(len(res.shifts))]
    mats = []
    for j in range(1, len(res.shifts)):
        mats.append(induced_matrix(res.levels[j - 1], labels[j], labels[j - 1], res.shifts[j - 1], k0, k1, ring))
    return TruncatedComplex(target_ring(ring), labels, mats, (k0, k1), b, res)


@dataclass
class RestrictionResult:
    degrees: list                 # 0, -1, ..., -depth
    cohomology: list              # ModulePresentation per degree
    dimensions: list | None       # when the target is A_0
    complex: TruncatedComplex

    def by_degree(self, i: int) -> ModulePresentation:
        return self.cohomology[self.degrees.index(i)]


def complex_cohomology(C: TruncatedComplex, degrees: Sequence[int], minimize: bool = True) -> list:
    out = []
    L = len(C.labels)
    for i in degrees:
        j = -i
        if j >= L or not C.labels[j]:
            out.append(ModulePresentation(C.ring, 0, []))
            continue
        ker = C.matrices[j - 1] if j >= 1 else None
        img = C.matrices[j] if j < len(C.matrices) else None
        if ker is not None and ker.ncols == 0:
            ker = None
        P = presentation_cohomology(ker, img, len(C.labels[j]))
        if minimize and P.rank:
            P = minimize_presentation(P)
        out.append(P)
    return out


def complex_dimensions(C: TruncatedComplex, degrees: Sequence[int]) -> list:
    """Dimensions over Q for a complex of finite-dimensional vector spaces."""
    if C.ring.nweyl:
        raise ValueError("dimensions need the target ring A_0")
    ranks = []
    for M in C.matrices:
        rows = [[M.get(a, b).constant_term() for b in range(M.ncols)] for a in range(M.nrows)]
        ranks.append(matrix_rank(rows))
    out = []
    for i in degrees:
        j = -i
        if j >= len(C.labels):
            out.append(0)
            continue
        r_out = ranks[j - 1] if j >= 1 else 0
        r_in = ranks[j] if j < len(ranks) else 0
        out.append(len(C.labels[j]) - r_out - r_in)
    return out


def restrict(generators: Sequence[Operator], m: Sequence[int] | None = None, window: tuple | None = None,
             depth: int | None = None, route: str = "h", minimize: bool = True) -> RestrictionResult:
    """Cohomology ``H^i`` for ``i = 0, -1, ..., -d`` (or down to ``-depth``)."""
    ring = generators[0].ring
    d = ring.d
    top = d if depth is None else min(d, depth)
    degrees = [-j for j in range(top + 1)]
    C = restriction_complex(generators, m, window, depth, route)
    tr = C.ring
    if not C.labels:
        zero = [ModulePresentation(tr, 0, []) for _ in degrees]
        return RestrictionResult(degrees, zero, [0] * len(degrees) if tr.nweyl == 0 else None, C)
    if tr.nweyl == 0:
        dims = complex_dimensions(C, degrees)
        pres = [ModulePresentation(tr, k, []) for k in dims]
        return RestrictionResult(degrees, pres, dims, C)
    pres = complex_cohomology(C, degrees, minimize)
    return RestrictionResult(degrees, pres, None, C)
