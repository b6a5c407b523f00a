"""Division, Buchberger's algorithm, F[m]-Groebner bases, Schreyer syzygies
and filtration-adapted free resolutions.

All routines work on the keyed term dictionaries of :mod:`dmodalg.ring` and
any :class:`~dmodalg.orders.OrderSpec`.  Leading terms of products behave
(``lead(x^a * g) = a + lead(g)``) for every order built by
:mod:`dmodalg.orders` because lower-order terms of a Weyl product have
componentwise smaller exponents (plus powers of ``h`` that count as the
smallest variable).
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from typing import Sequence

from .orders import (OrderError, OrderSpec, H_order, F_order, h_order, monomial_order,
                     schreyer_order, check_weight)
from .ring import (ONE, ZERO, Operator, RingSpec, dehomogenize, homogenize_F, homogenize_h,
                   mono_mul, order_of, total_degree, v_weight)

log = logging.getLogger(__name__)


class NotAGroebnerBasis(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# low-level basis store


def _mask(mono) -> int:
    m = 0
    for i, e in enumerate(mono[1:]):
        if e:
            m |= 1 << i
    return m


def _divides(a, b) -> bool:
    """Keyed monomial ``a`` divides ``b`` (same component, exponents below)."""
    if a[0] != b[0]:
        return False
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a, b):
    return (a[0], *map(max, a[1:], b[1:]))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a[1:], b[1:]))


class _Store:
    """Basis elements with cached leads and divisibility masks."""

    __slots__ = ("ring", "order", "terms", "leads", "lcs", "masks", "comps", "alive")

    def __init__(self, ring: RingSpec, order: OrderSpec):
        self.ring, self.order = ring, order
        self.terms, self.leads, self.lcs, self.masks, self.comps, self.alive = [], [], [], [], [], []

    def add(self, terms: dict) -> int:
        lead = max(terms, key=self.order.key)
        self.terms.append(terms)
        self.leads.append(lead)
        self.lcs.append(terms[lead])
        self.masks.append(_mask(lead))
        self.comps.append(lead[0])
        self.alive.append(True)
        return len(self.terms) - 1

    def find_divisor(self, mono, mask, only_alive=False) -> int:
        c = mono[0]
        leads, masks, comps, alive = self.leads, self.masks, self.comps, self.alive
        for i in range(len(leads)):
            if comps[i] == c and not masks[i] & ~mask and (not only_alive or alive[i]):
                if all(x <= y for x, y in zip(leads[i], mono)):
                    return i
        return -1


def _reduce(ring: RingSpec, poly: dict, store: _Store, track: bool = False, full: bool = True,
            skip: int = -1):
    """Reduce ``poly`` modulo ``store``.

    Returns ``(remainder, quotients)`` where ``quotients`` maps basis index to
    a rank-1 term dictionary (only when ``track``).  With ``full=False`` only
    leading terms are reduced.  ``skip`` excludes one basis index (used for
    inter-reduction).
    """
    order = store.order
    key = order.key
    p = dict(poly)
    heap = [(_neg(key(m)), m) for m in p]
    heapq.heapify(heap)
    rem: dict = {}
    quots: dict = {}
    leads, lcs, terms_, masks, comps = store.leads, store.lcs, store.terms, store.masks, store.comps
    n = len(leads)
    while heap:
        _, m = heapq.heappop(heap)
        c = p.get(m)
        if c is None:
            continue
        mk = _mask(m)
        comp = m[0]
        hit = -1
        for i in range(n):
            if i != skip and comps[i] == comp and not masks[i] & ~mk:
                if all(x <= y for x, y in zip(leads[i], m)):
                    hit = i
                    break
        if hit < 0:
            del p[m]
            rem[m] = c
            if not full:
                rem.update(p)
                p = {}
                break
            continue
        q = _sub(m, leads[hit])
        coef = -c / lcs[hit]
        prod = mono_mul(ring, q, terms_[hit], coef)
        get = p.get
        for k, v in prod.items():
            old = get(k)
            if old is None:
                p[k] = v
                heapq.heappush(heap, (_neg(key(k)), k))
            else:
                s = old + v
                if s:
                    p[k] = s
                else:
                    del p[k]
        if m in p:  # should have cancelled exactly
            raise NotAGroebnerBasis("leading term did not cancel; the order is not compatible with products")
        if track:
            qd = quots.setdefault(hit, {})
            qk = (0, *q)
            s = qd.get(qk, ZERO) - coef
            if s:
                qd[qk] = s
            else:
                del qd[qk]
    return rem, quots


_NEG_CACHE: dict = {}


def _neg(k):
    got = _NEG_CACHE.get(k)
    if got is None:
        if len(_NEG_CACHE) > 500000:
            _NEG_CACHE.clear()
        got = tuple(-x for x in k)
        _NEG_CACHE[k] = got
    return got


# ---------------------------------------------------------------------------
# public types


@dataclass
class GroebnerBasis:
    """A Groebner basis together with the order it is a basis for."""

    ring: RingSpec
    rank: int
    order: OrderSpec
    elements: list
    reduced: bool = False
    flavor: str = "none"
    homogenized: list | None = None
    hom_order: OrderSpec | None = None

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def leads(self) -> list:
        return [lead_monomial(g, self.order) for g in self.elements]


def lead_monomial(P: Operator, order: OrderSpec) -> tuple:
    if not P.terms:
        raise ValueError("zero operator has no leading term")
    return max(P.terms, key=order.key)


def lead_coefficient(P: Operator, order: OrderSpec):
    return P.terms[lead_monomial(P, order)]


def _check_homogeneous_row(polys, order: OrderSpec) -> bool:
    """Each element is homogeneous for the order's first weight row."""
    if not order.rows:
        return False
    w, m = order.rows[0]
    for p in polys:
        vals = {sum(a * b for a, b in zip(w, mono[1:])) + m[mono[0]] for mono in p}
        if len(vals) > 1:
            return False
    return True


def divide(P: Operator, G, order: OrderSpec, full: bool = True, allow_nonwell: bool = False):
    """Division with remainder: ``P = sum q_j G_j + r``.

    ``G`` is a list of operators or a :class:`GroebnerBasis`.  Under an order
    that is not a well-order (an F-order) the inputs must be homogeneous for
    its leading weight row, in which case the division stays inside one weight
    level and terminates; ``allow_nonwell`` states that the caller accepts
    this route.
    """
    G = list(G.elements if isinstance(G, GroebnerBasis) else G)
    ring, rank = P.ring, P.rank
    for g in G:
        if g.ring != ring or g.rank != rank:
            raise ValueError("divisor lives in another module")
    if not order.is_well_order():
        if not allow_nonwell or not _check_homogeneous_row([P.terms] + [g.terms for g in G], order):
            raise OrderError("division under a non-well order needs homogeneous inputs and allow_nonwell")
    store = _Store(ring, order)
    idx = []
    for g in G:
        idx.append(store.add(g.terms) if g.terms else None)
    rem, quots = _reduce(ring, P.terms, store, track=True, full=full)
    quotients = []
    for j in idx:
        quotients.append(Operator._raw(ring, quots.get(j, {}) if j is not None else {}))
    return quotients, Operator._raw(ring, rem, rank)


def normal_form(P: Operator, G, order: OrderSpec, **kw) -> Operator:
    return divide(P, G, order, **kw)[1]


# ---------------------------------------------------------------------------
# Buchberger


def _pair_key(order: OrderSpec, lcm, sugar=0):
    return (sugar, sum(lcm[1:]), order.key(lcm))


def buchberger(generators: Sequence[Operator], order: OrderSpec, reduce: bool = True,
               flavor: str = "none", max_steps: int | None = None, strategy: str = "sugar") -> GroebnerBasis:
    """Groebner basis of the left module generated by ``generators``.

    Pairs are selected by smallest sugar degree, then smallest lcm degree,
    then order (``strategy="normal"`` drops the sugar component; on
    homogeneous input the two coincide).  Pair updates follow Gebauer-Moeller
    with the chain criterion only; the product criterion is not valid in the
    Weyl algebra.
    """
    if strategy not in ("sugar", "normal"):
        raise ValueError(f"unknown selection strategy {strategy!r}")
    use_sugar = strategy == "sugar"
    gens = [g for g in generators if g.terms]
    if not generators:
        raise ValueError("buchberger needs at least one generator (possibly zero) to fix the module")
    ring, rank = generators[0].ring, generators[0].rank
    for g in generators:
        if g.ring != ring or g.rank != rank:
            raise ValueError("generators live in different modules")
    if not order.is_well_order():
        raise OrderError("buchberger needs a well-order; use f_groebner for F-orders")
    store = _Store(ring, order)
    pairs: list = []
    sugars: list = []
    counter = 0

    def insert(poly, sugar):
        nonlocal counter
        # monic elements keep rational coefficients from swelling
        lc = poly[max(poly, key=order.key)]
        if lc != 1:
            inv = ONE / lc
            poly = {m: c * inv for m, c in poly.items()}
        k = store.add(poly)
        sugars.append(max(sugar, _degree(poly)))
        lk = store.leads[k]
        # Gebauer-Moeller: drop old pairs whose lcm is a strict multiple in a chain
        keep = []
        for item in pairs:
            _, _, i, j, L = item
            if _divides(lk, L) and _lcm(store.leads[i], lk) != L and _lcm(store.leads[j], lk) != L:
                continue
            keep.append(item)
        if len(keep) != len(pairs):
            pairs[:] = keep
            heapq.heapify(pairs)
        new = []
        for i in range(k):
            if store.alive[i] and store.comps[i] == store.comps[k]:
                new.append((i, _lcm(store.leads[i], lk)))
        # criterion M/F among the new pairs
        chosen = []
        for a, (i, L) in enumerate(new):
            redundant = False
            for b, (j, L2) in enumerate(new):
                if b != a and _divides(L2, L) and (L2 != L or b < a):
                    redundant = True
                    break
            if not redundant:
                chosen.append((i, L))
        for i, L in chosen:
            counter += 1
            sg = 0
            if use_sugar:
                sg = max(sugars[i] + sum(L[1:]) - sum(store.leads[i][1:]), sugars[k] + sum(L[1:]) - sum(lk[1:]))
            heapq.heappush(pairs, (_pair_key(order, L, sg), counter, i, k, L))
        for i in range(k):
            if store.alive[i] and store.comps[i] == store.comps[k] and _divides(lk, store.leads[i]):
                store.alive[i] = False

    unit = (0,) * (ring.nvars + 1)

    def found_unit() -> bool:
        # a constant in a cyclic module generates everything
        return rank == 1 and unit in store.leads

    for g in gens:
        r, _ = _reduce(ring, g.terms, store)
        if r:
            insert(r, _degree(g.terms))
    steps = 0
    while pairs and not found_unit():
        (sg, *_), _, i, j, L = heapq.heappop(pairs)
        steps += 1
        if max_steps is not None and steps > max_steps:
            raise RuntimeError("buchberger step limit exceeded")
        s = _spoly(ring, store, i, j, L)
        r, _ = _reduce(ring, s, store)
        if r:
            insert(r, sg)
    if found_unit():
        elems = [{unit: ONE}]
    else:
        elems = [store.terms[i] for i in range(len(store.terms)) if store.alive[i]]
    out = [Operator._raw(ring, t, rank) for t in elems]
    gb = GroebnerBasis(ring, rank, order, out, False, flavor)
    log.debug("buchberger: %d elements after %d pairs", len(out), steps)
    return reduce_basis(gb) if reduce else gb


def _degree(terms) -> int:
    return max(sum(m[1:]) for m in terms)


def _spoly(ring, store: _Store, i: int, j: int, L) -> dict:
    """``x^(L-Li) g_i / c_i - x^(L-Lj) g_j / c_j``."""
    a = mono_mul(ring, _sub(L, store.leads[i]), store.terms[i], ONE / store.lcs[i])
    b = mono_mul(ring, _sub(L, store.leads[j]), store.terms[j], -ONE / store.lcs[j])
    for k, v in b.items():
        s = a.get(k, ZERO) + v
        if s:
            a[k] = s
        else:
            a.pop(k, None)
    return a


def minimalize(elements: Sequence[Operator], order: OrderSpec) -> list:
    """Drop elements whose lead is divisible by another's (first one wins on ties)."""
    items = [(lead_monomial(g, order), g) for g in elements if g.terms]
    out = []
    for a, (la, ga) in enumerate(items):
        red = False
        for b, (lb, gb) in enumerate(items):
            if b != a and _divides(lb, la) and (lb != la or b < a):
                red = True
                break
        if not red:
            out.append(ga)
    return out


def reduce_basis(G: GroebnerBasis) -> GroebnerBasis:
    """Minimal, tail-reduced, monic basis, sorted by leading monomial."""
    order = G.order
    if not order.is_well_order():
        raise OrderError("reduce_basis needs a well-order")
    elems = minimalize(G.elements, order)
    store = _Store(G.ring, order)
    for g in elems:
        store.add(g.terms)
    out = []
    for k in range(len(elems)):
        lead = store.leads[k]
        tail = dict(store.terms[k])
        c = tail.pop(lead)
        r, _ = _reduce(G.ring, tail, store, skip=k)
        r[lead] = c
        inv = ONE / c
        out.append(Operator._raw(G.ring, {m: v * inv for m, v in r.items()}, G.rank))
    out.sort(key=lambda g: order.key(lead_monomial(g, order)))
    return GroebnerBasis(G.ring, G.rank, order, out, True, G.flavor, G.homogenized, G.hom_order)


def groebner(generators: Sequence[Operator], order: OrderSpec | None = None, **kw) -> GroebnerBasis:
    if order is None:
        g0 = generators[0]
        order = monomial_order(g0.ring, g0.rank)
    return buchberger(generators, order, **kw)


def is_groebner(G: Sequence[Operator], order: OrderSpec) -> bool:
    """Buchberger criterion: every S-pair reduces to zero."""
    G = [g for g in G if g.terms]
    if not G:
        return True
    store = _Store(G[0].ring, order)
    for g in G:
        store.add(g.terms)
    for j in range(len(G)):
        for i in range(j):
            if store.comps[i] != store.comps[j]:
                continue
            L = _lcm(store.leads[i], store.leads[j])
            r, _ = _reduce(G[0].ring, _spoly(G[0].ring, store, i, j, L), store, full=False)
            if r:
                return False
    return True


def ideal_equal(A: Sequence[Operator], B: Sequence[Operator], order: OrderSpec | None = None) -> bool:
    """Equality of generated left submodules via reduced Groebner bases."""
    A = [a for a in A if a.terms]
    B = [b for b in B if b.terms]
    if not A or not B:
        return not A and not B
    if order is None:
        order = monomial_order(A[0].ring, A[0].rank)
    return reduce_basis(buchberger(A, order)).elements == reduce_basis(buchberger(B, order)).elements


# ---------------------------------------------------------------------------
# F[m]-Groebner bases


def f_groebner(generators: Sequence[Operator], m: Sequence[int] | None = None, route: str = "t0",
               w: Sequence[int] | None = None, position: str = "top", tiebreak: str = "grevlex"
               ) -> GroebnerBasis:
    """F[m]-Groebner basis of the module generated in ``A_{d+n}^r``.

    ``route="t0"`` homogenizes with ``t0`` and uses the H-order;
    ``route="h"`` h-homogenizes and uses an h-order adapted to ``(w, m)``.
    The dehomogenized output is minimalized (not tail-reduced, since the
    F-order is not a well-order) and carries the F-order as its order.
    """
    if not generators:
        raise ValueError("no generators")
    ring, rank = generators[0].ring, generators[0].rank
    if ring.extension != "none":
        raise ValueError("f_groebner expects generators in an unextended Weyl algebra")
    m = tuple(m) if m is not None else (0,) * rank
    if len(m) != rank:
        raise ValueError("shift vector does not match rank")
    wv = tuple(w) if w is not None else v_weight(ring)
    if route == "t0":
        check_weight(ring, wv, strict=True)
        hom = [homogenize_F(g, m, wv) for g in generators]
        hord = H_order(hom[0].ring, m, wv, tiebreak, position)
        G = buchberger(hom, hord, reduce=True, flavor="F[m]")
    elif route == "h":
        check_weight(ring, wv)
        hom = [homogenize_h(g) for g in generators]
        hord = h_order(hom[0].ring, None, wv, m, tiebreak, position)
        G = buchberger(hom, hord, reduce=True, flavor="h[n]")
    else:
        raise ValueError(f"unknown route {route!r}")
    ford = F_order(ring, m, wv, tiebreak, position)
    deh = [dehomogenize(g) for g in G.elements]
    deh = _dedupe(d for d in deh if d.terms)
    deh = minimalize(deh, ford)
    return GroebnerBasis(ring, rank, ford, deh, False, "F[m]", G.elements, hord)


def _dedupe(items):
    seen, out = set(), []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def symbol(P: Operator, w: Sequence[int] | None = None, m: Sequence[int] | None = None) -> Operator:
    """Top-weight part ``sigma_w[m](P)``."""
    if not P.terms:
        return P
    ring = P.ring
    w = tuple(w) if w is not None else v_weight(ring)
    m = tuple(m) if m is not None else (0,) * P.rank
    off = 1 + ring.ncentral
    wt = {mono: sum(a * b for a, b in zip(w, mono[off:])) + m[mono[0]] for mono in P.terms}
    top = max(wt.values())
    return Operator._raw(ring, {k: c for k, c in P.terms.items() if wt[k] == top}, P.rank)


# ---------------------------------------------------------------------------
# syzygies and resolutions


@dataclass
class SyzygyData:
    generators: list            # V_ij in the rank-len(G) free module (same ring as G)
    order: OrderSpec            # Schreyer order they are a Groebner basis for
    pairs: list                 # (i, j) per generator
    m: tuple | None = None      # ord_w[m](rho(G_k)) per basis element
    n: tuple | None = None      # deg[n](G_k) per basis element


def syzygy_basis(G: GroebnerBasis | Sequence[Operator], order: OrderSpec | None = None,
                 prune: bool = True, w=None, m=None, nshift=None) -> SyzygyData:
    """Schreyer syzygies ``V_ij`` of a Groebner basis.

    ``V_ij = S_ji e_i - S_ij e_j - sum_k U_ijk e_k`` from the reduction of the
    S-pair of ``G_i, G_j`` to zero.  With ``prune`` only pairs whose
    ``L_ij - L_i`` is minimal at position ``i`` are kept; the kept ones still
    form a Groebner basis for the induced Schreyer order.
    """
    if isinstance(G, GroebnerBasis):
        order = order or G.order
        elems = list(G.elements)
    else:
        elems = list(G)
    if order is None:
        raise ValueError("an order is needed")
    if not order.is_well_order():
        raise OrderError("syzygies need a well-order (use a homogenized basis)")
    if not elems:
        raise ValueError("empty basis")
    ring = elems[0].ring
    s = len(elems)
    store = _Store(ring, order)
    for g in elems:
        store.add(g.terms)
    sorder = schreyer_order(order, store.leads)
    cands = {}
    for i in range(s):
        for j in range(i + 1, s):
            if store.comps[i] == store.comps[j]:
                L = _lcm(store.leads[i], store.leads[j])
                cands.setdefault(i, []).append((j, _sub(L, store.leads[i]), L))
    chosen = []
    for i, lst in cands.items():
        for a, (j, e, L) in enumerate(lst):
            if prune:
                red = False
                for b, (k, e2, _) in enumerate(lst):
                    if b != a and all(x <= y for x, y in zip(e2, e)) and (e2 != e or k < j):
                        red = True
                        break
                if red:
                    continue
            chosen.append((i, j, L))
    out, pairs = [], []
    for i, j, L in chosen:
        sp = _spoly(ring, store, i, j, L)
        rem, quots = _reduce(ring, sp, store, track=True, full=False)
        if rem:
            raise NotAGroebnerBasis(f"S-pair ({i}, {j}) does not reduce to zero")
        terms = {}
        ci, cj = ONE / store.lcs[i], -ONE / store.lcs[j]
        terms[(i, *_sub(L, store.leads[i]))] = ci
        key_j = (j, *_sub(L, store.leads[j]))
        terms[key_j] = terms.get(key_j, ZERO) + cj
        for k, qd in quots.items():
            for mono, c in qd.items():
                kk = (k, *mono[1:])
                v = terms.get(kk, ZERO) - c
                if v:
                    terms[kk] = v
                else:
                    terms.pop(kk, None)
        out.append(Operator._raw(ring, {k: v for k, v in terms.items() if v}, s))
        pairs.append((i, j))
    data = SyzygyData(out, sorder, pairs)
    if w is not None or m is not None:
        base = [dehomogenize(g) if ring.extension != "none" else g for g in elems]
        data.m = tuple(order_of(b, w, m) for b in base)
    if ring.extension == "h":
        data.n = tuple(total_degree(g, nshift) for g in elems)
    return data


@dataclass
class Resolution:
    """``... -> A^{r_2} -> A^{r_1} -> A^{r_0}`` as row matrices.

    ``levels[j-1]`` holds the rows of the j-th map (each a rank ``r_{j-1}``
    operator in the unextended ring); ``shifts[j]`` is ``m_j``.
    """

    ring: RingSpec
    levels: list
    shifts: list
    degree_shifts: list | None = None
    adapted_to: tuple | None = None
    homogenized: list | None = None
    orders: list | None = None
    route: str = "h"

    @property
    def ranks(self) -> list:
        r0 = len(self.shifts[0])
        return [r0] + [len(l) for l in self.levels]

    def __len__(self):
        return len(self.levels)


def _sort_for_level(elems, order, var):
    """Stable sort by the exponent of variable ``var`` in the lead, descending."""
    if var is None:
        return list(elems)
    keyed = []
    for g in elems:
        L = lead_monomial(g, order)
        keyed.append((-L[1 + var], g))
    keyed.sort(key=lambda t: t[0])
    return [g for _, g in keyed]


def _level_sort_var(ring: RingSpec, level: int):
    """Variable whose lead exponent orders the basis at ``level``: the Weyl
    variables in turn, then ``h``."""
    seq = list(range(ring.ncentral, ring.nvars))
    if ring.extension == "h":
        seq.append(0)
    k = level - 1
    return seq[k] if 0 <= k < len(seq) else None


def adapted_resolution(generators: Sequence[Operator], m: Sequence[int] | None = None, length: int = 1,
                       route: str = "h", w: Sequence[int] | None = None, tiebreak: str = "grevlex",
                       position: str = "top") -> Resolution:
    """Free resolution adapted to the filtration ``F_w[m]`` (V-filtration by default).

    ``route="h"`` runs the Schreyer construction in the homogenized Weyl
    algebra; ``route="t0"`` recomputes an F-Groebner basis of the syzygies at
    every level with ``t0``-homogenization.
    """
    if not generators:
        raise ValueError("no generators")
    ring, rank = generators[0].ring, generators[0].rank
    m = tuple(m) if m is not None else (0,) * rank
    wv = tuple(w) if w is not None else v_weight(ring)
    gens = [g for g in generators if g.terms]
    res = Resolution(ring, [], [m], None, wv, [], [], route)
    if not gens or length < 1:
        return res
    if route == "h":
        check_weight(ring, wv)
        n = (0,) * rank
        res.degree_shifts = [n]
        hom = [homogenize_h(g, n) for g in gens]
        hord = h_order(hom[0].ring, n, wv, m, tiebreak, position)
        G = buchberger(hom, hord, reduce=True, flavor="h[n]")
        elems = _sort_for_level(G.elements, hord, _level_sort_var(hom[0].ring, 1))
        cur_order = hord
        cur_m, cur_n = m, n
        level = 1
        while True:
            rows = [dehomogenize(g) for g in elems]
            res.levels.append(rows)
            res.homogenized.append(elems)
            res.orders.append(cur_order)
            new_m = tuple(order_of(r, wv, cur_m) for r in rows)
            new_n = tuple(total_degree(g, cur_n) for g in elems)
            res.shifts.append(new_m)
            res.degree_shifts.append(new_n)
            if level >= length:
                break
            syz = syzygy_basis(elems, cur_order)
            if not syz.generators:
                break
            level += 1
            cur_order, cur_m, cur_n = syz.order, new_m, new_n
            elems = _sort_for_level(syz.generators, cur_order, _level_sort_var(hom[0].ring, level))
        return res
    if route == "t0":
        check_weight(ring, wv, strict=True)
        cur = gens
        cur_m = m
        level = 0
        while level < length:
            level += 1
            F = f_groebner(cur, cur_m, "t0", wv, position, tiebreak)
            # keep every homogenized element so the syzygy step sees a true basis
            homs = F.homogenized
            rows = [dehomogenize(g) for g in homs]
            res.levels.append(rows)
            res.homogenized.append(homs)
            res.orders.append(F.hom_order)
            new_m = tuple(order_of(r, wv, cur_m) for r in rows)
            res.shifts.append(new_m)
            if level >= length:
                break
            syz = syzygy_basis(homs, F.hom_order)
            nxt = [dehomogenize(v) for v in syz.generators]
            nxt = [v for v in nxt if v.terms]
            if not nxt:
                break
            cur, cur_m = nxt, new_m
        return res
    raise ValueError(f"unknown route {route!r}")


def compose_rows(rows_hi: Sequence[Operator], rows_lo: Sequence[Operator]) -> list:
    """Contract each row of the higher map against the lower map's rows."""
    out = []
    if not rows_lo:
        return out
    ring, rank = rows_lo[0].ring, rows_lo[0].rank
    for r in rows_hi:
        acc = Operator.zero(ring, rank)
        for i, entry in enumerate(r.entries()):
            if entry.terms:
                acc = acc + entry * rows_lo[i]
        out.append(acc)
    return out
