"""Term orders on ``(exponent, component)`` pairs.

Every order is realized as a sort key: a tuple of integers that is linear in
the exponent (so translation invariance holds by construction) and may depend
on the component.  ``key(a) < key(b)`` means ``a`` is smaller.  Monomials are
given in the keyed form ``(component, e_0, ..., e_{N-1})`` used by
:mod:`dmodalg.ring`.

Families:

* ``base_monomial``: a named tie-break (``grevlex``, ``deglex``, ``lex``) with
  an optional position rule.
* ``F_order``: V-weight plus shift first, then a base order.  Not a
  well-order in general.
* ``H_order``: the power of ``t0`` first, then a base order.
* ``h_order``: total degree (with ``h`` and the degree shift) first, then an
  order adapted to a weight, then a base order.
* ``mh_order``: total degree in the ``v, w`` parameters first, then grevlex.
* ``schreyer``: induced from the leading exponents of a previous basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .ring import RingSpec, v_weight

LT, EQ, GT = -1, 0, 1
TIEBREAKS = ("grevlex", "deglex", "lex")
KINDS = ("base_monomial", "F_order", "H_order", "mh_order", "h_order", "schreyer", "weight")


class OrderError(ValueError):
    pass


def _tiebreak_key(name: str, exps: Sequence[int], nc: int) -> tuple:
    """Named tie-breaks.  The ``nc`` central variables always count as the
    smallest ones, so ``h^2`` sits below ``x*dx`` and products keep their
    leading term."""
    if name == "grevlex":
        return (sum(exps), *(-e for e in exps[:nc]), *(-e for e in reversed(exps[nc:])))
    if name == "deglex":
        return (sum(exps), *exps[nc:], *exps[:nc])
    if name == "lex":
        return (*exps[nc:], *exps[:nc])
    raise OrderError(f"unknown tie-break {name!r}")


@dataclass(eq=False)
class OrderSpec:
    """A term order on ``ring^rank``.

    ``rows`` is a list of ``(weights, shifts)`` with ``weights`` of length
    ``ring.nvars`` and ``shifts`` of length ``rank``; they are compared first,
    in sequence.  ``position`` is ``"pot"`` (component compared right after the
    rows, larger index larger), ``"top"`` (component compared last) or
    ``"none"``.  Schreyer orders instead carry ``base`` and ``lexps``.
    """

    ring: RingSpec
    rank: int
    kind: str
    rows: tuple = ()
    position: str = "top"
    tiebreak: str = "grevlex"
    base: "OrderSpec | None" = None
    lexps: tuple = ()
    params: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise OrderError(f"unknown order kind {self.kind!r}")
        if self.position not in ("pot", "top", "none"):
            raise OrderError(f"unknown position rule {self.position!r}")
        if self.kind == "schreyer":
            if self.base is None or len(self.lexps) != self.rank:
                raise OrderError("schreyer order needs a base order and one lead per component")
            return
        if self.tiebreak not in TIEBREAKS:
            raise OrderError(f"unknown tie-break {self.tiebreak!r}")
        nv = self.ring.nvars
        rows = []
        for w, m in self.rows:
            w, m = tuple(int(a) for a in w), tuple(int(a) for a in m)
            if len(w) != nv or len(m) != self.rank:
                raise OrderError(f"weight row of length {len(w)}/{len(m)}, expected {nv}/{self.rank}")
            rows.append((w, m))
        self.rows = tuple(rows)

    # core ---------------------------------------------------------------

    def key(self, mono: tuple) -> tuple:
        got = self._cache.get(mono)
        if got is not None:
            return got
        c = mono[0]
        if not 0 <= c < self.rank or len(mono) != self.ring.nvars + 1:
            raise OrderError(f"monomial {mono} does not fit order on rank {self.rank}")
        if self.kind == "schreyer":
            lead = self.lexps[c]
            shifted = (lead[0], *(a + b for a, b in zip(lead[1:], mono[1:])))
            k = (*self.base.key(shifted), -c)
        else:
            e = mono[1:]
            parts = [sum(a * b for a, b in zip(w, e)) + m[c] for w, m in self.rows]
            if self.position == "pot":
                parts.append(c)
            parts.extend(_tiebreak_key(self.tiebreak, e, self.ring.ncentral))
            if self.position == "top":
                parts.append(c)
            k = tuple(parts)
        if len(self._cache) > 400000:
            self._cache.clear()
        self._cache[mono] = k
        return k

    def compare(self, a: tuple, b: tuple) -> int:
        ka, kb = self.key(a), self.key(b)
        return LT if ka < kb else (GT if ka > kb else EQ)

    def lead(self, terms) -> tuple:
        """Largest monomial among an iterable of keyed monomials."""
        return max(terms, key=self.key)

    # properties ---------------------------------------------------------

    def is_well_order(self) -> bool:
        if self.kind == "schreyer":
            return self.base.is_well_order()
        for w, _ in self.rows:
            if all(a > 0 for a in w):
                return True
            if any(a < 0 for a in w):
                return False
        return True

    def describe(self) -> dict:
        if self.kind == "schreyer":
            return {"kind": "schreyer", "rank": self.rank, "base": self.base.describe()}
        return {"kind": self.kind, "rank": self.rank, "rows": [list(w) + ["|"] + list(m) for w, m in self.rows],
                "position": self.position, "tiebreak": self.tiebreak}

    def with_rank_position(self, position: str) -> "OrderSpec":
        return OrderSpec(self.ring, self.rank, self.kind, self.rows, position, self.tiebreak,
                         self.base, self.lexps, dict(self.params))


# ---------------------------------------------------------------------------
# builders


def _full_weight(ring: RingSpec, w: Sequence[int] | None, central: Sequence[int] | None = None) -> tuple:
    """Pad a Weyl-block weight (length ``2(d+n)``) with central weights."""
    if w is None:
        w = v_weight(ring)
    w = tuple(w)
    if len(w) == ring.nvars:
        return w
    if len(w) != 2 * ring.nweyl:
        raise OrderError(f"weight vector has length {len(w)}, expected {2 * ring.nweyl}")
    c = tuple(central) if central is not None else (0,) * ring.ncentral
    return c + w


def _shift(m, rank):
    m = tuple(m) if m is not None else (0,) * rank
    if len(m) != rank:
        raise OrderError(f"shift {m} does not match rank {rank}")
    return m


def check_weight(ring: RingSpec, w: Sequence[int], strict: bool = False):
    """Reject weights with ``w_i + w_{n+i} < 0`` (or ``!= 0`` when ``strict``)."""
    w = tuple(w)
    nw = ring.nweyl
    if len(w) != 2 * nw:
        raise OrderError(f"weight vector has length {len(w)}, expected {2 * nw}")
    for i in range(nw):
        s = w[i] + w[nw + i]
        if s < 0 or (strict and s != 0):
            raise OrderError(f"weight violates w_i + w_(n+i) >= 0 at index {i}: {w}")
    return w


def monomial_order(ring: RingSpec, rank: int = 1, tiebreak: str = "grevlex", position: str = "top") -> OrderSpec:
    return OrderSpec(ring, rank, "base_monomial", (), position, tiebreak)


def weight_order(ring: RingSpec, rows: Sequence[Sequence[int]], rank: int = 1, shifts=None,
                 tiebreak: str = "grevlex", position: str = "top") -> OrderSpec:
    """Weight rows (full-length or Weyl-block) refined by a tie-break."""
    shifts = shifts or [None] * len(rows)
    built = tuple((_full_weight(ring, w), _shift(m, rank)) for w, m in zip(rows, shifts))
    return OrderSpec(ring, rank, "weight", built, position, tiebreak)


def F_order(ring: RingSpec, m=None, w=None, tiebreak: str = "grevlex", position: str = "top") -> OrderSpec:
    """``<w, e> + m_i`` first; ``position="pot"`` gives component dominance next."""
    rank = len(m) if m is not None else 1
    row = (_full_weight(ring, w), _shift(m, rank))
    return OrderSpec(ring, rank, "F_order", (row,), position, tiebreak, params={"m": _shift(m, rank)})


def H_order(ring: RingSpec, m=None, w=None, tiebreak: str = "grevlex", position: str = "top") -> OrderSpec:
    """Order on ``A[t0]``: ``t0`` power first, then a base order.

    On F[m]-homogeneous elements comparing ``t0`` powers is the same as
    comparing F-weights, so this refines the F-order there.
    """
    if ring.extension != "t0":
        raise OrderError("H_order needs a t0-extended ring")
    rank = len(m) if m is not None else 1
    lam = (1,) + (0,) * (ring.nvars - 1)
    return OrderSpec(ring, rank, "H_order", ((lam, (0,) * rank),),
                     position, tiebreak, params={"m": _shift(m, rank), "w": w})


def h_order(ring: RingSpec, nshift=None, w=None, m=None, tiebreak: str = "grevlex",
            position: str = "top", extra_rows: Sequence[Sequence[int]] = ()) -> OrderSpec:
    """Order on ``A^(h)``: total degree ``lambda + |e| + n_i`` then ``<w,e> + m_i``."""
    if ring.extension != "h":
        raise OrderError("h_order needs an h-extended ring")
    rank = len(nshift) if nshift is not None else (len(m) if m is not None else 1)
    deg = (1,) + (0,) * (ring.ncentral - 1) + (1,) * (2 * ring.nweyl)
    rows = [(deg, _shift(nshift, rank))]
    if w is not None or m is not None:
        if w is not None:
            check_weight(ring, w)
        rows.append((_full_weight(ring, w), _shift(m, rank)))
    for r in extra_rows:
        rows.append((_full_weight(ring, r), (0,) * rank))
    return OrderSpec(ring, rank, "h_order", tuple(rows), position, tiebreak,
                     params={"n": _shift(nshift, rank), "m": _shift(m, rank)})


def mh_order(ring: RingSpec, vw_names: Sequence[str] | None = None, rank: int = 1) -> OrderSpec:
    """Total degree in the ``v, w`` parameters first, then grevlex."""
    names = ring.central_names
    if vw_names is None:
        vw_names = [p for p in names if p[:1] in "vw" and p[1:].isdigit()]
    row = tuple(1 if v in vw_names else 0 for v in names) + (0,) * (2 * ring.nweyl)
    return OrderSpec(ring, rank, "mh_order", ((row, (0,) * rank),), "top", "grevlex")


def elimination_order(ring: RingSpec, eliminate: Sequence[str], rank: int = 1,
                      tiebreak: str = "grevlex", position: str = "top") -> OrderSpec:
    """Block order: total degree in ``eliminate`` first (an elimination order)."""
    names = ring.names
    for v in eliminate:
        if v not in names:
            raise OrderError(f"unknown variable {v!r}")
    row = tuple(1 if v in eliminate else 0 for v in names)
    return OrderSpec(ring, rank, "weight", ((row, (0,) * rank),), position, tiebreak)


def schreyer_order(base: OrderSpec, lexps: Sequence[tuple]) -> OrderSpec:
    """``(a, mu) < (b, nu)`` iff ``lexp_mu + a < lexp_nu + b`` under ``base``, or
    equal and ``mu > nu``."""
    lexps = tuple(tuple(l) for l in lexps)
    if not lexps:
        raise OrderError("schreyer order needs at least one leading exponent")
    return OrderSpec(base.ring, len(lexps), "schreyer", base=base, lexps=lexps)


def build_order(desc: dict, ring: RingSpec) -> OrderSpec:
    """Build an order from a plain description such as::

        {"kind": "F_order", "m": [0, 2], "tiebreak": "grevlex", "position": "pot"}
        {"kind": "weight", "rows": [[...], [...]], "tiebreak": "grevlex"}
    """
    desc = dict(desc)
    kind = desc.pop("kind", "base_monomial")
    tb = desc.pop("tiebreak", "grevlex")
    pos = desc.pop("position", "top")
    if "w" in desc and desc["w"] is not None:
        check_weight(ring, desc["w"])
    if kind == "base_monomial":
        return monomial_order(ring, desc.pop("rank", 1), tb, pos)
    if kind == "F_order":
        return F_order(ring, desc.get("m"), desc.get("w"), tb, pos)
    if kind == "H_order":
        return H_order(ring, desc.get("m"), desc.get("w"), tb, pos)
    if kind == "h_order":
        return h_order(ring, desc.get("n"), desc.get("w"), desc.get("m"), tb, pos, desc.get("extra_rows", ()))
    if kind == "mh_order":
        return mh_order(ring, desc.get("vw_names"), desc.get("rank", 1))
    if kind == "weight":
        return weight_order(ring, desc["rows"], desc.get("rank", 1), desc.get("shifts"), tb, pos)
    if kind == "schreyer":
        return schreyer_order(desc["base"], desc["lexps"])
    raise OrderError(f"unknown order kind {kind!r}")


# ---------------------------------------------------------------------------


def _adapted_part(order: OrderSpec) -> OrderSpec:
    """For h-orders, adaptedness concerns the order after the degree row."""
    if order.kind == "h_order":
        return OrderSpec(order.ring, order.rank, "weight", order.rows[1:], order.position, order.tiebreak)
    return order


def validate_adapted(order: OrderSpec, w=None, m=None) -> tuple[bool, object]:
    """Check that ``order`` refines the filtration by ``<w,.> + m`` and that
    ``e_i`` precedes ``x_j d_j e_i``.  Returns ``(ok, witness)``."""
    ring = order.ring
    rank = order.rank
    m = _shift(m, rank)
    wfull = _full_weight(ring, w)
    o = _adapted_part(order)
    zero = (0,) * ring.nvars
    if o.kind != "schreyer":
        first = next(((wr, mr) for wr, mr in o.rows if any(wr) or any(mr)), None)
        if first is None or first != (wfull, m):
            # a structural mismatch is confirmed by a concrete pair
            wit = _weight_witness(o, wfull, m)
            if wit is not None:
                return False, wit
            if first is None or first[0] != wfull:
                return False, ("first weight row differs", first)
    else:
        wit = _weight_witness(o, wfull, m)
        if wit is not None:
            return False, wit
    nc, nw = ring.ncentral, ring.nweyl
    for i in range(rank):
        for j in range(nw):
            e = list(zero)
            e[nc + j] = 1
            e[nc + nw + j] = 1
            a, b = (i, *zero), (i, *e)
            if o.compare(a, b) != LT:
                return False, ("unit not below x_j d_j e_i", a, b)
    return True, None


def _weight_witness(order, wfull, m):
    """Scan unit and single-variable monomials for a weight-order violation."""
    ring = order.ring
    nv = ring.nvars
    monos = []
    for c in range(order.rank):
        monos.append((c, *([0] * nv)))
        for v in range(nv):
            e = [0] * nv
            e[v] = 1
            monos.append((c, *e))
            e = [0] * nv
            e[v] = 2
            monos.append((c, *e))
    wt = {a: sum(x * y for x, y in zip(wfull, a[1:])) + m[a[0]] for a in monos}
    for a in monos:
        for b in monos:
            if wt[a] < wt[b] and order.compare(a, b) != LT:
                return ("weight order violated", a, b)
    return None
