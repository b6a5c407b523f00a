"""Weyl algebras, their t0- and h-homogenizations, and operators in free modules.

Every ring lives in one flat exponent layout::

    (central variables | positions t1..td x1..xn | derivations dt1..dtd dx1..dxn)

The central block holds the homogenizing variable (``t0`` or ``h``) followed by
any extra commuting parameters (``v``/``w`` of the multi-homogenization, the
``s`` variables of ``A_n[s]``, ``theta``...).  A term of a rank ``r`` module
element is keyed by ``(component, e_0, ..., e_{N-1})`` with ``component``
0-based, and the stored monomial always means ``central * positions *
derivations`` (positions written left of derivations), which makes the
dictionary of terms a canonical normal form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import comb, factorial
from operator import add
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

ZERO = mpq(0)
ONE = mpq(1)

EXTENSIONS = ("none", "t0", "h")


class RingMismatch(ValueError):
    """Operands live in different rings or modules of different rank."""


@dataclass(frozen=True)
class RingSpec:
    """A Weyl algebra ``A_{d+n}``, ``A_{d+n}[t0]`` or ``A^(h)_{d+n}``.

    ``params`` are extra central variables.  ``tnames``/``xnames`` default to
    ``t1..td`` and ``x1..xn``; derivations are named by prefixing ``d``.
    """

    d: int = 0
    n: int = 0
    extension: str = "none"
    params: tuple[str, ...] = ()
    tnames: tuple[str, ...] = ()
    xnames: tuple[str, ...] = ()
    _layout: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.d < 0 or self.n < 0:
            raise ValueError("variable counts must be nonnegative")
        if self.extension not in EXTENSIONS:
            raise ValueError(f"unknown extension {self.extension!r}")
        if not self.tnames:
            object.__setattr__(self, "tnames", tuple(f"t{i + 1}" for i in range(self.d)))
        if not self.xnames:
            object.__setattr__(self, "xnames", tuple(f"x{i + 1}" for i in range(self.n)))
        if len(self.tnames) != self.d or len(self.xnames) != self.n:
            raise ValueError("variable names do not match the counts")
        object.__setattr__(self, "params", tuple(self.params))
        names = self.central_names + self.position_names + self.derivation_names
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")

    # layout -------------------------------------------------------------

    @property
    def central_names(self) -> tuple[str, ...]:
        head = () if self.extension == "none" else (self.extension,)
        return head + self.params

    @property
    def position_names(self) -> tuple[str, ...]:
        return self.tnames + self.xnames

    @property
    def derivation_names(self) -> tuple[str, ...]:
        return tuple("d" + v for v in self.position_names)

    @property
    def names(self) -> tuple[str, ...]:
        return self.central_names + self.position_names + self.derivation_names

    @property
    def ncentral(self) -> int:
        return len(self.params) + (self.extension != "none")

    @property
    def nweyl(self) -> int:
        return self.d + self.n

    @property
    def nvars(self) -> int:
        return self.ncentral + 2 * self.nweyl

    @property
    def hom_index(self) -> int | None:
        """Index of the homogenizing variable inside the exponent tuple."""
        return None if self.extension == "none" else 0

    def index(self, name: str) -> int:
        return self.names.index(name)

    def zero_exp(self) -> tuple[int, ...]:
        return (0,) * self.nvars

    def var_exp(self, name: str, power: int = 1) -> tuple[int, ...]:
        e = [0] * self.nvars
        e[self.index(name)] = power
        return tuple(e)

    def with_(self, **changes) -> "RingSpec":
        kw = dict(d=self.d, n=self.n, extension=self.extension, params=self.params,
                  tnames=self.tnames, xnames=self.xnames)
        kw.update(changes)
        if "d" in changes and "tnames" not in changes:
            kw["tnames"] = ()
        if "n" in changes and "xnames" not in changes:
            kw["xnames"] = ()
        return RingSpec(**kw)

    def base(self) -> "RingSpec":
        """The ring with the homogenizing variable removed."""
        return self.with_(extension="none")


# ---------------------------------------------------------------------------
# raw polynomial kernels on {(comp, *exps): mpq}


_BINOM_CACHE: dict[tuple[int, int], tuple[tuple[int, int], ...]] = {}


def _reorder(b: int, a: int) -> tuple[tuple[int, int], ...]:
    """Expansion of ``d^b x^a`` as ``sum_k c_k x^(a-k) d^(b-k)``: pairs (k, c_k)."""
    key = (b, a)
    got = _BINOM_CACHE.get(key)
    if got is None:
        got = tuple((k, comb(b, k) * comb(a, k) * factorial(k)) for k in range(min(a, b) + 1))
        _BINOM_CACHE[key] = got
    return got


def mono_mul(ring: RingSpec, m: Sequence[int], poly: Mapping, coef=ONE) -> dict:
    """Left product ``coef * m * poly`` with ``m`` a normal-ordered monomial."""
    nc, nw = ring.ncentral, ring.nweyl
    off_x = 1 + nc
    off_d = 1 + nc + nw
    hidx = None if ring.extension != "h" else 1
    dpart = m[nc + nw:]
    active = [i for i in range(nw) if dpart[i]]
    out: dict = {}
    if not active:
        for mono, c in poly.items():
            key = (mono[0], *map(add, mono[1:], m))
            out[key] = c * coef
        return out
    get = out.get
    for mono, c in poly.items():
        base = [mono[0], *map(add, mono[1:], m)]
        cc = c * coef
        expand = [(i, _reorder(dpart[i], mono[off_x + i])) for i in active if mono[off_x + i]]
        if not expand:
            key = tuple(base)
            v = get(key, ZERO) + cc
            if v:
                out[key] = v
            else:
                del out[key]
            continue
        for choice in product(*(ex for _, ex in expand)):
            e = base[:]
            cf = cc
            ktot = 0
            for (i, _), (k, ck) in zip(expand, choice):
                if k:
                    e[off_x + i] -= k
                    e[off_d + i] -= k
                    cf *= ck
                    ktot += k
            if ktot and hidx is not None:
                e[hidx] += 2 * ktot
            key = tuple(e)
            v = get(key, ZERO) + cf
            if v:
                out[key] = v
            else:
                del out[key]
    return out


def poly_mul(ring: RingSpec, p: Mapping, q: Mapping) -> dict:
    """Product of a rank-1 ``p`` (component 0) with a module element ``q``."""
    out: dict = {}
    for mono, c in p.items():
        for k, v in mono_mul(ring, mono[1:], q, c).items():
            s = out.get(k, ZERO) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


def poly_addmul(target: dict, other: Mapping, coef=ONE) -> dict:
    """In place ``target += coef * other``."""
    get = target.get
    for k, v in other.items():
        s = get(k, ZERO) + coef * v
        if s:
            target[k] = s
        else:
            target.pop(k, None)
    return target


def as_mpq(c) -> mpq:
    return c if isinstance(c, type(ONE)) else mpq(c)


# ---------------------------------------------------------------------------


class Operator:
    """An element of the free module ``R^rank`` over a :class:`RingSpec`.

    Immutable by convention; ``terms`` maps ``(component, *exponents)`` to a
    nonzero rational.
    """

    __slots__ = ("ring", "rank", "terms", "_hash")

    def __init__(self, ring: RingSpec, terms: Mapping | None = None, rank: int = 1):
        if rank < 1:
            raise ValueError("rank must be positive")
        self.ring = ring
        self.rank = rank
        clean = {}
        if terms:
            nv = ring.nvars
            for mono, c in terms.items():
                if c:
                    if len(mono) != nv + 1 or not 0 <= mono[0] < rank or min(mono[1:], default=0) < 0:
                        raise ValueError(f"bad monomial {mono} for {ring} rank {rank}")
                    clean[tuple(mono)] = as_mpq(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring, terms, rank=1) -> "Operator":
        op = cls.__new__(cls)
        op.ring, op.rank, op.terms, op._hash = ring, rank, terms, None
        return op

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls, ring: RingSpec, rank: int = 1) -> "Operator":
        return cls._raw(ring, {}, rank)

    @classmethod
    def constant(cls, ring: RingSpec, c=1, comp: int = 0, rank: int = 1) -> "Operator":
        return cls(ring, {(comp, *ring.zero_exp()): c}, rank)

    @classmethod
    def var(cls, ring: RingSpec, name: str, power: int = 1) -> "Operator":
        """The normal-ordered monomial ``name^power`` (rank 1)."""
        return cls(ring, {(0, *ring.var_exp(name, power)): 1})

    @classmethod
    def monomial(cls, ring: RingSpec, exps: Sequence[int], c=1, comp: int = 0,
                 rank: int = 1) -> "Operator":
        return cls(ring, {(comp, *exps): c}, rank)

    @classmethod
    def vector(cls, entries: Sequence["Operator"]) -> "Operator":
        """Stack rank-1 operators into a row vector."""
        if not entries:
            raise ValueError("empty vector")
        ring = entries[0].ring
        terms = {}
        for i, e in enumerate(entries):
            if e.ring != ring or e.rank != 1:
                raise RingMismatch("vector entries must be rank-1 operators in one ring")
            for mono, c in e.terms.items():
                terms[(i, *mono[1:])] = c
        return cls._raw(ring, terms, len(entries))

    # basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def component(self, i: int) -> "Operator":
        """The ``i``-th (0-based) coordinate as a rank-1 operator."""
        return Operator._raw(self.ring, {(0, *m[1:]): c for m, c in self.terms.items() if m[0] == i})

    def entries(self) -> list["Operator"]:
        return [self.component(i) for i in range(self.rank)]

    def support_components(self) -> set[int]:
        return {m[0] for m in self.terms}

    def coefficient(self, exps: Sequence[int], comp: int = 0):
        return self.terms.get((comp, *exps), ZERO)

    def is_constant(self) -> bool:
        return all(not any(m[1:]) for m in self.terms)

    def constant_term(self, comp: int = 0):
        return self.terms.get((comp, *self.ring.zero_exp()), ZERO)

    # arithmetic ---------------------------------------------------------

    def _check(self, other: "Operator"):
        if self.ring != other.ring or self.rank != other.rank:
            raise RingMismatch(f"{self.ring} rank {self.rank} vs {other.ring} rank {other.rank}")

    def __add__(self, other):
        if not isinstance(other, Operator):
            other = Operator.constant(self.ring, other, rank=self.rank) if self.rank == 1 else NotImplemented
            if other is NotImplemented:
                return other
        self._check(other)
        return Operator._raw(self.ring, poly_addmul(dict(self.terms), other.terms), self.rank)

    __radd__ = __add__

    def __neg__(self):
        return Operator._raw(self.ring, {m: -c for m, c in self.terms.items()}, self.rank)

    def __sub__(self, other):
        if not isinstance(other, Operator):
            return self + (-as_mpq(other))
        self._check(other)
        return Operator._raw(self.ring, poly_addmul(dict(self.terms), other.terms, -ONE), self.rank)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Operator":
        c = as_mpq(c)
        if not c:
            return Operator.zero(self.ring, self.rank)
        return Operator._raw(self.ring, {m: v * c for m, v in self.terms.items()}, self.rank)

    def __mul__(self, other):
        if isinstance(other, Operator):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if self.rank != 1 or k < 0:
            raise ValueError("powers need a rank-1 operator and k >= 0")
        out = Operator.constant(self.ring, 1)
        for _ in range(k):
            out = multiply(out, self)
        return out

    def __eq__(self, other):
        if not isinstance(other, Operator):
            if self.rank == 1:
                try:
                    return self == Operator.constant(self.ring, other)
                except (TypeError, ValueError):
                    return NotImplemented
            return NotImplemented
        return self.ring == other.ring and self.rank == other.rank and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.rank, frozenset(self.terms.items())))
        return self._hash

    def map_coefficients(self, fn) -> "Operator":
        return Operator(self.ring, {m: fn(c) for m, c in self.terms.items()}, self.rank)

    def __repr__(self):
        from .text import render

        return f"Operator({render(self)!r})"

    def __str__(self):
        from .text import render

        return render(self)


# ---------------------------------------------------------------------------
# ring operations


def multiply(P: Operator, Q: Operator) -> Operator:
    """Normal form of ``P * Q`` for rank-1 ``P`` acting on the left of ``Q``."""
    if P.ring != Q.ring:
        raise RingMismatch("operands live in different rings")
    if P.rank != 1:
        raise RingMismatch("left factor must have rank 1")
    return Operator._raw(P.ring, poly_mul(P.ring, P.terms, Q.terms), Q.rank)


def dehomogenize(P: Operator) -> Operator:
    """Substitute 1 for ``t0`` or ``h``."""
    ring = P.ring
    if ring.extension == "none":
        raise ValueError("dehomogenize needs a t0- or h-extended ring")
    base = ring.base()
    out: dict = {}
    for m, c in P.terms.items():
        key = (m[0], *m[2:])
        s = out.get(key, ZERO) + c
        if s:
            out[key] = s
        else:
            out.pop(key, None)
    return Operator._raw(base, out, P.rank)


def lift_ring(P: Operator, ring: RingSpec, position_map: Sequence[int] | None = None) -> Operator:
    """Embed ``P`` into a ring with more central variables and/or Weyl pairs.

    Central variables are matched by name.  ``position_map[i]`` gives the
    index in ``ring``'s position block of ``P``'s ``i``-th position variable
    (identity by default).
    """
    src = P.ring
    cidx = [ring.central_names.index(v) for v in src.central_names]
    if position_map is None:
        position_map = list(range(src.nweyl))
    nc, nw = ring.ncentral, ring.nweyl
    out = {}
    for m, c in P.terms.items():
        e = [0] * ring.nvars
        for i, j in enumerate(cidx):
            e[j] = m[1 + i]
        for i, j in enumerate(position_map):
            e[nc + j] = m[1 + src.ncentral + i]
            e[nc + nw + j] = m[1 + src.ncentral + src.nweyl + i]
        out[(m[0], *e)] = c
    return Operator._raw(ring, out, P.rank)


def _weyl_exps(ring: RingSpec, mono) -> tuple:
    """Position and derivation exponents of a keyed monomial."""
    return mono[1 + ring.ncentral:]


def v_weight(ring: RingSpec) -> tuple[int, ...]:
    """The V-filtration weight along ``t = 0`` on positions+derivations."""
    d, n = ring.d, ring.n
    return (-1,) * d + (0,) * n + (1,) * d + (0,) * n


def _check_shift(m, rank):
    m = tuple(m) if m is not None else (0,) * rank
    if len(m) != rank:
        raise ValueError(f"shift vector {m} does not match rank {rank}")
    return m


def order_of(P: Operator, w: Sequence[int] | None = None, m: Sequence[int] | None = None):
    """``max <w, exponent> + m_component`` over the terms; ``None`` for zero (-inf).

    ``w`` weighs positions then derivations (length ``2(d+n)``) and defaults
    to the V-weight.
    """
    ring = P.ring
    if w is None:
        w = v_weight(ring)
    if len(w) != 2 * ring.nweyl:
        raise ValueError("weight vector has the wrong length")
    m = _check_shift(m, P.rank)
    off = 1 + ring.ncentral
    best = None
    for mono in P.terms:
        val = sum(a * b for a, b in zip(w, mono[off:])) + m[mono[0]]
        if best is None or val > best:
            best = val
    return best


def total_degree(P: Operator, nshift: Sequence[int] | None = None):
    """``max deg(P_i) + n_i`` counting ``h`` but not ``t0`` or parameters."""
    ring = P.ring
    nshift = _check_shift(nshift, P.rank)
    off = 1 + ring.ncentral
    hh = ring.extension == "h"
    best = None
    for mono in P.terms:
        val = sum(mono[off:]) + nshift[mono[0]] + (mono[1] if hh else 0)
        if best is None or val > best:
            best = val
    return best


def homogenize_F(P: Operator, m: Sequence[int] | None = None, w: Sequence[int] | None = None) -> Operator:
    """F[m]-homogenization into ``A[t0]``: each term gains ``t0^(weight - k)``.

    ``w`` defaults to the V-weight and must satisfy ``w_i + w_{n+i} = 0``.
    """
    ring = P.ring
    if ring.extension != "none":
        raise ValueError("homogenize_F expects an unextended ring")
    if w is None:
        w = v_weight(ring)
    nw = ring.nweyl
    if any(w[i] + w[nw + i] for i in range(nw)):
        raise ValueError("t0-homogenization needs w_i + w_{n+i} = 0")
    m = _check_shift(m, P.rank)
    target = ring.with_(extension="t0")
    if not P.terms:
        return Operator.zero(target, P.rank)
    off = 1 + ring.ncentral
    weights = {mono: sum(a * b for a, b in zip(w, mono[off:])) + m[mono[0]] for mono in P.terms}
    k = min(weights.values())
    out = {(mono[0], weights[mono] - k, *mono[1:]): c for mono, c in P.terms.items()}
    return Operator._raw(target, out, P.rank)


def homogenize_h(P: Operator, nshift: Sequence[int] | None = None) -> Operator:
    """h[n]-homogenization into the homogenized Weyl algebra."""
    ring = P.ring
    if ring.extension != "none":
        raise ValueError("homogenize_h expects an unextended ring")
    nshift = _check_shift(nshift, P.rank)
    target = ring.with_(extension="h")
    if not P.terms:
        return Operator.zero(target, P.rank)
    off = 1 + ring.ncentral
    degs = {mono: sum(mono[off:]) + nshift[mono[0]] for mono in P.terms}
    k = max(degs.values())
    out = {(mono[0], k - degs[mono], *mono[1:]): c for mono, c in P.terms.items()}
    return Operator._raw(target, out, P.rank)


def mh_ring(ring: RingSpec) -> RingSpec:
    """``A_{d+n}[v, w]`` with ``v1..vd, w1..wd`` appended as central variables."""
    vs = tuple(f"v{i + 1}" for i in range(ring.d))
    ws = tuple(f"w{i + 1}" for i in range(ring.d))
    return ring.with_(params=ring.params + vs + ws)


def multi_homogenize(P: Operator) -> Operator:
    """Multiply each term by ``prod v_j^(nu_j - mu_j - kappa_j)``."""
    ring = P.ring
    if ring.extension != "none":
        raise ValueError("multi_homogenize expects an unextended ring")
    if ring.d < 1:
        raise ValueError("multi_homogenize needs at least one t-variable")
    if P.rank != 1:
        raise ValueError("multi_homogenize works on rank-1 operators")
    target = mh_ring(ring)
    d = ring.d
    if not P.terms:
        return Operator.zero(target)
    nc, nw = ring.ncentral, ring.nweyl
    diffs = {mono: [mono[1 + nc + nw + j] - mono[1 + nc + j] for j in range(d)] for mono in P.terms}
    kappa = [min(v[j] for v in diffs.values()) for j in range(d)]
    out = {}
    for mono, c in P.terms.items():
        vpow = [diffs[mono][j] - kappa[j] for j in range(d)]
        out[(0, *mono[1:1 + nc], *vpow, *([0] * d), *mono[1 + nc:])] = c
    return Operator._raw(target, out)


def substitute_central(P: Operator, name: str, value) -> Operator:
    """Evaluate a central variable at a rational number and drop it."""
    ring = P.ring
    idx = ring.central_names.index(name)
    if ring.extension != "none" and idx == 0:
        raise ValueError("use dehomogenize for the homogenizing variable")
    params = tuple(p for p in ring.params if p != name)
    target = ring.with_(params=params)
    value = as_mpq(value)
    out: dict = {}
    for m, c in P.terms.items():
        k = m[1 + idx]
        key = m[:1 + idx] + m[2 + idx:]
        s = out.get(key, ZERO) + c * value ** k
        if s:
            out[key] = s
        else:
            out.pop(key, None)
    return Operator._raw(target, out, P.rank)


def _place(P: Operator, comp: int, rank: int) -> Operator:
    return Operator._raw(P.ring, {(comp, *m[1:]): c for m, c in P.terms.items()}, rank)


def embed(P: Operator, comp: int, rank: int) -> Operator:
    """Put a rank-1 operator into component ``comp`` of a rank ``rank`` module."""
    if P.rank != 1:
        raise ValueError("embed expects a rank-1 operator")
    return _place(P, comp, rank)


def unit_vector(ring: RingSpec, comp: int, rank: int) -> Operator:
    return Operator.constant(ring, 1, comp, rank)


def make_vector(ring: RingSpec, entries: Iterable[Operator]) -> Operator:
    return Operator.vector(list(entries))


def ring_map(P: Operator, target: RingSpec, images: Mapping[str, Operator], rank: int | None = None,
             comp_map: Sequence[int] | None = None) -> Operator:
    """Apply the algebra map sending each generator of ``P.ring`` to ``images``.

    Generators missing from ``images`` are sent to the variable of the same
    name in ``target``.  Terms are evaluated in normal order (central,
    positions, derivations), which is correct as long as the images satisfy
    the Weyl relations.  ``comp_map`` relabels components.
    """
    src = P.ring
    rank = rank if rank is not None else P.rank
    gens = []
    for v in src.names:
        img = images.get(v)
        if img is None:
            img = Operator.var(target, v)
        elif img.ring != target or img.rank != 1:
            raise RingMismatch(f"image of {v} must be a rank-1 operator over the target ring")
        gens.append(img)
    cache: dict = {}

    def power(i, k):
        key = (i, k)
        if key not in cache:
            cache[key] = gens[i] ** k
        return cache[key]

    out: dict = {}
    for mono, c in P.terms.items():
        term = Operator.constant(target, c)
        for i, k in enumerate(mono[1:]):
            if k:
                term = multiply(term, power(i, k))
        comp = comp_map[mono[0]] if comp_map is not None else mono[0]
        for m2, c2 in term.terms.items():
            key = (comp, *m2[1:])
            s = out.get(key, ZERO) + c2
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return Operator._raw(target, out, rank)


def relabel_ring(P: Operator, target: RingSpec) -> Operator:
    """Reinterpret ``P`` in a ring with the identical exponent layout."""
    if target.nvars != P.ring.nvars or target.ncentral != P.ring.ncentral or target.extension != P.ring.extension:
        raise RingMismatch("rings do not share an exponent layout")
    return Operator._raw(target, dict(P.terms), P.rank)


def drop_central(P: Operator, names: Sequence[str]) -> Operator:
    """Remove central variables that do not occur in ``P``."""
    ring = P.ring
    idx = [ring.central_names.index(v) for v in names]
    if ring.extension != "none" and 0 in idx:
        raise ValueError("cannot drop the homogenizing variable")
    keep = [i for i in range(ring.nvars) if i not in idx]
    target = ring.with_(params=tuple(p for p in ring.params if p not in names))
    out = {}
    for m, c in P.terms.items():
        if any(m[1 + i] for i in idx):
            raise ValueError("variable to drop occurs in the operator")
        out[(m[0], *(m[1 + i] for i in keep))] = c
    return Operator._raw(target, out, P.rank)
