"""Global b-function of ``A_{d+n}^r / N`` along ``t_1 = ... = t_d = 0``.

Pipeline: an F[m]-Groebner basis under a component-dominant order, the
initial parts split by component, the intersection with the subring
generated by ``t_j dt_j`` through multi-homogenization with ``1 - v w``,
elimination down to ``Q[x, theta]`` and finally to ``Q[theta]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

from gmpy2 import mpq
from sympy import divisors

from .groebner import (GroebnerBasis, buchberger, divide, f_groebner, lead_monomial, reduce_basis,
                       symbol)
from .orders import F_order, elimination_order, mh_order
from .ring import (ONE, ZERO, Operator, RingSpec, drop_central, mh_ring, multi_homogenize,
                   multiply, ring_map, v_weight)


class NotSpecializable(ArithmeticError):
    """The b-function is zero: the module is not specializable along ``t = 0``."""


# ---------------------------------------------------------------------------
# univariate polynomials over Q, coefficient lists low -> high


def _trim(c):
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return c


def upoly_mul(a, b):
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def upoly_divmod(a, b):
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [ZERO] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    inv = ONE / b[-1]
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        c = r[-1] * inv
        q[k] = c
        for i, y in enumerate(b):
            r[i + k] -= c * y
        r = _trim(r)
    return _trim(q), r


def upoly_monic(a):
    a = _trim(a)
    if not a:
        return []
    inv = ONE / a[-1]
    return [x * inv for x in a]


def upoly_gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, upoly_divmod(a, b)[1]
    return upoly_monic(a)


def upoly_lcm(a, b):
    a, b = _trim(a), _trim(b)
    if not a or not b:
        return []
    return upoly_monic(upoly_divmod(upoly_mul(a, b), upoly_gcd(a, b))[0])


def upoly_shift(a, c):
    """Coefficients of ``a(theta + c)``."""
    c = mpq(c)
    out = [ZERO] * len(a)
    for k, x in enumerate(a):
        if x:
            for i in range(k + 1):
                out[i] += x * comb(k, i) * c ** (k - i)
    return _trim(out)


def upoly_eval(a, x):
    acc = ZERO
    for c in reversed(a):
        acc = acc * x + c
    return acc


def falling_factorial(a: int):
    """Coefficients of ``s (s-1) ... (s-a+1)``."""
    out = [ONE]
    for i in range(a):
        out = upoly_mul(out, [mpq(-i), ONE])
    return out


@dataclass
class BPoly:
    """Monic polynomial in ``theta`` (or the zero polynomial)."""

    coeffs: tuple  # low -> high
    var: str = "theta"

    def __post_init__(self):
        self.coeffs = tuple(upoly_monic(self.coeffs))

    @classmethod
    def from_roots(cls, roots, var="theta") -> "BPoly":
        c = [ONE]
        for r in roots:
            c = upoly_mul(c, [-mpq(r), ONE])
        return cls(tuple(c), var)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return upoly_eval(self.coeffs, mpq(x))

    def __eq__(self, other):
        return isinstance(other, BPoly) and self.coeffs == other.coeffs

    def shift(self, c) -> "BPoly":
        """``b(theta + c)``."""
        return BPoly(tuple(upoly_shift(self.coeffs, c)), self.var)

    def integer_roots(self) -> list:
        return integer_roots(self)[0]

    def rational_roots(self) -> list:
        """Rational roots with multiplicity (the full root list when ``b`` splits over Q)."""
        return rational_roots(self.coeffs)

    def render(self) -> str:
        if not self.coeffs:
            return "0"
        from .text import render_entry
        ring = RingSpec(0, 0, params=(self.var,))
        return render_entry(ring, {(0, k): c for k, c in enumerate(self.coeffs) if c})

    def __str__(self):
        return self.render()


def _integer_poly(coeffs):
    den = 1
    for c in coeffs:
        den = den * c.denominator // _gcd(den, c.denominator)
    return [int(c * den) for c in coeffs]


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def integer_roots(b: BPoly) -> tuple[list, tuple | None]:
    """Sorted distinct integer roots and ``(k0, k1)``; empty list if none."""
    if b.is_zero():
        raise NotSpecializable("the zero polynomial has every integer as a root")
    c = list(b.coeffs)
    roots = []
    if not c[0]:
        roots.append(0)
        while c and not c[0]:
            c.pop(0)
    ints = _integer_poly(c)
    a0, an = ints[0], ints[-1]
    bound = 1 + max(abs(x) for x in ints[:-1]) // abs(an) if len(ints) > 1 else 0
    if bound <= 100000:
        cands = range(-bound, bound + 1)
    else:
        ds = divisors(abs(a0))
        cands = sorted(set(ds) | {-x for x in ds})
    for k in cands:
        if k and upoly_eval(c, mpq(k)) == 0:
            roots.append(k)
    roots = sorted(set(roots))
    return roots, ((roots[0], roots[-1]) if roots else None)


def rational_roots(coeffs) -> list:
    """Rational roots with multiplicity by the rational root test."""
    c = _trim(coeffs)
    out = []
    while c and not c[0]:
        out.append(mpq(0))
        c.pop(0)
    if len(c) <= 1:
        return out
    ints = _integer_poly(c)
    a0, an = abs(ints[0]), abs(ints[-1])
    cands = set()
    for p in divisors(a0):
        for q in divisors(an):
            cands.add(mpq(p, q))
            cands.add(mpq(-p, q))
    for r in sorted(cands):
        while len(c) > 1 and upoly_eval(c, r) == 0:
            out.append(r)
            c = upoly_divmod(c, [-r, ONE])[0]
    return sorted(out)


# ---------------------------------------------------------------------------
# the pipeline


def theta_operator(ring: RingSpec) -> Operator:
    """``t_1 dt_1 + ... + t_d dt_d``."""
    acc = Operator.zero(ring)
    for t in ring.tnames:
        acc = acc + multiply(Operator.var(ring, t), Operator.var(ring, "d" + t))
    return acc


def eval_at_theta(b: BPoly | Sequence, ring: RingSpec, shift=0) -> Operator:
    """``b(theta_op + shift)`` as an operator (Horner scheme)."""
    coeffs = b.coeffs if isinstance(b, BPoly) else b
    th = theta_operator(ring) + Operator.constant(ring, shift) if shift else theta_operator(ring)
    acc = Operator.zero(ring)
    for c in reversed(coeffs):
        acc = multiply(acc, th) + Operator.constant(ring, c) if acc.terms else Operator.constant(ring, c)
    return acc


def gr_components(G: GroebnerBasis, m: Sequence[int] | None = None) -> list:
    """``G_i`` = the ``i``-th coordinates of the symbols whose highest nonzero
    component is ``i`` (one list of rank-1 operators per component)."""
    rank = G.rank
    m = tuple(m) if m is not None else tuple(G.order.params.get("m", (0,) * rank))
    if G.order.position != "pot":
        raise ValueError("gr_components needs a component-dominant (pot) F-order")
    out = [[] for _ in range(rank)]
    for P in G.elements:
        s = symbol(P, None, m)
        top = max(s.support_components())
        out[top].append(s.component(top))
    return out


def s_ring(ring: RingSpec, names: Sequence[str] | None = None) -> RingSpec:
    """``A_n[s_1..s_d]`` sharing the x-variable names of ``ring``."""
    names = tuple(names) if names is not None else tuple(f"s{j + 1}" for j in range(ring.d))
    return RingSpec(0, ring.n, "none", names, (), ring.xnames)


def psi(P: Operator, sring: RingSpec) -> Operator:
    """Normalize a multi-homogeneous ``P`` to weight zero and rewrite
    ``t_j^a dt_j^a`` as falling factorials in ``s_j``."""
    ring = P.ring
    d, n = ring.d, ring.n
    nc = ring.ncentral
    if nc:
        raise ValueError("psi expects an operator without central variables")
    mono = next(iter(P.terms))
    k = [mono[1 + 2 * 0 + d + n + j] - mono[1 + j] for j in range(d)]
    for mono in P.terms:
        if [mono[1 + d + n + j] - mono[1 + j] for j in range(d)] != k:
            raise ValueError("operator is not multi-homogeneous")
    S = Operator.constant(ring, 1)
    for j, kj in enumerate(k):
        if kj > 0:
            S = multiply(S, Operator.var(ring, ring.tnames[j], kj))
        elif kj < 0:
            S = multiply(S, Operator.var(ring, "d" + ring.tnames[j], -kj))
    Q = multiply(S, P)
    out: dict = {}
    ff_cache: dict = {}
    for mono, c in Q.terms.items():
        a = [mono[1 + j] for j in range(d)]
        if a != [mono[1 + d + n + j] for j in range(d)]:
            raise AssertionError("normalization did not reach weight zero")
        xpart = [mono[1 + d + i] for i in range(n)]
        dpart = [mono[1 + 2 * d + n + i] for i in range(n)]
        # expand prod_j falling(a_j) in s_j
        poly = {(): ONE}
        for aj in a:
            ff = ff_cache.setdefault(aj, falling_factorial(aj))
            poly = {e + (p,): cv * fc for e, cv in poly.items() for p, fc in enumerate(ff) if fc}
        for e, cv in poly.items():
            key = (0, *e, *xpart, *dpart)
            v = out.get(key, ZERO) + c * cv
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return Operator._raw(sring, out)


def theta_subring_generators(Gi: Sequence[Operator], sring: RingSpec | None = None,
                             reduce: bool = True) -> list:
    """Generators of ``<Gi> ∩ A_n[t_1 dt_1, ..., t_d dt_d]`` written in ``A_n[s]``."""
    Gi = [g for g in Gi if g.terms]
    if not Gi:
        return []
    ring = Gi[0].ring
    if ring.d < 1:
        raise ValueError("theta_subring_generators needs d >= 1")
    sring = sring or s_ring(ring)
    big = mh_ring(ring)
    d = ring.d
    gens = [multi_homogenize(g) for g in Gi]
    for j in range(d):
        v = Operator.var(big, f"v{j + 1}")
        w = Operator.var(big, f"w{j + 1}")
        gens.append(Operator.constant(big, 1) - multiply(v, w))
    G = buchberger(gens, mh_order(big), reduce=reduce)
    vw = [f"v{j + 1}" for j in range(d)] + [f"w{j + 1}" for j in range(d)]
    vw_idx = [big.index(v) for v in vw]
    out = []
    for g in G.elements:
        if all(not mono[1 + i] for mono in g.terms for i in vw_idx):
            P = drop_central(g, vw)
            P = Operator._raw(ring, P.terms, 1) if P.ring != ring else P
            out.append(psi(P, sring))
    return out


def _free_of(P: Operator, idx) -> bool:
    return all(not mono[1 + i] for mono in P.terms for i in idx)


def eliminate(gens: Sequence[Operator], names: Sequence[str]) -> list:
    """Generators of ``<gens> ∩ (subring without the named variables)``."""
    gens = [g for g in gens if g.terms]
    if not gens:
        return []
    ring = gens[0].ring
    if not names:
        return gens
    order = elimination_order(ring, names)
    G = buchberger(gens, order)
    idx = [ring.index(v) for v in names]
    return [g for g in G.elements if _free_of(g, idx)]


def eliminate_to_theta(G2: Sequence[Operator], d: int | None = None) -> list:
    """``<G2> ∩ Q[x, theta]`` with ``theta = s_1 + ... + s_d``.

    Returns operators over ``A_n[theta]`` that involve no derivations.
    """
    G2 = [g for g in G2 if g.terms]
    if not G2:
        return []
    ring = G2[0].ring
    snames = ring.params
    d = d if d is not None else len(snames)
    dx = list(ring.derivation_names)
    J = eliminate(G2, dx)
    if not J:
        return []
    primes = tuple(f"{s}_" for s in snames[1:])
    tring = RingSpec(0, ring.n, "none", ("theta",) + primes, (), ring.xnames)
    th = Operator.var(tring, "theta")
    images = {snames[0]: th - sum((Operator.var(tring, p) for p in primes), Operator.zero(tring))}
    for s, p in zip(snames[1:], primes):
        images[s] = Operator.var(tring, p)
    for v in ring.position_names + ring.derivation_names:
        images[v] = Operator.var(tring, v)
    J = [ring_map(g, tring, images) for g in J]
    J = eliminate(J, primes)
    if primes:
        J = [drop_central(g, primes) for g in J]
    return J


def contract_to_theta(J: Sequence[Operator]) -> BPoly:
    """Monic generator of ``<J> ∩ Q[theta]`` (zero if the intersection is zero)."""
    J = [g for g in J if g.terms]
    if not J:
        return BPoly(())
    ring = J[0].ring
    K = eliminate(J, list(ring.position_names))
    ti = ring.index("theta")
    acc: list = []
    for g in K:
        coeffs = [ZERO] * (1 + max(m[1 + ti] for m in g.terms))
        for m, c in g.terms.items():
            coeffs[m[1 + ti]] += c
        acc = upoly_gcd(acc, coeffs) if acc else upoly_monic(coeffs)
    return BPoly(tuple(acc))


def global_b(Js: Sequence[Sequence[Operator]], m: Sequence[int] | None = None) -> BPoly:
    """``lcm_i b_i(theta - m_i)`` where ``b_i`` generates ``J_i ∩ Q[theta]``."""
    m = tuple(m) if m is not None else (0,) * len(Js)
    acc = [ONE]
    for J, mi in zip(Js, m):
        bi = J if isinstance(J, BPoly) else contract_to_theta(J)
        if bi.is_zero():
            return BPoly(())
        acc = upoly_lcm(acc, upoly_shift(bi.coeffs, -mi))
    return BPoly(tuple(acc))


@dataclass
class BFunctionResult:
    b: BPoly
    fgb: GroebnerBasis
    components: list            # G_i
    theta_generators: list      # per component, generators in A_n[s]
    J: list                     # per component, generators of J_i in Q[x, theta]
    b_components: list          # per component b_i(theta)
    m: tuple

    @property
    def integer_roots(self) -> list:
        return [] if self.b.is_zero() else integer_roots(self.b)[0]


def b_function(generators: Sequence[Operator], m: Sequence[int] | None = None, route: str = "t0",
               fgb: GroebnerBasis | None = None) -> BFunctionResult:
    """Global b-function along ``t = 0`` of ``A^r / <generators>``."""
    if not generators:
        raise ValueError("no generators")
    ring, rank = generators[0].ring, generators[0].rank
    if ring.d < 1:
        raise ValueError("b-functions need at least one t-variable")
    m = tuple(m) if m is not None else (0,) * rank
    if fgb is None:
        fgb = f_groebner(generators, m, route=route, position="pot")
    comps = gr_components(fgb, m)
    sring = s_ring(ring)
    thetas, Js, bs = [], [], []
    for Gi in comps:
        if not Gi:
            thetas.append([])
            Js.append([])
            bs.append(BPoly(()))
            continue
        G2 = theta_subring_generators(Gi, sring)
        thetas.append(G2)
        J = eliminate_to_theta(G2, ring.d)
        Js.append(J)
        bs.append(contract_to_theta(J))
    b = global_b(bs, m)
    return BFunctionResult(b, fgb, comps, thetas, Js, bs, m)


def bfunction(generators: Sequence[Operator], m: Sequence[int] | None = None, route: str = "t0") -> BPoly:
    return b_function(generators, m, route).b


# ---------------------------------------------------------------------------
# an independent route: minimal polynomial of theta on the graded module


def b_function_linear(generators: Sequence[Operator] | GroebnerBasis, m: Sequence[int] | None = None,
                      max_degree: int = 60, route: str = "t0") -> BPoly:
    """Minimal polynomial of ``theta`` acting on each ``e_i`` modulo the initial
    module, found by linear algebra on normal forms.  Used as a cross-check."""
    if isinstance(generators, GroebnerBasis):
        fgb = generators
        ring, rank = fgb.ring, fgb.rank
    else:
        ring, rank = generators[0].ring, generators[0].rank
        m0 = tuple(m) if m is not None else (0,) * rank
        fgb = f_groebner(generators, m0, route=route, position="pot")
    m = tuple(m) if m is not None else (0,) * rank
    sig = [symbol(g, None, m) for g in fgb.elements]
    order = F_order(ring, m, None, "grevlex", "pot")
    th = theta_operator(ring)
    bs = []
    for i in range(rank):
        cur = Operator.constant(ring, 1, i, rank)
        vecs = []
        found = None
        for k in range(max_degree + 1):
            nf = divide(cur, sig, order, allow_nonwell=True)[1].component(i)
            vecs.append(nf)
            rel = _linear_relation(vecs)
            if rel is not None:
                found = rel
                break
            cur = multiply(th, cur)
        bs.append(BPoly(tuple(found)) if found is not None else BPoly(()))
    return global_b(bs, m)


def _linear_relation(vecs):
    """Monic relation ``sum c_k vecs[k] = 0`` with ``c_last = 1`` if the last
    vector depends on the previous ones."""
    monos = sorted({mono for v in vecs for mono in v.terms})
    idx = {mono: j for j, mono in enumerate(monos)}
    rows = []
    for v in vecs:
        row = [ZERO] * len(monos)
        for mono, c in v.terms.items():
            row[idx[mono]] = c
        rows.append(row)
    # solve sum_{k<K} c_k rows[k] = -rows[K]
    K = len(rows) - 1
    target = [-x for x in rows[K]]
    basis = rows[:K]
    sol = _solve(basis, target)
    if sol is None:
        return None
    return list(sol) + [ONE]


def _solve(basis, target):
    """Find c with sum c_k basis[k] = target (exact), or None."""
    K = len(basis)
    ncols = len(target)
    if K == 0:
        return [] if not any(target) else None
    # augmented column system: columns = basis vectors
    A = [[basis[k][j] for k in range(K)] + [target[j]] for j in range(ncols)]
    piv_cols = []
    r = 0
    for col in range(K):
        piv = next((i for i in range(r, len(A)) if A[i][col]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = ONE / A[r][col]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][col]:
                f = A[i][col]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        piv_cols.append(col)
        r += 1
    for i in range(r, len(A)):
        if A[i][K]:
            return None
    sol = [ZERO] * K
    for i, col in enumerate(piv_cols):
        sol[col] = A[i][K]
    return sol


def annihilation_residue(b: BPoly, fgb: GroebnerBasis, m: Sequence[int] | None = None) -> list:
    """For each ``i`` the component-``i`` part of the normal form of
    ``b(theta + m_i) e_i`` modulo the initial parts of ``fgb``; all vanish when
    ``b(theta)`` annihilates the graded module."""
    ring, rank = fgb.ring, fgb.rank
    m = tuple(m) if m is not None else (0,) * rank
    sig = [symbol(g, None, m) for g in fgb.elements]
    order = F_order(ring, m, None, "grevlex", "pot")
    out = []
    for i in range(rank):
        P = eval_at_theta(b, ring, m[i])
        P = Operator._raw(ring, {(i, *k[1:]): c for k, c in P.terms.items()}, rank)
        out.append(divide(P, sig, order, allow_nonwell=True)[1].component(i))
    return out
