"""Tor against the structure sheaf, Bernstein-Sato polynomials, localization
and algebraic local cohomology, all reduced to restriction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .bfunction import BPoly, NotSpecializable, b_function, integer_roots, theta_subring_generators, s_ring, \
    upoly_shift
from .presentation import ModulePresentation, minimize_presentation, is_zero_module
from .restriction import RestrictionResult, restrict
from .ring import ONE, Operator, RingSpec, multiply, relabel_ring, ring_map, substitute_central


def _base(ring: RingSpec) -> RingSpec:
    if ring.d or ring.extension != "none" or ring.params:
        raise ValueError("expected a module over A_n (no t-variables, no extension)")
    return ring


def _diff(f: Operator, x: str) -> Operator:
    """Partial derivative of a polynomial (no derivations) in ``x``."""
    ring = f.ring
    i = ring.index(x)
    out = {}
    for mono, c in f.terms.items():
        k = mono[1 + i]
        if k:
            m2 = list(mono)
            m2[1 + i] -= 1
            out[tuple(m2)] = c * k
    return Operator._raw(ring, out, f.rank)


def _is_polynomial(f: Operator) -> bool:
    ring = f.ring
    off = 1 + ring.ncentral + ring.nweyl
    return all(not any(m[off:]) for m in f.terms)


def _lift(P: Operator, target: RingSpec, names: dict, extra: dict | None = None,
          rank: int | None = None, comp_map=None) -> Operator:
    """Map ``P`` into ``target`` renaming variables (``names[v] = new name``)
    or substituting full images from ``extra``."""
    images = {}
    for v in P.ring.names:
        if extra and v in extra:
            images[v] = extra[v]
        else:
            images[v] = Operator.var(target, names.get(v, v))
    return ring_map(P, target, images, rank, comp_map)


# ---------------------------------------------------------------------------
# tensor product


def exterior_tensor(N1: Sequence[Operator], N2: Sequence[Operator], r1: int | None = None,
                    r2: int | None = None, ynames: Sequence[str] | None = None):
    """Generators of ``M1 ⊠ M2`` in ``A_{2n}^{r1 r2}`` with variables ``(x, y)``.

    Component ``(i, j)`` is flattened to ``i * r2 + j``.
    """
    ring = _base((N1 or N2)[0].ring)
    n = ring.n
    r1 = r1 if r1 is not None else N1[0].rank
    r2 = r2 if r2 is not None else N2[0].rank
    ynames = tuple(ynames) if ynames is not None else tuple(f"_y{i + 1}" for i in range(n))
    big = RingSpec(0, 2 * n, "none", (), (), ring.xnames + ynames)
    ren_y = {x: y for x, y in zip(ring.xnames, ynames)}
    ren_y.update({"d" + x: "d" + y for x, y in zip(ring.xnames, ynames)})
    gens = []
    for P in N1:
        for j in range(r2):
            gens.append(_lift(P, big, {}, rank=r1 * r2, comp_map=[i * r2 + j for i in range(r1)]))
    for Q in N2:
        for i in range(r1):
            gens.append(_lift(Q, big, ren_y, rank=r1 * r2, comp_map=[i * r2 + j for j in range(r2)]))
    return big, [g for g in gens if g.terms]


def _diagonal_shift(N1, N2, r1, r2):
    """Tensor generators after ``y = x + t``: ring ``A_{n+n}`` with the
    ``t`` block first, restriction along ``t = 0`` gives Tor."""
    ring = _base((N1 or N2)[0].ring)
    n = ring.n
    tn = tuple(f"_t{i + 1}" for i in range(n))
    R = RingSpec(n, n, "none", (), tn, ring.xnames)
    rank = r1 * r2
    gens = []
    img1 = {}
    for x, t in zip(ring.xnames, tn):
        img1["d" + x] = Operator.var(R, "d" + x) - Operator.var(R, "d" + t)
    img2 = {}
    for x, t in zip(ring.xnames, tn):
        img2[x] = Operator.var(R, x) + Operator.var(R, t)
        img2["d" + x] = Operator.var(R, "d" + t)
    for P in N1:
        for j in range(r2):
            gens.append(_lift(P, R, {}, img1, rank, [i * r2 + j for i in range(r1)]))
    for Q in N2:
        for i in range(r1):
            gens.append(_lift(Q, R, {}, img2, rank, [i * r2 + j for j in range(r2)]))
    return R, [g for g in gens if g.terms]


def _zero_module(ring, count):
    return [ModulePresentation(ring, 0, []) for _ in range(count)]


def tor(N1: Sequence[Operator], N2: Sequence[Operator], r1: int | None = None, r2: int | None = None,
        depth: int | None = None, route: str = "h") -> list:
    """``Tor_k(M1, M2)`` for ``k = 0..n`` (or ``0..depth``) as presentations over ``A_n``."""
    ring = _base((list(N1) + list(N2))[0].ring)
    r1 = r1 if r1 is not None else N1[0].rank
    r2 = r2 if r2 is not None else N2[0].rank
    R, gens = _diagonal_shift(N1, N2, r1, r2)
    top = ring.n if depth is None else min(depth, ring.n)
    if not gens:
        raise ValueError("both modules are free; Tor of free modules is not holonomic")
    res = restrict(gens, None, None, depth, route)
    out = [_to_ring(p, ring) for p in res.cohomology]
    return out[:top + 1]


def _to_ring(P: ModulePresentation, ring: RingSpec) -> ModulePresentation:
    if P.rank == 0:
        return ModulePresentation(ring, 0, [])
    return ModulePresentation(ring, P.rank, [relabel_ring(r, ring) for r in P.relations])


# ---------------------------------------------------------------------------
# Bernstein-Sato polynomial, annihilator of f^s, localization


def graph_ideal(f: Operator):
    """``t - f, dx_i + f_i dt`` in ``A_{1+n}`` (t first)."""
    ring = _base(f.ring)
    if f.rank != 1 or not _is_polynomial(f):
        raise ValueError("f must be a polynomial")
    if f.is_constant():
        raise ValueError("f must be non-constant")
    R = RingSpec(1, ring.n, "none", (), ("_t",), ring.xnames)
    fR = _lift(f, R, {})
    t, dt = Operator.var(R, "_t"), Operator.var(R, "d_t")
    gens = [t - fR]
    for x in ring.xnames:
        gens.append(Operator.var(R, "d" + x) + multiply(_lift(_diff(f, x), R, {}), dt))
    return R, gens


def bernstein_sato(f: Operator) -> BPoly:
    """``b_f(s) = b(-s-1)`` with ``b`` the b-function of the graph ideal."""
    R, gens = graph_ideal(f)
    b = b_function(gens).b
    if b.is_zero():
        raise NotSpecializable("graph module has zero b-function")
    # b(-s-1): substitute and renormalize
    c = upoly_shift(b.coeffs, -1)          # b(s - 1)
    c = [x * (-1) ** k for k, x in enumerate(c)]  # b(-s - 1)
    return BPoly(tuple(c), "s")


def ann_fs(f: Operator) -> list:
    """Generators of the annihilator of ``f^s`` in ``A_n[s]``."""
    R, gens = graph_ideal(f)
    ring = f.ring
    sring = s_ring(R, ("_s1",))
    G2 = theta_subring_generators(gens, sring)
    target = RingSpec(0, ring.n, "none", ("s",), (), ring.xnames)
    s = Operator.var(target, "s")
    images = {"_s1": -s - Operator.constant(target, 1)}
    out = [ring_map(g, target, images) for g in G2]
    return [g for g in out if g.terms]


def apply_to_fs(P: Operator, f: Operator) -> Operator:
    """``P f^s / f^(s-K)`` as a polynomial in ``Q[s, x]`` (an ``A_n[s]`` operator
    free of derivations); zero exactly when ``P`` kills ``f^s``.

    Represents ``g f^(s-k)`` by the pair ``(g, k)`` and uses
    ``dx_i (g f^(s-k)) = (dx_i g f + (s-k) g f_i) f^(s-k-1)``.
    """
    ring = P.ring
    n = ring.n
    base = f.ring
    fR = _lift(f, ring, {})
    partials = [_lift(_diff(f, x), ring, {}) for x in base.xnames]
    s = Operator.var(ring, "s")
    off_d = 1 + ring.ncentral + n
    # expand P = sum coef * s^a x^alpha dx^beta acting on f^s
    cache = {}

    def d_apply(beta):
        """``dx^beta f^s`` as (g, k) with result ``g f^(s-k)``."""
        if beta in cache:
            return cache[beta]
        if not any(beta):
            out = (Operator.constant(ring, 1), 0)
        else:
            i = next(j for j, b in enumerate(beta) if b)
            prev = list(beta)
            prev[i] -= 1
            g, k = d_apply(tuple(prev))
            dg = _diff(g, ring.xnames[i])
            g2 = multiply(dg, fR) + multiply(multiply(s - Operator.constant(ring, k), g), partials[i])
            out = (g2, k + 1)
        cache[beta] = out
        return out

    pieces = []
    K = 0
    for mono, c in P.terms.items():
        beta = tuple(mono[off_d + i] for i in range(n))
        g, k = d_apply(beta)
        left = Operator.monomial(ring, mono[1:off_d] + (0,) * n, c)
        pieces.append((multiply(left, g), k))
        K = max(K, k)
    acc = Operator.zero(ring)
    for g, k in pieces:
        acc = acc + multiply(g, fR ** (K - k))
    return acc


def localization_ideal(f: Operator):
    """``(nu, J_f(nu))`` with ``nu`` the least integral root of ``b_f``."""
    b = bernstein_sato(f)
    roots, _ = integer_roots(b)
    if not roots:
        raise ArithmeticError("b_f has no integral root")
    nu = roots[0]
    J = ann_fs(f)
    Jnu = [substitute_central(g, "s", nu) for g in J]
    return nu, [g for g in Jnu if g.terms]


def localize(N: Sequence[Operator], f: Operator, r: int | None = None, route: str = "h") -> ModulePresentation:
    """``M[1/f]`` as ``Tor_0(A_n / J_f(nu), M)``."""
    ring = _base(f.ring)
    N = [g for g in N]
    r = r if r is not None else (N[0].rank if N else 1)
    nu, Jnu = localization_ideal(f)
    if _is_zero_generated(N, r):
        return ModulePresentation(ring, 0, [])
    out = tor(Jnu, N, 1, r, depth=0, route=route)[0]
    return out


def _is_zero_generated(N, r) -> bool:
    """The relations contain every unit vector (M = 0)."""
    if not N:
        return False
    return is_zero_module(ModulePresentation(N[0].ring, r, [g for g in N if g.terms]))


# ---------------------------------------------------------------------------
# local cohomology


def local_cohomology(N: Sequence[Operator], fs: Sequence[Operator], r: int | None = None,
                     route: str = "h") -> list:
    """``H^i_[Y](M)`` for ``i = 0..d`` with ``Y = {f_1 = ... = f_d = 0}``."""
    N = list(N)
    ring = _base((N + list(fs))[0].ring)
    n, d = ring.n, len(fs)
    r = r if r is not None else N[0].rank
    for f in fs:
        if f.ring != ring or not _is_polynomial(f):
            raise ValueError("f_j must be polynomials in the module's ring")
    if any(f.is_constant() and f.constant_term() != 0 for f in fs):
        return _zero_module(ring, d + 1)
    if _is_zero_generated(N, r):
        return _zero_module(ring, d + 1)
    tn = tuple(f"_t{j + 1}" for j in range(d))
    zn = tuple(f"_z{i + 1}" for i in range(n))
    # positions (z | t, x); the first restriction is along z = 0
    R = RingSpec(n, d + n, "none", (), zn, tn + ring.xnames)
    gens = []
    for k in range(r):
        for j, f in enumerate(fs):
            g = Operator.var(R, tn[j]) - _lift(f, R, {})
            gens.append(_place(g, k, r))
        for x in ring.xnames:
            g = Operator.var(R, "d" + x)
            for j, f in enumerate(fs):
                g = g + multiply(_lift(_diff(f, x), R, {}), Operator.var(R, "d" + tn[j]))
            gens.append(_place(g, k, r))
    # P(y, dy) with y = x + z: y -> x + z, dy -> dz (and dx picks up -dz on the B side,
    # which is already written in the x variables; the substitution acts on every generator)
    sub_all = {}
    for x, z in zip(ring.xnames, zn):
        sub_all["d" + x] = Operator.var(R, "d" + x) - Operator.var(R, "d" + z)
    gens = [ring_map(g, R, sub_all) for g in gens]
    img_y = {}
    for x, z in zip(ring.xnames, zn):
        img_y[x] = Operator.var(R, x) + Operator.var(R, z)
        img_y["d" + x] = Operator.var(R, "d" + z)
    for P in N:
        if P.terms:
            gens.append(_lift(P, R, {}, img_y, r))
    first = restrict(gens, None, (0, 0), 0, route)
    H0 = first.cohomology[0]
    mid = RingSpec(d, n, "none", (), tn, ring.xnames)
    if H0.rank == 0:
        return _zero_module(ring, d + 1)
    # the first restriction lives over A_{d+n} with positions (t, x): same layout as ``mid``
    rels = [Operator._raw(mid, p.terms, p.rank) for p in H0.relations]
    if not rels:
        raise NotSpecializable("intermediate module is free; not holonomic")
    second = restrict(rels, None, None, None, route)
    # H^i_[Y] = L_{i-d}
    out = []
    for i in range(d + 1):
        out.append(_to_ring(second.by_degree(i - d), ring))
    return out


def _place(P: Operator, comp: int, rank: int) -> Operator:
    return Operator._raw(P.ring, {(comp, *m[1:]): c for m, c in P.terms.items()}, rank)


@dataclass
class LocalCohomology:
    groups: list

    def __getitem__(self, i):
        return self.groups[i]
