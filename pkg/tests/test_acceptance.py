"""Acceptance checks, one PASS/FAIL line per criterion.

The lines are printed outside pytest's capture so they show in a plain
``pytest`` run.  Inputs come from the bundled job files where one exists.
"""

import os
import subprocess
import sys
from fractions import Fraction

import pytest

from conftest import JOBS
from dmodalg.bfunction import BPoly, b_function
from dmodalg.cli import parse_job
from dmodalg.dfunctors import local_cohomology, localize, tor
from dmodalg.groebner import buchberger
from dmodalg.orders import h_order, weight_order
from dmodalg.presentation import ModulePresentation
from dmodalg.restriction import restrict
from dmodalg.ring import RingSpec, homogenize_F, homogenize_h
from dmodalg.text import parse, render

HERE = os.path.dirname(os.path.abspath(__file__))


@pytest.fixture
def report(capsys):
    def emit(number, label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {label}" + (f" ({detail})" if detail else "")
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return emit


def job(name):
    with open(os.path.join(JOBS, name), encoding="utf-8") as fh:
        return parse_job(fh.read())


def gb_texts(pres):
    return sorted(render(g) for g in pres.annihilator_gb())


def cyclic_gb_equals(pres, texts):
    if pres.rank != 1:
        return False
    expected = ModulePresentation(pres.ring, 1, [parse(t, pres.ring) for t in texts])
    return gb_texts(pres) == gb_texts(expected)


def test_criterion_1_cusp_pair_b_function(report):
    j = job("cusp_pair_bfunction.job")
    b = b_function(j.module).b
    F = Fraction
    roots = [0, F(5, 18), F(1, 6), F(1, 18), F(-1, 18), F(-1, 6), F(-5, 18), F(-1, 3),
             F(-7, 18), F(-11, 18), F(-2, 3)]
    ok = b == BPoly.from_roots(roots) and b.degree == 11
    report(1, "b-function of degree 11 with the expected roots", ok, b.render())


def test_criterion_2_line_b_function(report):
    b = b_function(job("gkz_line_bfunction.job").module).b
    ok = b == BPoly.from_roots([Fraction(1, 3), Fraction(1, 30)])
    report(2, "b-function along the line is (theta - 1/3)(theta - 1/30)", ok, b.render())


def test_criterion_3_origin_restriction(report):
    dims = restrict(job("gkz_origin_restrict.job").module).dimensions
    report(3, "restriction to the origin has dimensions 1, 3, 3, 1, 0", dims == [1, 3, 3, 1, 0], str(dims))


def test_criterion_4_line_restriction(report):
    r = restrict(job("gkz_line_restrict.job").module)
    H0, H1 = r.by_degree(0), r.by_degree(-1)
    ring = H1.ring
    square = ModulePresentation(ring, 2, [parse("[x4*dx4, 0]", ring), parse("[0, x4*dx4]", ring)])
    same = H1.rank == 2 and sorted(map(render, H1.groebner().elements)) == \
        sorted(map(render, square.groebner().elements))
    ok = cyclic_gb_equals(H0, ["x4*dx4"]) and same
    report(4, "H^0 is A/(x4*dx4) and H^-1 is its square", ok, f"H^0 {gb_texts(H0)}, H^-1 rank {H1.rank}")


def test_criterion_5_two_variable_origin(report):
    dims = restrict(job("appell_origin_restrict.job").module).dimensions
    report(5, "two-variable system restricts to dimensions 1, 2, 1", dims == [1, 2, 1], str(dims))


def test_criterion_6_tor_triple(report):
    R = RingSpec(0, 1, xnames=("x",))
    P = lambda t: [parse(t, R)]
    a = tor(P("x*dx"), P("x"))
    b = tor(P("x"), P("x"))
    c = tor(P("x*dx + 1"), P("x"))
    ok = (cyclic_gb_equals(a[0], ["x"]) and cyclic_gb_equals(a[1], ["x"])
          and b[0].is_zero() and cyclic_gb_equals(b[1], ["x"])
          and c[0].is_zero() and c[1].is_zero())
    report(6, "Tor of (x*dx, x), (x, x) and (x*dx + 1, x)", ok)


def test_criterion_7_local_cohomology(report):
    j = job("localcohom_xz_yz.job")
    H = local_cohomology(j.module, j.polys)
    L = localize(j.module, parse("z", j.ring))
    ok = (not H[0].is_zero() and H[1].is_zero() and cyclic_gb_equals(H[2], ["x", "y", "z^2*dz + 2*z + 1"])
          and cyclic_gb_equals(L, ["dx", "dy", "z^2*dz + z + 1"]))
    report(7, "local cohomology along x*z = y*z = 0 and localization at z", ok,
           f"H^2 {gb_texts(H[2]) if H[2].rank == 1 else H[2].rank}, M[1/z] {gb_texts(L)}")


GRASSMANN = ["x4*x2 - x5*x1 + t1", "x4*x3 - x6*x1 + t2", "x5*x3 - x6*x2 + t3",
             "x5*dt1 + x6*dt2 + dx1", "-x4*dt1 + x6*dt3 + dx2", "-x4*dt2 - x5*dt3 + dx3",
             "-x2*dt1 - x3*dt2 + dx4", "x1*dt1 - x3*dt3 + dx5", "x1*dt2 + x2*dt3 + dx6"]


def grassmann_sizes(tiebreak="grevlex", sign=-1):
    """Reduced GB sizes of the h-homogenized and the V-homogenized ideal.

    ``sign = -1`` weighs t by -1 and dt by +1 in the first row of the h-order
    (the V-weight); ``sign = 1`` is the opposite reading.
    """
    R = RingSpec(3, 6)
    gens = [parse(s, R) for s in GRASSMANN]
    names = R.position_names + R.derivation_names

    def wv(d):
        return [d.get(v, 0) for v in names]

    w1 = wv({**{f"t{i}": sign for i in (1, 2, 3)}, **{f"dt{i}": -sign for i in (1, 2, 3)}})
    w2 = wv({**{f"x{i}": 1 for i in range(1, 7)}, **{f"dx{i}": 1 for i in range(1, 7)},
             **{f"t{i}": 1 for i in (1, 2, 3)}})
    hom = [homogenize_h(g) for g in gens]
    Gh = buchberger(hom, h_order(hom[0].ring, None, w1, None, tiebreak, extra_rows=[w2]))
    vw = wv({**{f"t{i}": -1 for i in (1, 2, 3)}, **{f"dt{i}": 1 for i in (1, 2, 3)}})
    homF = [homogenize_F(g, None, vw) for g in gens]
    RF = homF[0].ring
    GF = buchberger(homF, weight_order(RF, [[1] + [0] * (RF.nvars - 1), [0] + w2], tiebreak=tiebreak))
    return len(Gh.elements), len(GF.elements)


def test_criterion_8_grassmann_basis_sizes(report):
    nh, nf = grassmann_sizes()
    ok = abs(nh - 44) <= 4.4 and abs(nf - 55) <= 5.5
    report(8, "reduced GB sizes within 10% of 44 and 55 (grevlex tie-break, V-weight first row)", ok,
           f"I^h {nh}, I' {nf}")


def test_criterion_9_property_suites(report):
    suites = ["test_ring.py", "test_orders.py", "test_groebner.py", "test_bfunction.py",
              "test_restriction.py", "test_dfunctors.py", "test_cli.py"]
    missing = [s for s in suites if not os.path.exists(os.path.join(HERE, s))]
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", "-m", "not slow",
                           *[os.path.join(HERE, s) for s in suites]],
                          capture_output=True, text=True, cwd=os.path.dirname(HERE))
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    report(9, "property suites pass", not missing and proc.returncode == 0, tail)
