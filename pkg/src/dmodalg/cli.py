"""Batch front end: read a job file, run one algorithm, print JSON.

A job file is a sequence of ``;``-terminated statements::

    ring t(2) x(3);              # counts, or explicit names: t(u, v) x(x, y, z)
    shift (0, 1);                # optional, one integer per generator component
    module [[t1 - x1^2], [dx1 + 2*x1*dt1]];
    module2 [[x1]];              # second module for ``tensor``
    polys [x1*x2, x3];           # polynomials for the functor commands
    command restrict window=(0,2) depth=1 route=h;

Rows of a module are bracketed lists of operators; a bare operator is a
rank-one row.  ``#`` starts a comment.  The ``command`` keyword may be
omitted.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
import time
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .bfunction import BPoly, NotSpecializable, annihilation_residue, b_function, integer_roots
from .dfunctors import ann_fs, apply_to_fs, bernstein_sato, local_cohomology, localize, tor
from .groebner import adapted_resolution, buchberger, compose_rows, is_groebner, reduce_basis
from .orders import monomial_order
from .presentation import ModulePresentation
from .restriction import restrict
from .ring import Operator, RingSpec
from .text import ParseError, parse, render

log = logging.getLogger("dmodalg")

COMMANDS = ("gb", "resolution", "bfunction", "restrict", "tensor", "localize", "localcohom", "bsato", "annfs")
EXIT_OK, EXIT_ERROR, EXIT_NOT_SPECIALIZABLE = 0, 1, 2


@dataclass
class JobFile:
    ring: RingSpec
    module: list                       # rank-r Operators
    rank: int
    command: str
    options: dict = field(default_factory=dict)
    shift: tuple | None = None
    module2: list | None = None
    rank2: int | None = None
    polys: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# splitting helpers that remember offsets into the original text


def _strip_comments(text: str) -> str:
    # keep offsets stable: blank out comment characters instead of deleting them
    return re.sub(r"#[^\n]*", lambda mt: " " * len(mt.group()), text)


def _split_top(text: str, sep: str, start: int = 0) -> list:
    """Split at ``sep`` outside brackets/parentheses; returns ``(piece, offset)``."""
    out, depth, last = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced bracket", text, i)
        elif ch == sep and depth == 0:
            out.append((text[last:i], start + last))
            last = i + 1
    if depth:
        raise ParseError("unbalanced bracket", text, len(text))
    out.append((text[last:], start + last))
    return out


def _unwrap(piece: str, offset: int, full: str, open_: str = "[", close: str = "]"):
    s = piece.strip()
    lead = offset + len(piece) - len(piece.lstrip())
    if not (s.startswith(open_) and s.endswith(close)):
        raise ParseError(f"expected {open_}...{close}", full, lead)
    return s[1:-1], lead + 1


def _parse_at(text: str, ring: RingSpec, offset: int, full: str) -> Operator:
    try:
        return parse(text, ring)
    except ParseError as e:
        raise ParseError(str(e).split(" at position")[0], full, offset + e.pos) from None


def _parse_rows(body: str, offset: int, full: str, ring: RingSpec) -> list:
    inner, off = _unwrap(body, offset, full)
    if not inner.strip():
        return []
    rows = []
    for piece, poff in _split_top(inner, ",", off):
        s = piece.strip()
        lead = poff + len(piece) - len(piece.lstrip())
        if s.startswith("["):
            entries, eoff = _unwrap(piece, poff, full)
            ops = [_parse_at(t, ring, o, full) for t, o in _split_top(entries, ",", eoff)]
            rows.append(Operator.vector(ops) if len(ops) > 1 else ops[0])
        else:
            rows.append(_parse_at(s, ring, lead, full))
    ranks = {r.rank for r in rows}
    if len(ranks) > 1:
        raise ParseError("rows of a module must all have the same length", full, offset)
    return rows


_RING = re.compile(r"^\s*ring\s+t\s*\(([^)]*)\)\s*x\s*\(([^)]*)\)\s*$")


def _names_or_count(spec: str, pos: int, full: str):
    spec = spec.strip()
    if re.fullmatch(r"\d+", spec):
        return int(spec), ()
    if not spec:
        return 0, ()
    names = tuple(s.strip() for s in spec.split(","))
    for nm in names:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", nm):
            raise ParseError(f"bad variable name {nm!r}", full, pos)
    return len(names), names


def _value(text: str):
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        return tuple(int(v) for v in text[1:-1].split(",") if v.strip())
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    return text


def _parse_options(text: str, pos: int, full: str) -> dict:
    opts = {}
    for mt in re.finditer(r"(\w+)\s*=\s*(\([^)]*\)|[^\s]+)|(\S+)", text):
        if mt.group(3):
            raise ParseError(f"expected key=value, found {mt.group(3)!r}", full, pos + mt.start())
        opts[mt.group(1)] = _value(mt.group(2))
    return opts


def parse_job(text: str) -> JobFile:
    """Parse a job file; errors carry the offending position."""
    full = _strip_comments(text)
    ring = None
    stmts = {}
    for piece, off in _split_top(full, ";"):
        if not piece.strip():
            continue
        lead = off + len(piece) - len(piece.lstrip())
        s = piece.strip()
        head = s.split(None, 1)[0]
        head = re.match(r"[A-Za-z_0-9]+", head).group() if re.match(r"[A-Za-z_0-9]+", head) else head
        rest = s[len(head):]
        rest_off = lead + len(head)
        if head == "ring":
            if ring is not None:
                raise ParseError("the ring is declared twice", full, lead)
            mt = _RING.match(s)
            if not mt:
                raise ParseError("expected: ring t(<d>) x(<n>)", full, lead)
            d, tn = _names_or_count(mt.group(1), lead, full)
            n, xn = _names_or_count(mt.group(2), lead, full)
            try:
                ring = RingSpec(d, n, "none", (), tn, xn)
            except ValueError as e:
                raise ParseError(str(e), full, lead) from None
            continue
        if ring is None:
            raise ParseError("the ring must be declared first", full, lead)
        key = "command" if head in COMMANDS else head
        if key in stmts:
            raise ParseError(f"duplicate {key!r} statement", full, lead)
        if head == "shift":
            stmts["shift"] = tuple(int(v) for v, _ in _split_top(_unwrap(rest, rest_off, full, "(", ")")[0], ","))
        elif head in ("module", "module2", "polys"):
            stmts[head] = _parse_rows(rest, rest_off, full, ring)
        elif head == "command":
            words = rest.split(None, 1)
            if not words:
                raise ParseError("missing command name", full, rest_off)
            name = words[0]
            stmts["command"] = (name, _parse_options(words[1] if len(words) > 1 else "",
                                                      rest_off + rest.index(name) + len(name), full), lead)
        elif head in COMMANDS:
            stmts["command"] = (head, _parse_options(rest, rest_off, full), lead)
        else:
            raise ParseError(f"unknown statement {head!r}", full, lead)
    if ring is None:
        raise ParseError("missing ring declaration", full, 0)
    if "command" not in stmts:
        raise ParseError("missing command", full, len(full))
    name, opts, cpos = stmts["command"]
    if name not in COMMANDS:
        raise ParseError(f"unknown command {name!r}; expected one of {', '.join(COMMANDS)}", full, cpos)
    module = stmts.get("module", [])
    rank = module[0].rank if module else 1
    shift = stmts.get("shift")
    if shift is not None and len(shift) != rank:
        raise ParseError(f"shift has {len(shift)} entries but the module has rank {rank}", full, 0)
    mod2 = stmts.get("module2")
    polys = stmts.get("polys", [])
    for f in polys:
        if f.rank != 1:
            raise ParseError("polys must be scalar operators", full, 0)
    return JobFile(ring, module, rank, name, opts, shift, mod2, mod2[0].rank if mod2 else None, polys)


# ---------------------------------------------------------------------------
# running


def _fraction(q) -> str:
    q = mpq(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _bpoly_doc(b: BPoly) -> dict:
    if b.is_zero():
        return {"b": "0", "degree": None, "roots": [], "integer_roots": []}
    roots, span = integer_roots(b)
    return {"b": b.render(), "degree": b.degree,
            "coefficients": [_fraction(c) for c in b.coeffs],
            "roots": [_fraction(r) for r in b.rational_roots()],
            "integer_roots": roots, "k0": span[0] if span else None, "k1": span[1] if span else None}


def _pres_doc(P: ModulePresentation, degree: int | None = None) -> dict:
    doc = P.render()
    if degree is not None:
        doc = {"degree": degree, **doc}
    if P.ring.nweyl == 0:
        doc["dimension"] = P.dimension()
    elif P.rank == 1:
        doc["annihilator_gb"] = [render(g) for g in P.annihilator_gb()]
    return doc


def _ring_doc(ring: RingSpec) -> dict:
    return {"d": ring.d, "n": ring.n, "tnames": list(ring.tnames), "xnames": list(ring.xnames)}


def _need(job: JobFile, what: str):
    if what == "module" and not job.module:
        raise ValueError(f"command {job.command!r} needs a module")
    if what == "polys" and not job.polys:
        raise ValueError(f"command {job.command!r} needs polys")
    if what == "module2" and not job.module2:
        raise ValueError(f"command {job.command!r} needs module2")
    if what == "A_n" and job.ring.d:
        raise ValueError(f"command {job.command!r} works over A_n; declare t(0)")


def run(job: JobFile, verify: bool = False) -> dict:
    """Dispatch a parsed job; returns the JSON document (without timings)."""
    o = job.options
    route = o.get("route", "h")
    depth = o.get("depth")
    window = o.get("window")
    if window is not None and (not isinstance(window, tuple) or len(window) != 2):
        raise ValueError("window must be a pair (k0,k1)")
    result: dict = {}
    sizes: dict = {}
    checks: dict = {}
    cmd = job.command
    if cmd == "gb":
        _need(job, "module")
        order = monomial_order(job.ring, job.rank, o.get("order", "grevlex"), o.get("position", "top"))
        G = reduce_basis(buchberger(job.module, order))
        result["basis"] = [render(g) for g in G.elements]
        sizes["gb"] = len(G.elements)
        if verify:
            checks["groebner"] = is_groebner(G.elements, order)
    elif cmd == "resolution":
        _need(job, "module")
        length = o.get("length", job.ring.d + 1)
        res = adapted_resolution(job.module, job.shift, length, route)
        result["ranks"] = res.ranks
        result["shifts"] = [list(s) for s in res.shifts]
        result["maps"] = [[render(r) for r in lvl] for lvl in res.levels]
        sizes["levels"] = res.ranks
        if verify:
            checks["composite_zero"] = all(
                not any(x.terms for x in compose_rows(res.levels[j], res.levels[j - 1]))
                for j in range(1, len(res.levels)))
    elif cmd == "bfunction":
        _need(job, "module")
        r = b_function(job.module, job.shift, o.get("route", "t0"))
        result.update(_bpoly_doc(r.b))
        result["components"] = [_bpoly_doc(bi)["b"] for bi in r.b_components]
        result["J_theta"] = [[render(g) for g in J] for J in r.J]
        sizes["f_groebner"] = len(r.fgb.elements)
        if verify and not r.b.is_zero():
            checks["annihilates"] = all(not x.terms for x in annihilation_residue(r.b, r.fgb, r.m))
    elif cmd == "restrict":
        _need(job, "module")
        r = restrict(job.module, job.shift, window, depth, route)
        C = r.complex
        result["window"] = list(C.window) if C.window else None
        result["b"] = C.b.render() if C.b is not None else None
        result["ranks"] = C.ranks
        result["cohomology"] = [_pres_doc(p, i) for i, p in zip(r.degrees, r.cohomology)]
        if r.dimensions is not None:
            result["dimensions"] = r.dimensions
        if C.resolution is not None:
            sizes["resolution"] = C.resolution.ranks
        if verify:
            checks["composite_zero"] = C.composite_zero()
    elif cmd == "tensor":
        _need(job, "module")
        _need(job, "module2")
        _need(job, "A_n")
        T = tor(job.module, job.module2, job.rank, job.rank2, depth, route)
        result["tor"] = [_pres_doc(p, k) for k, p in enumerate(T)]
    elif cmd == "localize":
        _need(job, "module")
        _need(job, "polys")
        _need(job, "A_n")
        if len(job.polys) != 1:
            raise ValueError("localize takes exactly one polynomial")
        result["module"] = _pres_doc(localize(job.module, job.polys[0], job.rank, route))
    elif cmd == "localcohom":
        _need(job, "module")
        _need(job, "polys")
        _need(job, "A_n")
        H = local_cohomology(job.module, job.polys, job.rank, route)
        result["cohomology"] = [_pres_doc(p, i) for i, p in enumerate(H)]
    elif cmd == "bsato":
        _need(job, "polys")
        _need(job, "A_n")
        result["bernstein_sato"] = [_bpoly_doc(bernstein_sato(f)) for f in job.polys]
    elif cmd == "annfs":
        _need(job, "polys")
        _need(job, "A_n")
        out = []
        ok = True
        for f in job.polys:
            gens = ann_fs(f)
            out.append([render(g) for g in gens])
            if verify:
                ok = ok and all(not apply_to_fs(g, f).terms for g in gens)
        result["annihilators"] = out
        if verify:
            checks["kills_f_s"] = ok
    else:  # pragma: no cover - rejected by the parser
        raise ValueError(f"unknown command {cmd!r}")
    doc = {"command": cmd, "ring": _ring_doc(job.ring), "result": result, "basis_sizes": sizes}
    if verify:
        doc["verified"] = checks
    return doc


def _thread_cap() -> int:
    raw = os.environ.get("DMOD_THREADS", "1")
    try:
        k = int(raw)
    except ValueError:
        raise ValueError(f"DMOD_THREADS must be a positive integer, got {raw!r}") from None
    if k < 1:
        raise ValueError("DMOD_THREADS must be at least 1")
    return k


def _apply_flags(job: JobFile, args) -> None:
    if args.route:
        job.options["route"] = args.route
    if args.depth is not None:
        job.options["depth"] = args.depth
    if args.window:
        job.options["window"] = tuple(int(v) for v in args.window.split(","))
    if args.shift:
        shift = tuple(int(v) for v in args.shift.replace(",", " ").split())
        if len(shift) != job.rank:
            raise ValueError(f"--shift has {len(shift)} entries but the module has rank {job.rank}")
        job.shift = shift


def main(argv: Sequence[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="dmodalg", description="Run a D-module computation described by a job file.")
    ap.add_argument("job", help="job file, or - for standard input")
    ap.add_argument("--route", choices=("t0", "h"))
    ap.add_argument("--shift", help="shift vector, e.g. \"0 1\"")
    ap.add_argument("--depth", type=int)
    ap.add_argument("--window", help="k0,k1 override")
    ap.add_argument("--json", metavar="PATH", help="also write the JSON document here")
    ap.add_argument("--verify", action="store_true", help="check invariants of the result")
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        threads = _thread_cap()
        text = sys.stdin.read() if args.job == "-" else open(args.job, encoding="utf-8").read()
        t0 = time.perf_counter()
        job = parse_job(text)
        _apply_flags(job, args)
        t1 = time.perf_counter()
        doc = run(job, args.verify)
        t2 = time.perf_counter()
    except NotSpecializable as e:
        print(f"not specializable: {e}", file=sys.stderr)
        return EXIT_NOT_SPECIALIZABLE
    except (ParseError, ValueError, ArithmeticError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    doc["timings_ms"] = {"parse": round(1000 * (t1 - t0), 3), "run": round(1000 * (t2 - t1), 3)}
    doc["threads"] = threads
    out = json.dumps(doc, indent=2)
    print(out)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
    if args.verify and not all(doc.get("verified", {}).values()):
        print("error: verification failed", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
