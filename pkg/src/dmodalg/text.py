"""Rendering and parsing of operators.

Operator syntax: a signed sum of monomials, each an optional rational
coefficient times ``*``-separated factors ``var`` or ``var^k``; parentheses
group sub-expressions.  Products are formal Weyl products taken left to
right, so ``dx1*x1`` parses to ``x1*dx1 + 1``.  Module elements are written
``[P1, P2, ...]``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from gmpy2 import mpq

from .ring import ONE, Operator, RingSpec, multiply


class ParseError(ValueError):
    def __init__(self, msg: str, text: str = "", pos: int = 0):
        self.pos = pos
        self.text = text
        where = f" at position {pos}" if text else ""
        caret = f"\n  {text}\n  {' ' * pos}^" if text else ""
        super().__init__(f"{msg}{where}{caret}")


def _fmt_coef(c) -> str:
    c = mpq(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def render_monomial(ring: RingSpec, exps) -> str:
    parts = []
    for name, e in zip(ring.names, exps):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _display_key(ring: RingSpec, mono):
    e = mono[1:]
    nc = ring.ncentral
    return (mono[0], sum(e), tuple(e[nc:]), tuple(e[:nc]))


def render_entry(ring: RingSpec, terms: dict) -> str:
    """Render a rank-1 term dictionary; terms sorted by degree, then lex."""
    if not terms:
        return "0"
    out = []
    for mono in sorted(terms, key=lambda m: _display_key(ring, m), reverse=True):
        c = terms[mono]
        m = render_monomial(ring, mono[1:])
        neg = c < 0
        a = -c if neg else c
        if not m:
            body = _fmt_coef(a)
        elif a == 1:
            body = m
        else:
            body = f"{_fmt_coef(a)}*{m}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def render(P: Operator) -> str:
    if P.rank == 1:
        return render_entry(P.ring, P.terms)
    return "[" + ", ".join(render_entry(P.ring, e.terms) for e in P.entries()) + "]"


# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\^)|(\*)|(\+)|(-)|(\()|(\))|(\[)|(\])|(,))")


def _tokenize(text: str):
    pos = 0
    toks = []
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if not mt:
            raise ParseError("unexpected character", text, pos)
        kinds = ("num", "name", "^", "*", "+", "-", "(", ")", "[", "]", ",")
        for k, g in zip(kinds, mt.groups()):
            if g is not None:
                toks.append((k, g, mt.start(mt.lastindex)))
                break
        pos = mt.end()
    toks.append(("end", "", n))
    return toks


class _Parser:
    def __init__(self, ring: RingSpec, text: str, aliases: dict | None = None):
        self.ring, self.text = ring, text
        self.toks = _tokenize(text)
        self.i = 0
        self.names = set(ring.names)
        self.aliases = aliases or {}

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        t = self.toks[self.i]
        if kind is not None and t[0] != kind:
            raise ParseError(f"expected {kind!r}, found {t[1] or 'end of input'!r}", self.text, t[2])
        self.i += 1
        return t

    def expr(self) -> Operator:
        ring = self.ring
        sign = ONE
        if self.peek()[0] in "+-":
            sign = -ONE if self.take()[0] == "-" else ONE
        acc = self.term().scale(sign)
        while self.peek()[0] in ("+", "-"):
            sgn = self.take()[0]
            t = self.term()
            acc = acc + t if sgn == "+" else acc - t
        return acc

    def term(self) -> Operator:
        acc = self.power()
        while True:
            k = self.peek()[0]
            if k == "*":
                self.take()
                acc = multiply(acc, self.power())
            elif k in ("num", "name", "("):
                # juxtaposition is allowed as implicit multiplication
                acc = multiply(acc, self.power())
            else:
                return acc

    def power(self) -> Operator:
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            t = self.take("num")
            if "/" in t[1]:
                raise ParseError("exponents must be nonnegative integers", self.text, t[2])
            return base ** int(t[1])
        return base

    def atom(self) -> Operator:
        kind, val, pos = self.peek()
        ring = self.ring
        if kind == "num":
            self.take()
            return Operator.constant(ring, mpq(Fraction(val)))
        if kind == "name":
            self.take()
            name = self.aliases.get(val, val)
            if name not in self.names:
                raise ParseError(f"unknown variable {val!r}", self.text, pos)
            return Operator.var(ring, name)
        if kind == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if kind == "-":
            self.take()
            return -self.atom()
        raise ParseError(f"unexpected {val or 'end of input'!r}", self.text, pos)


def parse_operator(text: str, ring: RingSpec, aliases: dict | None = None) -> Operator:
    p = _Parser(ring, text, aliases)
    if p.peek()[0] == "[":
        out = parse_vector_tokens(p)
    else:
        out = p.expr()
    p.take("end")
    return out


def parse_vector_tokens(p: _Parser) -> Operator:
    p.take("[")
    entries = [p.expr()]
    while p.peek()[0] == ",":
        p.take()
        entries.append(p.expr())
    p.take("]")
    return Operator.vector(entries)


def parse_vector(text: str, ring: RingSpec, aliases: dict | None = None) -> Operator:
    p = _Parser(ring, text, aliases)
    out = parse_vector_tokens(p)
    p.take("end")
    return out


def parse(text: str, ring: RingSpec, aliases: dict | None = None) -> Operator:
    """Parse an operator or a bracketed module element."""
    return parse_operator(text, ring, aliases)
