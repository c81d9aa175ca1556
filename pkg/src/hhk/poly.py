"""Commutative (Laurent) polynomials over Q as exponent dictionaries, plus a small parser."""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

Exps = Tuple[int, ...]
Poly = Dict[Exps, Fraction]

__all__ = ["ParseError", "parse_polynomial", "poly_add", "poly_mul", "poly_pow", "poly_scale",
           "monomial_weight", "format_poly", "poly_monomial", "poly_const"]


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        where = f"line {line}, col {col}: " if line else (f"col {col}: " if col else "")
        super().__init__(where + msg)


def poly_const(c, n: int) -> Poly:
    c = Fraction(c)
    return {(0,) * n: c} if c else {}


def poly_monomial(exps: Sequence[int], c=1) -> Poly:
    return {tuple(exps): Fraction(c)}


def poly_add(*ps: Poly) -> Poly:
    out: Poly = {}
    for p in ps:
        for m, c in p.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


def poly_scale(c, p: Poly) -> Poly:
    c = Fraction(c)
    return {m: c * v for m, v in p.items()} if c else {}


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            s = out.get(m, 0) + c1 * c2
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


def poly_pow(p: Poly, k: int, n: int) -> Poly:
    if k < 0:
        if len(p) != 1:
            raise ValueError("only monomials can be raised to negative powers")
        (m, c), = p.items()
        return {tuple(k * e for e in m): Fraction(1) / c ** (-k)}
    out = poly_const(1, n)
    for _ in range(k):
        out = poly_mul(out, p)
    return out


def monomial_weight(m: Sequence[int], weights: Sequence[int]) -> int:
    return sum(e * w for e, w in zip(m, weights))


def format_poly(p: Poly, names: Sequence[str]) -> str:
    if not p:
        return "0"
    parts = []
    for m in sorted(p, reverse=True):
        c = p[m]
        fac = []
        for nm, e in zip(names, m):
            if e == 1:
                fac.append(nm)
            elif e:
                fac.append(f"{nm}^{e}")
        mono = "*".join(fac)
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{c}*{mono}")
    return " + ".join(parts).replace("+ -", "- ")


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str, line: int) -> List[Tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        col = m.start(m.lastindex) + 1
        if m.group(1):
            toks.append(("num", m.group(1), col))
        elif m.group(2):
            toks.append(("name", m.group(2), col))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", line, col)
            toks.append(("op", ch, col))
        pos = m.end()
    toks.append(("end", "", len(text) + 1))
    return toks


def _split_name(word: str, names) -> Optional[List[str]]:
    """Split a juxtaposed product such as ``xy`` into known generator names."""
    if not word:
        return []
    for k in range(len(word), 0, -1):
        if word[:k] in names:
            rest = _split_name(word[k:], names)
            if rest is not None:
                return [word[:k]] + rest
    return None


class _Parser:
    def __init__(self, text: str, names: Sequence[str], allow_negative: bool, line: int):
        self.names = {n: k for k, n in enumerate(names)}
        self.toks = []
        for tok in _tokenize(text, line):
            parts = _split_name(tok[1], self.names) if tok[0] == "name" and tok[1] not in self.names else None
            if parts:
                offsets = [sum(len(q) for q in parts[:k]) for k in range(len(parts))]
                self.toks.extend(("name", q, tok[2] + o) for q, o in zip(parts, offsets))
            else:
                self.toks.append(tok)
        self.i = 0
        self.n = len(names)
        self.allow_negative = allow_negative
        self.line = line

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok[2])

    def expr(self) -> Poly:
        sign = 1
        if self.peek()[:2] in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
        out = poly_scale(sign, self.term())
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
            out = poly_add(out, poly_scale(sign, self.term()))
        return out

    def starts_factor(self) -> bool:
        kind, val, _ = self.peek()
        return kind in ("num", "name") or (kind, val) == ("op", "(")

    def term(self) -> Poly:
        out = self.factor()
        while True:
            if self.peek()[:2] == ("op", "*"):
                self.take()
                out = poly_mul(out, self.factor())
            elif self.peek()[:2] == ("op", "/"):
                self.take()
                den = self.factor()
                if len(den) != 1 or any(next(iter(den))):
                    self.error("division is only allowed by constants")
                out = poly_scale(Fraction(1) / next(iter(den.values())), out)
            elif self.starts_factor():
                out = poly_mul(out, self.factor())
            else:
                return out

    def factor(self) -> Poly:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            neg = False
            if self.peek()[:2] == ("op", "-"):
                self.take()
                neg = True
            tok = self.take()
            if tok[0] != "num":
                self.error("expected an integer exponent", tok)
            k = int(tok[1]) * (-1 if neg else 1)
            if k < 0:
                if len(base) != 1:
                    self.error("negative powers need a monomial base", tok)
                if any(next(iter(base))) and not self.allow_negative:
                    self.error("negative exponents are not allowed here", tok)
            return poly_pow(base, k, self.n)
        return base

    def atom(self) -> Poly:
        tok = self.take()
        kind, val, col = tok
        if kind == "num":
            return poly_const(int(val), self.n)
        if kind == "name":
            if val not in self.names:
                self.error(f"unknown generator {val!r}", tok)
            m = [0] * self.n
            m[self.names[val]] = 1
            return {tuple(m): Fraction(1)}
        if (kind, val) == ("op", "("):
            inner = self.expr()
            if self.take()[:2] != ("op", ")"):
                self.error("expected ')'", tok)
            return inner
        self.error(f"unexpected {val or 'end of input'!r}", tok)


def parse_polynomial(text: str, names: Sequence[str], allow_negative: bool = False, line: int = 0) -> Poly:
    """Parse ``text`` into a polynomial in ``names``.

    Accepts integer or rational coefficients, ``^`` powers, optional ``*``
    and parentheses.  Negative exponents require ``allow_negative``.
    """
    p = _Parser(text, names, allow_negative, line)
    if p.peek()[0] == "end":
        raise ParseError("empty polynomial", line, 1)
    out = p.expr()
    if p.peek()[0] != "end":
        p.error(f"unexpected {p.peek()[1]!r}")
    if not allow_negative and any(e < 0 for m in out for e in m):
        raise ParseError("negative exponents are not allowed here", line, 1)
    return out
