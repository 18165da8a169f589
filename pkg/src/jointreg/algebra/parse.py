"""Recursive-descent parser for polynomial expressions.

Grammar (ASCII)::

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | power
    power  := atom ('^' INT)?
    atom   := INT ('/' INT)? | NAME | '(' expr ')'

Juxtaposition is rejected; ``2x`` and ``x y`` are syntax errors.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from .poly import MultiPoly

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else pos
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*^/()":
                raise ParseError(f"unexpected character {ch!r}", start)
            tokens.append(("op", ch, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.index = {name: k for k, name in enumerate(variables)}
        if len(self.index) != len(variables):
            raise ValueError("duplicate variable names")
        self.n = len(variables)

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val, pos = self.take()
        if val != value or kind != "op":
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> MultiPoly:
        p = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            if kind in ("name", "int") or val == "(":
                raise ParseError("implicit multiplication is not allowed; use '*'", pos)
            raise ParseError(f"unexpected {val!r}", pos)
        return p

    def expr(self) -> MultiPoly:
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> MultiPoly:
        p = self.unary()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            p = p * self.unary()
        return p

    def unary(self) -> MultiPoly:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return -self.unary()
        return self.power()

    def power(self) -> MultiPoly:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            kind, val, pos = self.take()
            if kind != "int":
                raise ParseError("exponent must be a nonnegative integer literal", pos)
            base = base ** int(val)
        return base

    def atom(self) -> MultiPoly:
        kind, val, pos = self.take()
        if kind == "int":
            c = Fraction(int(val))
            if self.peek()[:2] == ("op", "/"):
                self.take()
                k2, v2, p2 = self.take()
                if k2 != "int":
                    raise ParseError("denominator must be an integer literal", p2)
                if int(v2) == 0:
                    raise ParseError("zero denominator", p2)
                c = Fraction(int(val), int(v2))
            return MultiPoly.constant(self.n, c)
        if kind == "name":
            if val not in self.index:
                raise ParseError(f"unknown variable {val!r}", pos)
            return MultiPoly.var(self.n, self.index[val])
        if (kind, val) == ("op", "("):
            p = self.expr()
            self.expect(")")
            return p
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)


def parse_poly(text: str, variables: Sequence[str]) -> MultiPoly:
    """Parse ``text`` into a polynomial in the given variables.

    >>> parse_poly("(x+y)^2 - x^2 - y^2", ["x", "y"]).to_string(["x", "y"])
    '2*x*y'
    """
    return _Parser(text, variables).parse()


def split_tuple(text: str) -> list[str]:
    """Split ``"[a, b, c]"`` (or ``"(a, b)"``) at top-level commas."""
    s = text.strip()
    if s[:1] in "[(" and s[-1:] in "])":
        s = s[1:-1]
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in ",:" and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur).strip())
    if any(not p for p in parts):
        raise ValueError(f"empty component in {text!r}")
    return parts
