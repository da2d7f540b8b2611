"""Recursive-descent parser for curve expressions.

Grammar (whitespace insignificant, implicit multiplication disallowed):

    expr     := ['-'] term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := base ('^' nat)?
    base     := 'x' | 'y' | rational | '(' expr ')'
    rational := int ('/' posint)?
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DegreeOverflow, PolyParseError
from .poly import BivariatePoly

DEFAULT_EXPONENT_CAP = 64


class _Parser:
    def __init__(self, text, cap):
        self.text = text
        self.pos = 0
        self.cap = cap

    def error(self, expected):
        raise PolyParseError(self.pos, expected, self.text)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch):
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def parse_nat(self):
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            self.error("a number")
        return int(self.text[start:self.pos])

    def parse_rational(self):
        n = self.parse_nat()
        if self.take("/"):
            d = self.parse_nat()
            if d == 0:
                self.error("a positive denominator")
            return Fraction(n, d)
        return Fraction(n)

    def parse_base(self):
        c = self.peek()
        if c == "x":
            self.pos += 1
            return BivariatePoly.x()
        if c == "y":
            self.pos += 1
            return BivariatePoly.y()
        if c.isdigit():
            return BivariatePoly.constant(self.parse_rational())
        if c == "(":
            self.pos += 1
            e = self.parse_expr()
            if not self.take(")"):
                self.error("')'")
            return e
        self.error("'x', 'y', a number, or '('")

    def parse_factor(self):
        base = self.parse_base()
        if self.take("^"):
            n = self.parse_nat()
            if n > self.cap:
                raise DegreeOverflow(n, self.cap)
            base = base ** n
        return base

    def parse_term(self):
        out = self.parse_factor()
        while self.take("*"):
            out = out * self.parse_factor()
        return out

    def parse_expr(self):
        negate = self.take("-")
        out = self.parse_term()
        if negate:
            out = -out
        while True:
            if self.take("+"):
                out = out + self.parse_term()
            elif self.take("-"):
                out = out - self.parse_term()
            else:
                return out


def parse_poly(text: str, exponent_cap: int = DEFAULT_EXPONENT_CAP) -> BivariatePoly:
    """Parse a curve expression into a fully expanded sparse polynomial."""
    p = _Parser(text, exponent_cap)
    result = p.parse_expr()
    p.skip_ws()
    if p.pos != len(text):
        p.error("'+', '-', '*', '^', or end of input")
    for (a, b) in result.terms:
        if a > exponent_cap or b > exponent_cap:
            raise DegreeOverflow(max(a, b), exponent_cap)
    return result
