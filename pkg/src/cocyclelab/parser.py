"""Expression language for polynomials, vector fields and differential forms.

Grammar, loosest binding first::

    sum     := product (("+" | "-") product)*
    product := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?          # right associative
    atom    := NUMBER | NAME | "d" NAME | "d/d" NAME | "(" sum ")"

``^`` is exponentiation when the right operand is an integer and wedge when
both operands are forms. ``dNAME`` is the 1-form of a declared variable and
``d/dNAME`` the corresponding basis vector field. Division is only by
rational numbers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ProblemSyntaxError, UnknownVariable
from .exactalg import Chart, Poly
from .formscalc import KForm, VectorField, wedge

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<vec>d/d[A-Za-z_][A-Za-z_0-9]*)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # num, vec, name, op, end
    text: str
    column: int


def tokenize(text: str, line: int = 1, offset: int = 0) -> list[Token]:
    """Columns are 1-based and shifted by ``offset`` (position of the
    expression within its line)."""
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ProblemSyntaxError(f"unexpected character {text[pos]!r}", line, offset + pos + 1)
        if m.lastgroup != "ws":
            out.append(Token(m.lastgroup, m.group(), offset + pos + 1))
        pos = m.end()
    out.append(Token("end", "", offset + len(text) + 1))
    return out


Value = object  # Fraction | Poly | VectorField | KForm


class ExpressionParser:
    def __init__(self, chart: Chart, text: str, line: int = 1, offset: int = 0):
        self.chart = chart
        self.line = line
        self.tokens = tokenize(text, line, offset)
        self.i = 0

    # token helpers

    def peek(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ProblemSyntaxError(msg, self.line, tok.column)

    def parse(self) -> Value:
        if self.peek().kind == "end":
            self.error("expected an expression")
        v = self.sum()
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().text!r}")
        return v

    # grammar

    def sum(self) -> Value:
        v = self.product()
        while self.peek().text in ("+", "-") and self.peek().kind == "op":
            tok = self.take()
            rhs = self.product()
            v = self._add(v, rhs, tok, -1 if tok.text == "-" else 1)
        return v

    def product(self) -> Value:
        v = self.unary()
        while self.peek().text in ("*", "/") and self.peek().kind == "op":
            tok = self.take()
            rhs = self.unary()
            v = self._mul(v, rhs, tok) if tok.text == "*" else self._div(v, rhs, tok)
        return v

    def unary(self) -> Value:
        if self.peek().kind == "op" and self.peek().text == "-":
            self.take()
            return -self.unary()
        if self.peek().kind == "op" and self.peek().text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Value:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            tok = self.take()
            exp = self.unary()
            return self._pow(base, exp, tok)
        return base

    def atom(self) -> Value:
        tok = self.take()
        if tok.kind == "num":
            if "." in tok.text:
                return Fraction(tok.text)
            return Fraction(int(tok.text))
        if tok.kind == "vec":
            name = tok.text[3:]
            if name not in self.chart:
                raise UnknownVariable(name, self.line, tok.column + 3)
            return VectorField.partial(self.chart, name)
        if tok.kind == "name":
            if tok.text in self.chart:
                return Poly.var(self.chart, tok.text)
            if tok.text.startswith("d") and tok.text[1:] in self.chart:
                return KForm.d(self.chart, tok.text[1:])
            raise UnknownVariable(tok.text, self.line, tok.column)
        if tok.kind == "op" and tok.text == "(":
            v = self.sum()
            if self.peek().text != ")":
                self.error("expected ')'")
            self.take()
            return v
        if tok.kind == "end":
            self.error("unexpected end of expression", tok)
        self.error(f"unexpected {tok.text!r}", tok)

    # semantic actions

    def _lift(self, v):
        return Poly.constant(self.chart, v) if isinstance(v, Fraction) else v

    def _add(self, a, b, tok, sign):
        if isinstance(a, Fraction) and isinstance(b, Fraction):
            return a + sign * b
        a, b = self._lift(a), self._lift(b)
        if type(a) is not type(b) or (isinstance(a, KForm) and a.degree != b.degree):
            self.error("cannot add values of different kinds", tok)
        return a + b if sign > 0 else a - b

    def _mul(self, a, b, tok):
        scalars = (Fraction, Poly)
        if isinstance(a, scalars) and isinstance(b, scalars):
            return a * b if isinstance(a, Poly) or isinstance(b, Fraction) else b * a
        if isinstance(a, scalars) and isinstance(b, (VectorField, KForm)):
            return b * a
        if isinstance(b, scalars) and isinstance(a, (VectorField, KForm)):
            return a * b
        self.error("'*' needs a scalar on one side; use '^' for the wedge product", tok)

    def _div(self, a, b, tok):
        if not isinstance(b, Fraction):
            self.error("division is only by rational numbers", tok)
        if b == 0:
            self.error("division by zero", tok)
        return a / b

    def _pow(self, a, b, tok):
        if isinstance(a, KForm) and isinstance(b, KForm):
            return wedge(a, b)
        if isinstance(b, Fraction):
            if b.denominator != 1:
                self.error("exponent must be an integer", tok)
            if isinstance(a, Fraction):
                if a == 0 and b < 0:
                    self.error("division by zero", tok)
                return a ** int(b)
            if isinstance(a, Poly):
                if b < 0:
                    self.error("negative powers of polynomials are not allowed", tok)
                return a ** int(b)
        self.error("'^' needs an integer exponent or two forms", tok)


def parse_expression(chart: Chart, text: str, line: int = 1, offset: int = 0) -> Value:
    return ExpressionParser(chart, text, line, offset).parse()


def parse_poly(chart: Chart, text: str, line: int = 1, offset: int = 0) -> Poly:
    v = parse_expression(chart, text, line, offset)
    if isinstance(v, Fraction):
        return Poly.constant(chart, v)
    if not isinstance(v, Poly):
        raise ProblemSyntaxError("expected a polynomial", line, offset + 1)
    return v


def parse_vector_field(chart: Chart, text: str, line: int = 1, offset: int = 0) -> VectorField:
    v = parse_expression(chart, text, line, offset)
    if isinstance(v, Fraction) and v == 0:
        return VectorField.zero(chart)
    if not isinstance(v, VectorField):
        raise ProblemSyntaxError("expected a vector field (terms like expr*d/dq1)", line, offset + 1)
    return v


def parse_form(chart: Chart, text: str, degree: int, line: int = 1, offset: int = 0) -> KForm:
    v = parse_expression(chart, text, line, offset)
    if isinstance(v, Fraction) and v == 0:
        return KForm.zero(chart, degree)
    if not isinstance(v, KForm) or v.degree != degree:
        raise ProblemSyntaxError(f"expected a {degree}-form", line, offset + 1)
    return v
