"""Parser for exact polynomial expressions.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INT)?
    atom   := INT | 'i' | VAR | 'conj' '(' expr ')' | '(' expr ')'

VAR is z1..z9 (or the coordinate letter in use, e.g. w1..w9 for map
parameters) and the real sugar x1..x9, y1..y9, which expand to
(z+conj z)/2 and (z-conj z)/(2i).  Division is allowed only by nonzero
constants.  Floating point literals are rejected.
"""

from __future__ import annotations

import re

from .errors import ParseError
from .gaussian import GaussianRational
from .poly import HermitianPolynomial

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


class _Tok:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind, self.text, self.pos = kind, text, pos


def _position(text: str, pos: int):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _tokenize(text: str):
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", *_position(text, pos))
        start = m.start(m.lastgroup)
        if m.lastgroup == "num" and "." in m.group("num"):
            raise ParseError("floating point literals are not allowed", *_position(text, start))
        toks.append(_Tok(m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, n: int, letter: str):
        self.text = text
        self.n = n
        self.letter = letter
        self.toks = _tokenize(text)
        self.i = 0

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, *_position(self.text, tok.pos))

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        tok = self.peek()
        if tok.text != text:
            self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return self.take()

    def parse(self) -> HermitianPolynomial:
        p = self.expr()
        if self.peek().kind != "end":
            self.error(f"unexpected token {self.peek().text!r}")
        return p

    def expr(self):
        p = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek().text in ("*", "/"):
            op_tok = self.take()
            q = self.unary()
            if op_tok.text == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    self.error("division only by nonzero constants", op_tok)
                p = p * q.constant_term().inverse()
        return p

    def unary(self):
        if self.peek().text == "-":
            self.take()
            return -self.unary()
        if self.peek().text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().text == "^":
            self.take()
            tok = self.peek()
            if tok.kind != "num":
                self.error("exponent must be a non-negative integer literal")
            self.take()
            return base ** int(tok.text)
        return base

    def atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.take()
            return HermitianPolynomial.constant(self.n, int(tok.text))
        if tok.text == "(":
            self.take()
            p = self.expr()
            self.expect(")")
            return p
        if tok.kind == "name":
            self.take()
            name = tok.text
            if name == "conj":
                self.expect("(")
                p = self.expr()
                self.expect(")")
                return p.conjugate()
            if name == "i":
                return HermitianPolynomial.constant(self.n, GaussianRational(0, 1))
            m = re.fullmatch(r"([a-z])([1-9])", name)
            if m:
                letter, j = m.group(1), int(m.group(2))
                if j > self.n:
                    self.error(f"variable {name} exceeds dimension {self.n}", tok)
                if letter == self.letter:
                    return HermitianPolynomial.z(self.n, j)
                if letter == "x" and self.letter == "z":
                    return HermitianPolynomial.x(self.n, j)
                if letter == "y" and self.letter == "z":
                    return HermitianPolynomial.y(self.n, j)
            self.error(f"unknown variable {name!r}", tok)
        self.error(f"unexpected token {tok.text or 'end of input'!r}")


def parse_expression(text: str, n: int, letter: str = "z") -> HermitianPolynomial:
    """Parse ``text`` into a polynomial in n complex variables."""
    if not 1 <= n <= 9:
        raise ParseError(f"dimension {n} outside 1..9")
    return _Parser(text, n, letter).parse()


def parse_constant(text: str):
    """Parse a constant expression such as '1/2 - 3*i' to a GaussianRational."""
    p = parse_expression(str(text), 1)
    if not p.is_constant():
        raise ParseError(f"expected a constant, got {text!r}")
    return p.constant_term()
