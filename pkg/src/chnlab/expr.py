"""Parser for matrix-entry expressions.

Grammar (whitespace is insignificant)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := ('+' | '-') unary | power
    power := atom ('^' ['-'] INT)?
    atom  := INT | NAME | '(' expr ')'

``i`` is the imaginary unit, ``q`` is always available, and any other
name must be declared by the caller.
"""

from __future__ import annotations

import re
from typing import Iterable

from .scalar import I, IMAG_NAME, Q_NAME, Scalar

__all__ = ["ParseError", "parse_scalar"]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


class ParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        marker = " " * position + "^"
        super().__init__(f"{message} at position {position}\n  {text}\n  {marker}")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        elif m.group(3) is not None:
            if m.group(3) not in "+-*/^()":
                raise ParseError(f"unexpected character {m.group(3)!r}", text, start)
            tokens.append(("op", m.group(3), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, params: Iterable[str]):
        self.text = text
        self.params = set(params) | {Q_NAME}
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def take(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, self.text, tok[2])

    def parse(self) -> Scalar:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        value = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return value

    def expr(self) -> Scalar:
        value = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> Scalar:
        value = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            tok = self.take()
            rhs = self.unary()
            if tok[1] == "*":
                value = value * rhs
            else:
                if not rhs:
                    raise self.error("division by zero", tok)
                value = value / rhs
        return value

    def unary(self) -> Scalar:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            value = self.unary()
            return -value if tok[1] == "-" else value
        return self.power()

    def power(self) -> Scalar:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                sign = -1
            tok = self.take()
            if tok[0] != "int":
                raise self.error("expected integer exponent", tok)
            exponent = sign * int(tok[1])
            if exponent < 0 and not base:
                raise self.error("zero raised to a negative power", tok)
            return base**exponent
        return base

    def atom(self) -> Scalar:
        tok = self.take()
        kind, text, _ = tok
        if kind == "int":
            return Scalar(int(text))
        if kind == "name":
            if text == IMAG_NAME:
                return Scalar(I)
            if text not in self.params:
                raise self.error(f"undeclared indeterminate {text!r}", tok)
            return Scalar.param(text)
        if kind == "op" and text == "(":
            value = self.expr()
            close = self.take()
            if close[0] != "op" or close[1] != ")":
                raise self.error("expected ')'", close)
            return value
        if kind == "end":
            raise self.error("unexpected end of expression", tok)
        raise self.error(f"unexpected token {text!r}", tok)


def parse_scalar(text: str, params: Iterable[str] = ()) -> Scalar:
    """Parse ``text`` into a Scalar; ``params`` lists the declared names besides q.

    >>> parse_scalar("(q^2 - q^-2)/(q - 1/q)")
    Scalar(q + q^-1)
    """
    return _Parser(text, params).parse()
