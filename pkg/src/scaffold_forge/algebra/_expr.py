"""Tiny recursive-descent parser for + - * / ^ expressions.

Evaluation is delegated to the caller, which supplies constructors for
integer literals and named symbols; the resulting objects must implement the
arithmetic operators. Exponents are (possibly negative) integer literals.
"""

from __future__ import annotations

import re
from typing import Callable

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def tokenize(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot tokenize {text[pos:]!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("name", name))
        else:
            if op not in "+-*/^()":
                raise ValueError(f"unexpected character {op!r} in {text!r}")
            out.append(("op", op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text, number: Callable, symbol: Callable):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.number = number
        self.symbol = symbol

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, op=None):
        tok = self.peek()
        if tok[0] is None or (op is not None and tok != ("op", op)):
            raise ValueError(f"parse error in {self.text!r} near token {self.i}")
        self.i += 1
        return tok

    def parse(self):
        val = self.sum()
        if self.i != len(self.toks):
            raise ValueError(f"trailing input in {self.text!r}")
        return val

    def sum(self):
        val = self.product()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.product()
            val = val + rhs if op == "+" else val - rhs
        return val

    def product(self):
        val = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            val = val * rhs if op == "*" else val / rhs
        return val

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            kind, val = self.take()
            if kind != "num":
                raise ValueError(f"exponent must be an integer in {self.text!r}")
            return base ** (sign * int(val))
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.number(int(val))
        if kind == "name":
            return self.symbol(val)
        if val == "(":
            inner = self.sum()
            self.take(")")
            return inner
        raise ValueError(f"unexpected {val!r} in {self.text!r}")


def parse_expression(text: str, number: Callable, symbol: Callable):
    return _Parser(text, number, symbol).parse()
