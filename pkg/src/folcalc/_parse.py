"""Tokenizer and precedence-climbing parser shared by polynomial and field syntax.

The parser produces a small tuple-based AST:

    ("num", Fraction)        ("imag",)
    ("sym", name)            ("call", fname, arg)
    ("neg", x)               ("add" | "sub" | "mul", a, b)
    ("div", a, b, col)       ("pow", base, int)
"""
from __future__ import annotations

import re
from fractions import Fraction

__all__ = ["ParseError", "parse", "symbols_in"]


class ParseError(ValueError):
    """Syntax error with a 1-based column (and optional line) location."""

    def __init__(self, message: str, col: int | None = None, line: int | None = None):
        self.message = message
        self.col = col
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if col is not None:
            where.append(f"col {col}")
        super().__init__(f"{message}" + (f" ({', '.join(where)})" if where else ""))


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^(),]))")

FUNCTIONS = frozenset({"conj", "abs2"})


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {text[col - 1]!r}", col)
        num, name, op = m.groups()
        start = m.start(m.lastindex) + 1
        if num is not None:
            toks.append(("num", int(num), start))
        elif name is not None:
            toks.append(("name", name, start))
        else:
            toks.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    toks.append(("end", None, len(text) + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, col = self.take()
        if kind != "op" or val != value:
            raise ParseError(f"expected {value!r}", col)

    def expr(self):
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                node = ("add" if val == "+" else "sub", node, rhs)
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, val, col = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.unary()
                node = ("mul", node, rhs) if val == "*" else ("div", node, rhs, col)
            else:
                return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            inner = self.unary()
            return ("neg", inner) if val == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            sign = 1
            kind, val, col = self.peek()
            if kind == "op" and val == "(":
                self.take()
                exp = self._int_exponent()
                self.expect(")")
                return ("pow", base, exp)
            if kind == "op" and val == "-":
                self.take()
                sign = -1
            kind, val, col = self.take()
            if kind != "num":
                raise ParseError("exponent must be an integer literal", col)
            return ("pow", base, sign * val)
        return base

    def _int_exponent(self):
        sign = 1
        kind, val, col = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        kind, val, col = self.take()
        if kind != "num":
            raise ParseError("exponent must be an integer literal", col)
        return sign * val

    def atom(self):
        kind, val, col = self.take()
        if kind == "num":
            return ("num", Fraction(val))
        if kind == "name":
            if val == "i":
                return ("imag",)
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "(":
                if val not in FUNCTIONS:
                    raise ParseError(f"unknown function {val!r}", col)
                self.take()
                arg = self.expr()
                self.expect(")")
                return ("call", val, arg)
            return ("sym", val)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise ParseError("unexpected end of input", col)
        raise ParseError(f"unexpected token {val!r}", col)


def parse(text: str):
    """Parse ``text`` into an AST; raises :class:`ParseError`."""
    if not isinstance(text, str):
        raise ParseError(f"expected a string, got {type(text).__name__}")
    p = _Parser(text)
    node = p.expr()
    kind, val, col = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected token {val!r}", col)
    return node


def symbols_in(node) -> set[str]:
    tag = node[0]
    if tag == "sym":
        return {node[1]}
    if tag in ("num", "imag"):
        return set()
    out: set[str] = set()
    for child in node[1:]:
        if isinstance(child, tuple):
            out |= symbols_in(child)
    return out
