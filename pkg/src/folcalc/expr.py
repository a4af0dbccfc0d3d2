"""Numeric expressions for Hermitian field entries.

Grammar: Gaussian-rational literals (``3/4``, ``i``), ring variables, ``eps``,
``conj(.)``, ``abs2(.)``, ``+ - * /`` and integer powers.  Evaluation is
vectorized over an (N, n) array of complex points.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._parse import ParseError, parse, symbols_in

__all__ = ["Expression", "ExpressionError", "parse_expression", "eval_expression"]

EPS = "eps"


class ExpressionError(ArithmeticError):
    """Runtime evaluation failure located by column and (for arrays) sample index."""

    def __init__(self, message: str, text: str, col: int | None = None, sample: int | None = None):
        self.message = message
        self.text = text
        self.col = col
        self.sample = sample
        where = [f"in {text!r}"]
        if col is not None:
            where.append(f"col {col}")
        if sample is not None:
            where.append(f"sample {sample}")
        super().__init__(f"{message} ({', '.join(where)})")


@dataclass(frozen=True)
class Expression:
    text: str
    vars: tuple[str, ...]
    ast: tuple = field(compare=False, repr=False)

    @classmethod
    def parse(cls, text: str, vars: Sequence[str]) -> "Expression":
        vars = tuple(vars)
        ast = parse(text)
        unknown = sorted(symbols_in(ast) - set(vars) - {EPS})
        if unknown:
            col = _find_symbol(text, unknown[0])
            raise ParseError(f"unknown symbol {unknown[0]!r}", col)
        return cls(text, vars, ast)

    def __call__(self, z: np.ndarray, eps: float) -> np.ndarray:
        return self.evaluate(z, eps)

    def evaluate(self, z, eps: float) -> np.ndarray:
        """Values at points ``z`` of shape (N, n); returns a complex array of shape (N,)."""
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        if z.shape[1] != len(self.vars):
            raise ValueError(f"points of dimension {z.shape[1]} for an expression over {len(self.vars)} variables")
        with np.errstate(all="ignore"):
            out = self._eval(self.ast, z, complex(eps))
        return np.broadcast_to(np.asarray(out, dtype=complex), (z.shape[0],)).copy()

    def _eval(self, node, z, eps):
        tag = node[0]
        if tag == "num":
            return complex(node[1])
        if tag == "imag":
            return 1j
        if tag == "sym":
            return eps if node[1] == EPS else z[:, self.vars.index(node[1])]
        if tag == "call":
            x = self._eval(node[2], z, eps)
            return np.conj(x) if node[1] == "conj" else (x.real * x.real + x.imag * x.imag) + 0j
        if tag == "neg":
            return -self._eval(node[1], z, eps)
        if tag == "add":
            return self._eval(node[1], z, eps) + self._eval(node[2], z, eps)
        if tag == "sub":
            return self._eval(node[1], z, eps) - self._eval(node[2], z, eps)
        if tag == "mul":
            return self._eval(node[1], z, eps) * self._eval(node[2], z, eps)
        if tag == "div":
            den = self._eval(node[2], z, eps)
            self._check_nonzero(den, node[3])
            return self._eval(node[1], z, eps) / den
        if tag == "pow":
            base = self._eval(node[1], z, eps)
            e = node[2]
            if e < 0:
                self._check_nonzero(base, None)
                return 1.0 / _ipow(base, -e)
            return _ipow(base, e)
        raise AssertionError(f"unknown node {tag}")

    def _check_nonzero(self, den, col):
        zero = np.asarray(den) == 0
        if zero.any():
            sample = int(np.argmax(zero.reshape(-1))) if zero.ndim else None
            raise ExpressionError("division by zero", self.text, col, sample)

    def __str__(self):
        return self.text


def _ipow(x, e: int):
    # repeated squaring keeps results exact for Gaussian-integer inputs
    result = 1.0 + 0j
    while e:
        if e & 1:
            result = result * x
        x = x * x
        e >>= 1
    return result


def _find_symbol(text: str, name: str) -> int | None:
    m = re.search(rf"\b{re.escape(name)}\b", text)
    return m.start() + 1 if m else None


def parse_expression(text: str, vars: Sequence[str]) -> Expression:
    return Expression.parse(text, vars)


def eval_expression(e: Expression, z: Sequence[complex], eps: float) -> complex:
    """Value of ``e`` at a single point."""
    z = np.asarray(z, dtype=complex).reshape(1, -1)
    return complex(e.evaluate(z, eps)[0])
