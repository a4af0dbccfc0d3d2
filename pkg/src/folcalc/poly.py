"""Sparse multivariate polynomials over Q(i)."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ._parse import ParseError, parse
from .gaussian import ONE, ZERO, GaussianRational, as_gaussian, format_gaussian

__all__ = ["MultiPoly", "default_vars", "grevlex_key", "parse_poly"]

Exponent = tuple[int, ...]


def default_vars(n: int) -> tuple[str, ...]:
    return tuple(f"z{j + 1}" for j in range(n))


def grevlex_key(exp: Exponent):
    """Sort key realizing degree-reverse-lexicographic order (larger key = larger monomial)."""
    return (sum(exp), tuple(-e for e in reversed(exp)))


class MultiPoly:
    """Immutable polynomial in variables ``vars`` with Gaussian rational coefficients.

    ``terms`` maps exponent tuples to nonzero coefficients.
    """

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars: Sequence[str] | int, terms: Mapping[Exponent, object] | None = None):
        if isinstance(vars, int):
            vars = default_vars(vars)
        self.vars = tuple(vars)
        n = len(self.vars)
        clean: dict[Exponent, GaussianRational] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(exp)
            if len(exp) != n:
                raise ValueError(f"exponent {exp} does not match {n} variables")
            c = as_gaussian(c)
            if c:
                clean[exp] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, vars: tuple[str, ...], terms: dict) -> "MultiPoly":
        obj = object.__new__(cls)
        obj.vars = vars
        obj.terms = terms
        obj._hash = None
        return obj

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, vars, c) -> "MultiPoly":
        if isinstance(vars, int):
            vars = default_vars(vars)
        c = as_gaussian(c)
        return cls._raw(tuple(vars), {(0,) * len(vars): c} if c else {})

    @classmethod
    def zero(cls, vars) -> "MultiPoly":
        return cls.constant(vars, 0)

    @classmethod
    def one(cls, vars) -> "MultiPoly":
        return cls.constant(vars, 1)

    @classmethod
    def var(cls, vars, j: int) -> "MultiPoly":
        """The coordinate polynomial for 0-based index ``j``."""
        if isinstance(vars, int):
            vars = default_vars(vars)
        n = len(vars)
        if not 0 <= j < n:
            raise IndexError(f"variable index {j} out of range for {n} variables")
        exp = tuple(1 if k == j else 0 for k in range(n))
        return cls._raw(tuple(vars), {exp: ONE})

    @classmethod
    def monomial(cls, vars, exp: Exponent, c=1) -> "MultiPoly":
        if isinstance(vars, int):
            vars = default_vars(vars)
        return cls(vars, {tuple(exp): c})

    @classmethod
    def parse(cls, text: str, vars) -> "MultiPoly":
        return parse_poly(text, vars)

    # -- basic queries --------------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> GaussianRational:
        return self.terms.get((0,) * self.nvars, ZERO)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def sorted_terms(self) -> list[tuple[Exponent, GaussianRational]]:
        """Terms from largest to smallest monomial in grevlex order."""
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def leading_exponent(self) -> Exponent:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms, key=grevlex_key)

    def leading_coefficient(self) -> GaussianRational:
        return self.terms[self.leading_exponent()]

    def coefficient(self, exp: Exponent) -> GaussianRational:
        return self.terms.get(tuple(exp), ZERO)

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.vars != self.vars:
                raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")
            return other
        return MultiPoly.constant(self.vars, other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return MultiPoly._raw(self.vars, add_terms(self.terms, other.terms))

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return MultiPoly._raw(self.vars, add_terms(self.terms, other.terms, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                c = as_gaussian(other)
            except TypeError:
                return NotImplemented
            return self.scale(c)
        other = self._coerce(other)
        return MultiPoly._raw(self.vars, mul_terms(self.terms, other.terms))

    __rmul__ = __mul__

    def scale(self, c) -> "MultiPoly":
        c = as_gaussian(c)
        if not c:
            return MultiPoly._raw(self.vars, {})
        return MultiPoly._raw(self.vars, {e: v * c for e, v in self.terms.items()})

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            if not other.is_constant() or other.is_zero():
                return self.divide_exact(other)
            other = other.constant_value()
        c = as_gaussian(other)
        return self.scale(c.inverse())

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers need a nonnegative integer exponent")
        result = MultiPoly.one(self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate_coefficients(self) -> "MultiPoly":
        return MultiPoly._raw(self.vars, {e: c.conjugate() for e, c in self.terms.items()})

    def differentiate(self, var: int) -> "MultiPoly":
        return differentiate(self, var)

    def divide_exact(self, other: "MultiPoly") -> "MultiPoly":
        """Quotient q with self == q * other; raises ArithmeticError if not exact."""
        other = self._coerce(other)
        q, r = divmod_poly(self, other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, point: Sequence[complex]) -> complex:
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        total = 0j
        for exp, c in self.terms.items():
            term = complex(c)
            for z, e in zip(point, exp):
                if e:
                    term *= z ** e
            total += term
        return total

    def evaluate_exact(self, point: Sequence) -> GaussianRational:
        point = [as_gaussian(x) for x in point]
        total = ZERO
        for exp, c in self.terms.items():
            term = c
            for z, e in zip(point, exp):
                if e:
                    term = term * z ** e
            total = total + term
        return total

    # -- comparison / printing ---------------------------------------------

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.vars == other.vars and self.terms == other.terms
        try:
            c = as_gaussian(other)
        except TypeError:
            return NotImplemented
        return self.terms == ({(0,) * self.nvars: c} if c else {})

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"MultiPoly({str(self)!r}, vars={self.vars})"

    def __str__(self):
        return format_poly(self.terms, self.vars)


# -- dict-level kernels (also used by the Groebner engine) ---------------------

def add_terms(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for e, c in b.items():
        if sign < 0:
            c = -c
        v = out.get(e)
        if v is None:
            out[e] = c
        else:
            v = v + c
            if v:
                out[e] = v
            else:
                del out[e]
    return out


def mul_terms(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            c = ca * cb
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
    return out


def differentiate(p: MultiPoly, var: int) -> MultiPoly:
    """Formal partial derivative with respect to the 0-based variable ``var``."""
    if not 0 <= var < p.nvars:
        raise IndexError(f"variable index {var} out of range for {p.nvars} variables")
    out = {}
    for exp, c in p.terms.items():
        k = exp[var]
        if k:
            e = exp[:var] + (k - 1,) + exp[var + 1:]
            out[e] = c * k
    return MultiPoly._raw(p.vars, out)


def divmod_poly(f: MultiPoly, g: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    """Multivariate division of f by the single polynomial g (grevlex)."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lg = g.leading_exponent()
    lc_inv = g.terms[lg].inverse()
    rest = dict(f.terms)
    quot: dict = {}
    rem: dict = {}
    while rest:
        lead = max(rest, key=grevlex_key)
        c = rest[lead]
        if all(a >= b for a, b in zip(lead, lg)):
            shift = tuple(a - b for a, b in zip(lead, lg))
            factor = c * lc_inv
            quot[shift] = quot.get(shift, ZERO) + factor
            for e, gc in g.terms.items():
                t = tuple(x + y for x, y in zip(e, shift))
                v = rest.get(t, ZERO) - factor * gc
                if v:
                    rest[t] = v
                else:
                    rest.pop(t, None)
        else:
            rem[lead] = c
            del rest[lead]
    return MultiPoly(f.vars, quot), MultiPoly._raw(f.vars, rem)


def _fmt_monomial(exp: Exponent, vars: Sequence[str]) -> str:
    parts = []
    for name, e in zip(vars, exp):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_poly(terms: Mapping[Exponent, GaussianRational], vars: Sequence[str]) -> str:
    if not terms:
        return "0"
    out = []
    for exp, c in sorted(terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True):
        mono = _fmt_monomial(exp, vars)
        negative = False
        if c.is_real() and c.re < 0:
            negative, c = True, -c
        elif not c.re and c.im < 0:
            negative, c = True, -c
        if not mono:
            body = format_gaussian(c)
        elif c.is_one():
            body = mono
        else:
            ctxt = format_gaussian(c)
            if c.re and c.im:
                ctxt = f"({ctxt})"
            body = f"{ctxt}*{mono}"
        if not out:
            out.append(f"-{body}" if negative else body)
        else:
            out.append(f" - {body}" if negative else f" + {body}")
    return "".join(out)


def ast_to_terms(node, index: Mapping[str, int], n: int) -> dict:
    """Evaluate a parsed AST into a term dict over the variables in ``index``."""
    tag = node[0]
    if tag == "num":
        return {(0,) * n: GaussianRational(node[1])} if node[1] else {}
    if tag == "imag":
        return {(0,) * n: GaussianRational(0, 1)}
    if tag == "sym":
        name = node[1]
        if name not in index:
            raise ParseError(f"unknown variable {name!r}")
        j = index[name]
        return {tuple(1 if k == j else 0 for k in range(n)): ONE}
    if tag == "call":
        raise ParseError(f"function {node[1]!r} is not polynomial")
    if tag == "neg":
        return {e: -c for e, c in ast_to_terms(node[1], index, n).items()}
    if tag in ("add", "sub"):
        a = ast_to_terms(node[1], index, n)
        b = ast_to_terms(node[2], index, n)
        return add_terms(a, b, 1 if tag == "add" else -1)
    if tag == "mul":
        return mul_terms(ast_to_terms(node[1], index, n), ast_to_terms(node[2], index, n))
    if tag == "div":
        a = ast_to_terms(node[1], index, n)
        b = ast_to_terms(node[2], index, n)
        if len(b) != 1 or any(next(iter(b))):
            raise ParseError("division is only allowed by nonzero constants")
        inv = next(iter(b.values())).inverse()
        return {e: c * inv for e, c in a.items()}
    if tag == "pow":
        k = node[2]
        if k < 0:
            raise ParseError("negative exponents are not polynomial")
        base = ast_to_terms(node[1], index, n)
        result = {(0,) * n: ONE}
        for _ in range(k):
            result = mul_terms(result, base)
        return result
    raise ParseError(f"unsupported syntax node {tag!r}")


def parse_poly(text: str, vars) -> MultiPoly:
    """Parse polynomial text such as ``"1/2+3/4*i - z1^2*z2"`` over ``vars``."""
    if isinstance(vars, int):
        vars = default_vars(vars)
    vars = tuple(vars)
    index = {name: j for j, name in enumerate(vars)}
    return MultiPoly._raw(vars, ast_to_terms(parse(text), index, len(vars)))


def polys_from_strings(texts: Iterable[str], vars) -> list[MultiPoly]:
    return [parse_poly(t, vars) for t in texts]
